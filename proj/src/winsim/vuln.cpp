#include "privesc/winsim/vuln.hpp"

#include <map>

namespace privesc::winsim {

std::string_view vuln_label(Vuln v) {
  static constexpr std::array<std::string_view, kNumVulnVariants> kLabels = {
      "1.1", "1.2", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11", "12"};
  return kLabels.at(static_cast<std::size_t>(v));
}

std::string_view vuln_description(Vuln v) {
  switch (v) {
    case Vuln::MissingDll: return "missing DLL";
    case Vuln::WritableDll: return "writable DLL";
    case Vuln::ReconfigurableService: return "re-configurable service";
    case Vuln::UnquotedServicePath: return "unquoted service path";
    case Vuln::ModifiableImagePath: return "modifiable ImagePath in the service registry";
    case Vuln::WritableServiceExe: return "writable service executable";
    case Vuln::MissingServiceBinary: return "missing service binary and writable service folder";
    case Vuln::WritableAutoRunExe: return "writable AutoRun executable";
    case Vuln::AlwaysInstallElevated: return "AlwaysInstallElevated bits set";
    case Vuln::WinlogonCredentials: return "elevated credentials in the WinLogon registry";
    case Vuln::UnattendCredentials: return "elevated credentials in an Unattend file";
    case Vuln::WritableTaskBinary: return "writable elevated scheduled task binary";
    case Vuln::WritableStartupFolder: return "writable Startup folder";
  }
  return "?";
}

int vuln_class(Vuln v) {
  const int i = static_cast<int>(v);
  return i <= 1 ? 1 : i;
}

std::optional<Vuln> parse_vuln(std::string_view label) {
  for (Vuln v : kAllVulns) {
    if (vuln_label(v) == label) return v;
  }
  if (label == "1") return Vuln::MissingDll;
  return std::nullopt;
}

bool is_service_vuln(Vuln v) {
  switch (v) {
    case Vuln::MissingDll:
    case Vuln::WritableDll:
    case Vuln::ReconfigurableService:
    case Vuln::UnquotedServicePath:
    case Vuln::ModifiableImagePath:
    case Vuln::WritableServiceExe:
    case Vuln::MissingServiceBinary:
      return true;
    default:
      return false;
  }
}

const std::vector<Action>& oracle_sequence(Vuln v) {
  using A = Action;
  static const std::map<Vuln, std::vector<Action>> kSequences = {
      {Vuln::MissingDll,
       {A::GetCurrentUser, A::ListServices, A::AnalyzeServiceDlls, A::SearchDlls, A::GetWindowsPath,
        A::CheckDirectoryPermissions, A::CompileDll, A::DownloadDll, A::PlantMissingDll,
        A::StartExploitedService}},
      {Vuln::WritableDll,
       {A::GetCurrentUser, A::ListServices, A::AnalyzeServiceDlls, A::SearchDlls,
        A::CheckExecutablePermissions, A::CompileDll, A::DownloadDll, A::OverwriteDll,
        A::StartExploitedService}},
      {Vuln::ReconfigurableService,
       {A::GetCurrentUser, A::ListServices, A::CheckServicePermissions, A::ReconfigureServiceAddAdmin,
        A::StartExploitedService}},
      {Vuln::UnquotedServicePath,
       {A::GetCurrentUser, A::ListServices, A::CheckDirectoryPermissions, A::CreateServiceExe,
        A::DownloadServiceExe, A::PlantUnquotedPathExe, A::StartExploitedService}},
      {Vuln::ModifiableImagePath,
       {A::GetCurrentUser, A::ListServices, A::CheckServiceRegistryAcl, A::RegistryServiceAddAdmin,
        A::StartExploitedService}},
      {Vuln::WritableServiceExe,
       {A::GetCurrentUser, A::ListServices, A::CheckExecutablePermissions, A::CreateServiceExe,
        A::DownloadServiceExe, A::OverwriteServiceBinary, A::StartExploitedService}},
      {Vuln::MissingServiceBinary,
       {A::GetCurrentUser, A::ListServices, A::CheckDirectoryPermissions, A::CreateServiceExe,
        A::DownloadServiceExe, A::OverwriteServiceBinary, A::StartExploitedService}},
      {Vuln::WritableAutoRunExe,
       {A::GetCurrentUser, A::ListAutoRuns, A::CheckExecutablePermissions, A::CreateExe,
        A::DownloadExe, A::OverwriteAutoRun}},
      {Vuln::AlwaysInstallElevated,
       {A::GetCurrentUser, A::CheckInstallElevated, A::CreateMsi, A::DownloadMsi, A::InstallMsi}},
      {Vuln::WinlogonCredentials, {A::CheckWinlogon, A::ListUsers, A::TestCredentials}},
      {Vuln::UnattendCredentials,
       {A::SearchUnattendFiles, A::DecodeBase64Credentials, A::ListUsers, A::TestCredentials}},
      {Vuln::WritableTaskBinary,
       {A::GetCurrentUser, A::ListScheduledTasks, A::CheckExecutablePermissions, A::CreateExe,
        A::DownloadExe, A::OverwriteTaskBinary}},
      {Vuln::WritableStartupFolder,
       {A::GetCurrentUser, A::ListAutoRuns, A::CheckDirectoryPermissions, A::CreateExe,
        A::DownloadExe, A::OverwriteAutoRun}},
  };
  return kSequences.at(v);
}

}  // namespace privesc::winsim
