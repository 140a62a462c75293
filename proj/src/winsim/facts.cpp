#include "privesc/winsim/facts.hpp"

#include <array>

namespace privesc::winsim {

std::string_view fact_kind(const Fact& f) {
  static constexpr std::array<std::string_view, std::variant_size_v<Fact>> kNames = {
      "ServiceList",      "AutoRunList",     "TaskList",          "UserList",
      "CurrentUser",      "WindowsPath",     "DirAclResult",      "FileAclResult",
      "ServiceAclResult", "RegistryAclResult", "WinlogonCreds",   "UnattendFound",
      "DecodedCreds",     "CredTestResult",  "DllScan",           "DllSearch",
      "InstallElevatedBits", "ArtifactCreated", "ArtifactDownloaded", "Exploited",
      "ServiceStarted",   "ServiceStopped",  "ActionFailed"};
  return kNames[f.index()];
}

std::string_view target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::Service: return "service";
    case TargetKind::Dll: return "dll";
    case TargetKind::AutoRun: return "autorun";
    case TargetKind::Task: return "task";
    case TargetKind::Installer: return "installer";
  }
  return "?";
}

}  // namespace privesc::winsim
