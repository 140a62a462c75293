#include "privesc/winsim/actions.hpp"

#include <charconv>
#include <string>

namespace privesc::winsim {

namespace {

constexpr std::array<std::string_view, kNumActions> kNames = {
    "Create a malicious executable in Kali Linux",
    "Create a malicious service executable in Kali Linux",
    "Compile a custom malicious DLL in Kali Linux",
    "Create a malicious MSI in Kali Linux",
    "Download a malicious executable in Windows",
    "Download a malicious service executable in Windows",
    "Download a malicious DLL in Windows",
    "Download a malicious MSI in Windows",
    "Start an exploited service",
    "Stop an exploited service",
    "Overwrite the executable of an autorun",
    "Overwrite the executable of a scheduled task",
    "Overwrite a service binary",
    "Move a malicious executable so that it is executed by an unquoted service path",
    "Overwrite a DLL",
    "Move a malicious DLL to a folder on Windows path to replace a missing DLL",
    "Re-configure service to use a malicious executable",
    "Re-configure service to add the user to local administrators",
    "Change service registry to point to a malicious executable",
    "Change service registry to add the user to local administrators",
    "Install a malicious MSI file",
    "Search for unattend* sysprep* unattended* files",
    "Decode base64 credentials",
    "Test credentials",
    "Check service permissions with accesschk64",
    "Check the ACLs of the service registry with Get-ACL",
    "Check executable permissions with icacls",
    "Check directory permissions with icacls",
    "Analyze service executables for DLLs",
    "Search for DLLs",
    "Get a list of services",
    "Get a list of AutoRuns",
    "Get a list of scheduled tasks",
    "Check AlwaysInstallElevated bits",
    "Check for passwords in Winlogon registry",
    "Get a list of local users and administrators",
    "Get the current user",
    "Get the Windows path",
};

}  // namespace

std::string_view action_name(Action a) { return kNames.at(static_cast<std::size_t>(index(a))); }

ActionKind action_kind(Action a) {
  const int n = number(a);
  if (n <= 8) return ActionKind::Artifact;
  if (n <= 21) return ActionKind::Exploit;
  return ActionKind::Discovery;
}

std::optional<Action> parse_action(std::string_view s) {
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == 'A' || digits.front() == 'a')) digits.remove_prefix(1);
  int n = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) {
    if (n >= 1 && n <= kNumActions) return static_cast<Action>(n);
    return std::nullopt;
  }
  for (int i = 0; i < kNumActions; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == s) return action_at(i);
  }
  return std::nullopt;
}

std::string_view artifact_name(Artifact a) {
  switch (a) {
    case Artifact::Exe: return "exe";
    case Artifact::ServiceExe: return "service_exe";
    case Artifact::Dll: return "dll";
    case Artifact::Msi: return "msi";
  }
  return "?";
}

}  // namespace privesc::winsim
