#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "privesc/winsim/actions.hpp"
#include "privesc/winsim/host.hpp"

namespace privesc::winsim {

struct ServiceEntry {
  std::string name;
  std::string image_path;
  std::string run_as;
  bool started = false;
  bool operator==(const ServiceEntry&) const = default;
};

struct AutoRunEntry {
  std::string name;
  std::string path;
  std::string trigger;
  AutoRunKind kind = AutoRunKind::RegistryRun;
  bool operator==(const AutoRunEntry&) const = default;
};

struct TaskEntry {
  std::string name;
  std::string exe_path;
  std::string run_as;
  std::string trigger;
  bool operator==(const TaskEntry&) const = default;
};

struct ServiceList {
  std::vector<ServiceEntry> entries;
  bool operator==(const ServiceList&) const = default;
};
struct AutoRunList {
  std::vector<AutoRunEntry> entries;
  bool operator==(const AutoRunList&) const = default;
};
struct TaskList {
  std::vector<TaskEntry> entries;
  bool operator==(const TaskList&) const = default;
};
struct UserList {
  std::vector<std::string> users;
  std::vector<std::string> admins;
  bool operator==(const UserList&) const = default;
};
struct CurrentUser {
  std::string name;
  bool operator==(const CurrentUser&) const = default;
};
struct WindowsPath {
  std::vector<std::string> dirs;
  bool operator==(const WindowsPath&) const = default;
};
struct DirAclResult {
  std::string path;
  bool writable = false;
  bool operator==(const DirAclResult&) const = default;
};
/// Whether the current user can put content at `path` (replace or create).
struct FileAclResult {
  std::string path;
  bool exists = false;
  bool writable = false;
  bool operator==(const FileAclResult&) const = default;
};
struct ServiceAclResult {
  std::string service;
  bool reconfigurable = false;
  bool operator==(const ServiceAclResult&) const = default;
};
struct RegistryAclResult {
  std::string service;
  bool modifiable = false;
  bool operator==(const RegistryAclResult&) const = default;
};
struct WinlogonCreds {
  std::optional<std::string> user;
  std::optional<std::string> password;
  bool operator==(const WinlogonCreds&) const = default;
};
struct UnattendEntry {
  std::string path;
  std::string user;
  std::string password_base64;
  bool operator==(const UnattendEntry&) const = default;
};
struct UnattendFound {
  std::vector<UnattendEntry> files;
  bool operator==(const UnattendFound&) const = default;
};
struct DecodedCreds {
  std::string user;
  std::string password;
  bool operator==(const DecodedCreds&) const = default;
};
struct CredTestResult {
  std::string user;
  bool valid = false;
  bool admin = false;
  bool operator==(const CredTestResult&) const = default;
};
struct DllScan {
  std::string service;
  std::vector<std::string> dlls;
  bool operator==(const DllScan&) const = default;
};
/// Where `dll` resolves for `service`; no path means nothing on the search order.
struct DllSearch {
  std::string service;
  std::string dll;
  std::optional<std::string> path;
  bool operator==(const DllSearch&) const = default;
};
struct InstallElevatedBits {
  bool machine = false;
  bool user = false;
  bool operator==(const InstallElevatedBits&) const = default;
};
struct ArtifactCreated {
  Artifact kind = Artifact::Exe;
  bool operator==(const ArtifactCreated&) const = default;
};
struct ArtifactDownloaded {
  Artifact kind = Artifact::Exe;
  std::string path;
  bool operator==(const ArtifactDownloaded&) const = default;
};

enum class TargetKind : std::uint8_t { Service, Dll, AutoRun, Task, Installer };

/// A payload was put in place. `name` is the service/autorun/task name, the
/// DLL name for TargetKind::Dll (with `service` set), or the MSI path.
struct Exploited {
  TargetKind kind = TargetKind::Service;
  std::string name;
  std::string service;
  std::string path;
  bool operator==(const Exploited&) const = default;
};
struct ServiceStarted {
  std::string service;
  bool operator==(const ServiceStarted&) const = default;
};
struct ServiceStopped {
  std::string service;
  bool operator==(const ServiceStopped&) const = default;
};
struct ActionFailed {
  Action action = Action::CreateExe;
  std::string reason;
  bool operator==(const ActionFailed&) const = default;
};

using Fact = std::variant<ServiceList, AutoRunList, TaskList, UserList, CurrentUser, WindowsPath,
                          DirAclResult, FileAclResult, ServiceAclResult, RegistryAclResult,
                          WinlogonCreds, UnattendFound, DecodedCreds, CredTestResult, DllScan,
                          DllSearch, InstallElevatedBits, ArtifactCreated, ArtifactDownloaded,
                          Exploited, ServiceStarted, ServiceStopped, ActionFailed>;

std::string_view fact_kind(const Fact& f);
std::string_view target_kind_name(TargetKind k);

}  // namespace privesc::winsim
