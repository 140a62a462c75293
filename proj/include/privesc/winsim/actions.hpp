#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace privesc::winsim {

inline constexpr int kNumActions = 38;

/// The 38 high-level actions. Enumerator values are the 1-based action
/// numbers used in traces and reports; network outputs use value - 1.
enum class Action : std::uint8_t {
  CreateExe = 1,
  CreateServiceExe,
  CompileDll,
  CreateMsi,
  DownloadExe,
  DownloadServiceExe,
  DownloadDll,
  DownloadMsi,
  StartExploitedService,
  StopExploitedService,
  OverwriteAutoRun,
  OverwriteTaskBinary,
  OverwriteServiceBinary,
  PlantUnquotedPathExe,
  OverwriteDll,
  PlantMissingDll,
  ReconfigureServiceExe,
  ReconfigureServiceAddAdmin,
  RegistryServiceExe,
  RegistryServiceAddAdmin,
  InstallMsi,
  SearchUnattendFiles,
  DecodeBase64Credentials,
  TestCredentials,
  CheckServicePermissions,
  CheckServiceRegistryAcl,
  CheckExecutablePermissions,
  CheckDirectoryPermissions,
  AnalyzeServiceDlls,
  SearchDlls,
  ListServices,
  ListAutoRuns,
  ListScheduledTasks,
  CheckInstallElevated,
  CheckWinlogon,
  ListUsers,
  GetCurrentUser,
  GetWindowsPath,
};

enum class ActionKind : std::uint8_t { Artifact, Exploit, Discovery };

constexpr int number(Action a) { return static_cast<int>(a); }
constexpr int index(Action a) { return static_cast<int>(a) - 1; }
constexpr Action action_at(int idx) { return static_cast<Action>(idx + 1); }

/// Table text for the action (frozen; used as the trace action name).
std::string_view action_name(Action a);

ActionKind action_kind(Action a);

/// Parses "A17", "17" or an exact action name.
std::optional<Action> parse_action(std::string_view s);

/// Payload artifacts that can be built and transferred.
enum class Artifact : std::uint8_t { Exe = 0, ServiceExe = 1, Dll = 2, Msi = 3 };
inline constexpr int kNumArtifacts = 4;

std::string_view artifact_name(Artifact a);

}  // namespace privesc::winsim
