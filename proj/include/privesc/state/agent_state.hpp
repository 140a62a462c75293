#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "privesc/core/row_block.hpp"
#include "privesc/core/trit.hpp"
#include "privesc/state/aux_memory.hpp"
#include "privesc/winsim/facts.hpp"

namespace privesc::state {

inline constexpr int kNumGeneralTrits = 7;
inline constexpr int kNumFlags = 20;
inline constexpr int kGeneralSize = kNumGeneralTrits + kNumFlags;
inline constexpr int kServiceAttrs = 11;
inline constexpr int kDllAttrs = 3;
inline constexpr int kAutoRunAttrs = 2;
inline constexpr int kTaskAttrs = 3;

/// Trinary general variables; encoded at coordinates 0..6.
enum GeneralVar : int {
  kCredsInFiles,
  kFileCredsElevated,
  kCredsInRegistry,
  kRegistryCredsElevated,
  kWritablePathFolder,
  kInstallElevatedSet,
  kAutoRunsEnumerable,
};

/// Binary general variables; encoded at coordinates 7..26.
enum Flag : int {
  kCreatedExe,
  kCreatedServiceExe,
  kCreatedDll,
  kCreatedMsi,
  kDownloadedExe,
  kDownloadedServiceExe,
  kDownloadedDll,
  kDownloadedMsi,
  kKnowsUsers,
  kUsersToCheck,
  kKnowsServices,
  kKnowsTasks,
  kKnowsAutoRuns,
  kDllsAnalyzed,
  kDllsSearched,
  kFoldersPending,
  kExecutablesPending,
  kKnowsCurrentUser,
  kKnowsPath,
  kBase64Pending,
};

enum ServiceAttr : int {
  kSvcRunning,
  kSvcElevated,
  kSvcUnquoted,
  kSvcWritableParent,
  kSvcWhitespace,
  kSvcInWindows,
  kSvcExeWritable,
  kSvcReconfigurable,
  kSvcRegistryModifiable,
  kSvcVulnerableDll,
  kSvcExploited,
};

enum DllAttr : int { kDllMissing, kDllWritable, kDllReplaced };
enum AutoRunAttr : int { kArWritable, kArInWindows };
enum TaskAttr : int { kTaskElevated, kTaskExeWritable, kTaskInWindows };

std::string_view general_var_name(int coordinate);
std::string_view service_attr_name(int attr);

struct DllState {
  std::string name;
  std::string path;  // where it resolved, empty when missing or not searched
  bool searched = false;
  std::array<Trit, kDllAttrs> attrs{};
  bool operator==(const DllState&) const = default;
};

struct ServiceState {
  std::string name;
  std::string image_path;
  std::string exe;
  std::string run_as;
  bool quoted = false;
  bool is_command = false;
  bool dlls_scanned = false;
  std::array<Trit, kServiceAttrs> attrs{};
  std::vector<DllState> dlls;

  DllState* find_dll(std::string_view dll);
  bool operator==(const ServiceState&) const = default;
};

struct AutoRunState {
  std::string name;
  std::string path;
  std::string trigger;
  winsim::AutoRunKind kind = winsim::AutoRunKind::RegistryRun;
  bool overwritten = false;
  std::array<Trit, kAutoRunAttrs> attrs{};
  bool operator==(const AutoRunState&) const = default;
};

struct TaskState {
  std::string name;
  std::string exe_path;
  std::string run_as;
  std::string trigger;
  bool overwritten = false;
  std::array<Trit, kTaskAttrs> attrs{};
  bool operator==(const TaskState&) const = default;
};

/// The agent's belief about the host.
struct AgentState {
  std::array<Trit, kNumGeneralTrits> general{};
  std::array<bool, kNumFlags> flags{};
  std::vector<ServiceState> services;
  std::vector<AutoRunState> autoruns;
  std::vector<TaskState> tasks;
  AuxMemory aux;

  ServiceState* find_service(std::string_view name);
  const ServiceState* find_service(std::string_view name) const;
  bool operator==(const AgentState&) const = default;
};

AgentState init_state();

/// Folds the facts emitted by action `a` into `s`.
void update(AgentState& s, winsim::Action a, const std::vector<winsim::Fact>& facts);

/// Network input. Every entry is -1, 0 or +1. Empty entity categories get a
/// single all-zero row; a service without scanned DLLs has zero DLL rows.
struct EncodedState {
  std::array<double, kGeneralSize> general{};
  RowBlock services;
  std::vector<RowBlock> dlls;  // one block per service row
  RowBlock autoruns;
  RowBlock tasks;
  bool operator==(const EncodedState&) const = default;
};

EncodedState encode(const AgentState& s);

/// True for a run-as account with SYSTEM rights.
bool is_system_account(std::string_view run_as);

}  // namespace privesc::state
