#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privesc/winsim/filesystem.hpp"
#include "privesc/winsim/vuln.hpp"

namespace privesc::winsim {

inline constexpr std::string_view kLocalSystem = "LocalSystem";

struct UserRec {
  std::string name;
  std::string password;
  bool is_admin = false;
  bool operator==(const UserRec&) const = default;
};

struct ServiceRec {
  std::string name;
  std::string image_path;  // as stored in the registry, quotes included
  std::string run_as;
  bool started = false;
  bool elevated = false;
  bool reconfig_acl = false;  // current user may change the service config
  bool registry_acl = false;  // current user may modify the ImagePath value
  std::vector<std::string> dll_imports;
  bool operator==(const ServiceRec&) const = default;
};

struct TaskRec {
  std::string name;
  std::string exe_path;
  std::string run_as;
  std::string trigger;
  bool elevated = false;
  bool operator==(const TaskRec&) const = default;
};

enum class AutoRunKind : std::uint8_t { RegistryRun, StartupFolder };

struct AutoRunRec {
  std::string name;
  std::string path;  // executable, or the folder for StartupFolder
  std::string trigger;
  AutoRunKind kind = AutoRunKind::RegistryRun;
  bool operator==(const AutoRunRec&) const = default;
};

struct UnattendFile {
  std::string path;
  std::string user;
  std::string password_base64;
  bool operator==(const UnattendFile&) const = default;
};

struct Registry {
  std::optional<std::string> winlogon_user;
  std::optional<std::string> winlogon_password;
  bool install_elevated_machine = false;
  bool install_elevated_user = false;
  bool operator==(const Registry&) const = default;
};

/// Components that look exploitable but are not.
enum class Decoy : std::uint8_t {
  NonElevatedVulnerableService,
  QuotedPathWritableParent,
  StandardUserRegistryCredentials,
  WritablePathFolder,
  StandardUserUnattendCredentials,
  NonElevatedWritableTask,
  SingleInstallElevatedBit,
};
inline constexpr int kNumDecoyKinds = 7;
std::string_view decoy_name(Decoy d);

/// Ground-truth state of the simulated host.
struct SimHost {
  FileSystem fs;
  Registry registry;
  std::vector<ServiceRec> services;
  std::vector<TaskRec> tasks;
  std::vector<AutoRunRec> autoruns;
  std::vector<UserRec> users;
  std::vector<std::string> path_dirs;
  std::vector<UnattendFile> unattend_files;
  std::vector<Vuln> injected;
  std::vector<Decoy> decoys;
  std::string current_user;
  std::string downloads_dir;
  std::string startup_dir;

  const UserRec* find_user(std::string_view name) const;
  UserRec* find_user(std::string_view name);
  bool is_admin(std::string_view user) const;
  /// Principals whose ACL entries apply to `user`.
  std::vector<std::string> token(std::string_view user) const;
  std::vector<std::string> current_token() const { return token(current_user); }
  ServiceRec* find_service(std::string_view name);
  const ServiceRec* find_service(std::string_view name) const;
  /// DLL search order for a service binary in `binary_dir`.
  std::vector<std::string> dll_search_dirs(std::string_view binary_dir) const;
  /// First existing file for `dll` along the search order.
  std::optional<std::string> resolve_dll(std::string_view binary_dir, std::string_view dll) const;

  bool operator==(const SimHost&) const = default;
};

struct IntRange {
  int lo = 1;
  int hi = 1;
  bool operator==(const IntRange&) const = default;
};

/// Per-kind inclusion probabilities; each kind appears at most once.
struct DecoyRates {
  double non_elevated_service = 0.25;
  double quoted_writable_parent = 0.25;
  double standard_registry_credentials = 0.25;
  double writable_path_folder = 0.25;
  double standard_unattend_credentials = 0.25;
  double non_elevated_writable_task = 0.25;
  double single_install_elevated_bit = 0.25;
  bool operator==(const DecoyRates&) const = default;
};

enum class VulnMode : std::uint8_t { SingleRandom, Fixed, Multi };

struct EnvConfig {
  IntRange services{1, 20};
  IntRange autoruns{1, 10};
  IntRange tasks{1, 10};
  IntRange dlls_per_service{1, 4};
  int max_steps = 1000;
  DecoyRates decoys;
  VulnMode mode = VulnMode::SingleRandom;
  std::vector<Vuln> vulns;  // Fixed: exactly one; Multi: the set
  double windows_service_fraction = 0.3;

  /// Throws std::invalid_argument on empty or out-of-domain ranges.
  void validate() const;
  bool operator==(const EnvConfig&) const = default;
};

/// Draws a host. Deterministic in (seed, cfg).
SimHost generate_host(std::uint64_t seed, const EnvConfig& cfg);

/// The vulnerability set a host will receive for (seed, cfg).
std::vector<Vuln> choose_vulns(std::uint64_t seed, const EnvConfig& cfg);

}  // namespace privesc::winsim
