#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "privesc/winsim/actions.hpp"

namespace privesc::winsim {

/// The injectable vulnerability classes. The hijackable-DLL class has two
/// variants (missing / writable), giving 13 concrete values for 12 classes.
enum class Vuln : std::uint8_t {
  MissingDll,             // 1.1
  WritableDll,            // 1.2
  ReconfigurableService,  // 2
  UnquotedServicePath,    // 3
  ModifiableImagePath,    // 4
  WritableServiceExe,     // 5
  MissingServiceBinary,   // 6
  WritableAutoRunExe,     // 7
  AlwaysInstallElevated,  // 8
  WinlogonCredentials,    // 9
  UnattendCredentials,    // 10
  WritableTaskBinary,     // 11
  WritableStartupFolder,  // 12
};

inline constexpr int kNumVulnVariants = 13;
inline constexpr int kNumVulnClasses = 12;

inline constexpr std::array<Vuln, kNumVulnVariants> kAllVulns = {
    Vuln::MissingDll,          Vuln::WritableDll,          Vuln::ReconfigurableService,
    Vuln::UnquotedServicePath, Vuln::ModifiableImagePath,  Vuln::WritableServiceExe,
    Vuln::MissingServiceBinary, Vuln::WritableAutoRunExe,  Vuln::AlwaysInstallElevated,
    Vuln::WinlogonCredentials, Vuln::UnattendCredentials,  Vuln::WritableTaskBinary,
    Vuln::WritableStartupFolder,
};

/// One representative per report row 1..12; row 1 is the missing-DLL variant.
inline constexpr std::array<Vuln, kNumVulnClasses> kTableRowVulns = {
    Vuln::MissingDll,          Vuln::ReconfigurableService, Vuln::UnquotedServicePath,
    Vuln::ModifiableImagePath, Vuln::WritableServiceExe,    Vuln::MissingServiceBinary,
    Vuln::WritableAutoRunExe,  Vuln::AlwaysInstallElevated, Vuln::WinlogonCredentials,
    Vuln::UnattendCredentials, Vuln::WritableTaskBinary,    Vuln::WritableStartupFolder,
};

/// "1.1", "1.2", "2", ... "12".
std::string_view vuln_label(Vuln v);
std::string_view vuln_description(Vuln v);
/// Class number 1..12 (both DLL variants map to 1).
int vuln_class(Vuln v);
std::optional<Vuln> parse_vuln(std::string_view label);

/// True for vulnerabilities that live on a service record.
bool is_service_vuln(Vuln v);

/// Minimal full-knowledge action sequence exploiting `v`.
const std::vector<Action>& oracle_sequence(Vuln v);

}  // namespace privesc::winsim
