#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privesc/winsim/actions.hpp"

namespace privesc::state {

enum class CredSource : std::uint8_t { Registry, File };

struct Credential {
  std::string user;
  std::string password;  // empty until decoded when !plaintext
  std::string base64;
  bool plaintext = false;
  CredSource source = CredSource::Registry;
  bool tested = false;
  bool valid = false;
  bool admin = false;
  bool operator==(const Credential&) const = default;
};

struct FileAccess {
  bool exists = false;
  bool writable = false;
  bool operator==(const FileAccess&) const = default;
};

/// Identifiers and bookkeeping used to fill action arguments. Nothing here is
/// fed to the network.
struct AuxMemory {
  std::string current_user;  // empty while unknown
  bool users_known = false;
  std::vector<std::string> users;
  std::vector<std::string> admins;
  std::vector<std::string> path_dirs;
  std::vector<Credential> credentials;

  std::vector<std::string> pending_dirs;   // folders awaiting a permission check
  std::vector<std::string> pending_files;  // executables / DLLs awaiting a check
  std::map<std::string, bool> dir_writable;         // normalized path -> writable
  std::map<std::string, FileAccess> file_access;    // normalized path -> result

  std::array<std::string, winsim::kNumArtifacts> downloads;  // path once downloaded
  std::vector<std::string> pending_start;  // exploited services awaiting a start

  /// Queues a folder unless it is already queued or checked.
  void enqueue_dir(std::string_view path);
  void enqueue_file(std::string_view path);
  void record_dir(std::string_view path, bool writable);
  void record_file(std::string_view path, FileAccess access);

  std::optional<bool> dir_known(std::string_view path) const;
  std::optional<FileAccess> file_known(std::string_view path) const;
  bool is_admin(std::string_view user) const;
  bool has_download(winsim::Artifact a) const { return !downloads[static_cast<int>(a)].empty(); }

  bool operator==(const AuxMemory&) const = default;
};

}  // namespace privesc::state
