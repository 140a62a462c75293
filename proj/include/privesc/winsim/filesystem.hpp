#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privesc::winsim {

enum Perm : std::uint8_t { kRead = 1, kWrite = 2, kExecute = 4, kFull = 7 };

/// Access control list: principal name (case-insensitive) to permission bits.
/// Principals without an entry have no access, so every query is answered.
struct Acl {
  std::map<std::string, std::uint8_t> entries;

  Acl& grant(std::string_view principal, std::uint8_t bits);
  std::uint8_t access(std::string_view principal) const;
  /// Union of the rights of every principal in `token`.
  std::uint8_t access(std::span<const std::string> token) const;

  bool operator==(const Acl&) const = default;
};

/// What a file holds, as far as the simulation cares.
enum class Content : std::uint8_t {
  Benign,
  MaliciousExe,
  MaliciousServiceExe,
  MaliciousDll,
  MaliciousMsi,
};

bool is_malicious(Content c);

struct FsNode {
  std::string path;  // display form
  bool is_dir = false;
  Acl acl;
  Content content = Content::Benign;
  bool operator==(const FsNode&) const = default;
};

/// Drive tree keyed by normalized path. Every node's parent exists.
class FileSystem {
 public:
  FileSystem();

  /// Adds a directory, creating missing parents with `acl`. Idempotent.
  void add_dir(std::string_view path, const Acl& acl);
  void add_file(std::string_view path, const Acl& acl, Content content = Content::Benign);
  void set_acl(std::string_view path, const Acl& acl);

  const FsNode* find(std::string_view path) const;
  bool exists(std::string_view path) const { return find(path) != nullptr; }
  bool is_file(std::string_view path) const;
  bool is_dir(std::string_view path) const;

  /// Write bit on the node itself.
  bool can_write(std::string_view path, std::span<const std::string> token) const;

  /// Whether `token` can put new content at `path`: an existing file needs
  /// write on the file or on its directory (replace), a new file needs write
  /// on the directory.
  bool can_write_path(std::string_view path, std::span<const std::string> token) const;

  /// Creates or replaces a file when can_write_path allows it. The new file
  /// is owned by the writer (first principal of `token`).
  bool write_file(std::string_view path, std::span<const std::string> token, Content content);

  std::vector<const FsNode*> children(std::string_view dir) const;
  const std::map<std::string, FsNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  bool operator==(const FileSystem&) const = default;

 private:
  std::map<std::string, FsNode> nodes_;
};

/// Common ACL shapes.
Acl system_acl();          // SYSTEM/Administrators full, Users read+execute
Acl user_writable_acl();   // system_acl + Users full
Acl owner_acl(std::string_view user);

}  // namespace privesc::winsim
