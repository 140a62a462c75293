#include "privesc/winsim/filesystem.hpp"

#include <stdexcept>

#include "privesc/winsim/winpath.hpp"

namespace privesc::winsim {

namespace {

std::string key(std::string_view p) { return winpath::normalize(p); }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Acl& Acl::grant(std::string_view principal, std::uint8_t bits) {
  entries[lower(principal)] |= bits;
  return *this;
}

std::uint8_t Acl::access(std::string_view principal) const {
  const auto it = entries.find(lower(principal));
  return it == entries.end() ? 0 : it->second;
}

std::uint8_t Acl::access(std::span<const std::string> token) const {
  std::uint8_t bits = 0;
  for (const auto& p : token) bits |= access(p);
  return bits;
}

bool is_malicious(Content c) { return c != Content::Benign; }

FileSystem::FileSystem() {
  FsNode root{"C:\\", true, system_acl(), Content::Benign};
  nodes_.emplace(key("C:\\"), std::move(root));
}

void FileSystem::add_dir(std::string_view path, const Acl& acl) {
  const std::string k = key(path);
  if (nodes_.count(k)) {
    if (!nodes_.at(k).is_dir) throw std::logic_error("add_dir over a file: " + std::string(path));
    return;
  }
  const std::string par = winpath::parent(path);
  if (par.empty()) throw std::logic_error("add_dir outside the drive: " + std::string(path));
  if (!exists(par)) add_dir(par, acl);
  nodes_.emplace(k, FsNode{std::string(path), true, acl, Content::Benign});
}

void FileSystem::add_file(std::string_view path, const Acl& acl, Content content) {
  const std::string par = winpath::parent(path);
  if (par.empty() || !is_dir(par)) throw std::logic_error("add_file without parent: " + std::string(path));
  nodes_[key(path)] = FsNode{std::string(path), false, acl, content};
}

void FileSystem::set_acl(std::string_view path, const Acl& acl) {
  const auto it = nodes_.find(key(path));
  if (it == nodes_.end()) throw std::logic_error("set_acl on missing node: " + std::string(path));
  it->second.acl = acl;
}

const FsNode* FileSystem::find(std::string_view path) const {
  const auto it = nodes_.find(key(path));
  return it == nodes_.end() ? nullptr : &it->second;
}

bool FileSystem::is_file(std::string_view path) const {
  const FsNode* n = find(path);
  return n && !n->is_dir;
}

bool FileSystem::is_dir(std::string_view path) const {
  const FsNode* n = find(path);
  return n && n->is_dir;
}

bool FileSystem::can_write(std::string_view path, std::span<const std::string> token) const {
  const FsNode* n = find(path);
  return n && (n->acl.access(token) & kWrite);
}

bool FileSystem::can_write_path(std::string_view path, std::span<const std::string> token) const {
  const FsNode* n = find(path);
  if (n && n->is_dir) return false;
  const std::string par = winpath::parent(path);
  const bool dir_ok = !par.empty() && is_dir(par) && can_write(par, token);
  if (n) return (n->acl.access(token) & kWrite) || dir_ok;
  return dir_ok;
}

bool FileSystem::write_file(std::string_view path, std::span<const std::string> token, Content content) {
  if (!can_write_path(path, token)) return false;
  auto it = nodes_.find(key(path));
  if (it != nodes_.end()) {
    it->second.content = content;
    return true;
  }
  Acl acl = system_acl();
  if (!token.empty()) acl.grant(token.front(), kFull);
  nodes_.emplace(key(path), FsNode{std::string(path), false, acl, content});
  return true;
}

std::vector<const FsNode*> FileSystem::children(std::string_view dir) const {
  std::vector<const FsNode*> out;
  std::string prefix = key(dir);
  if (prefix.empty()) return out;
  if (prefix.back() != '\\') prefix.push_back('\\');
  for (auto it = nodes_.lower_bound(prefix); it != nodes_.end() && it->first.starts_with(prefix); ++it) {
    if (it->first.find('\\', prefix.size()) == std::string::npos) out.push_back(&it->second);
  }
  return out;
}

Acl system_acl() {
  Acl acl;
  acl.grant("SYSTEM", kFull).grant("Administrators", kFull).grant("Users", kRead | kExecute);
  return acl;
}

Acl user_writable_acl() {
  Acl acl = system_acl();
  acl.grant("Users", kFull);
  return acl;
}

Acl owner_acl(std::string_view user) {
  Acl acl = system_acl();
  acl.grant(user, kFull);
  return acl;
}

}  // namespace privesc::winsim
