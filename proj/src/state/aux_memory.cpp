#include "privesc/state/aux_memory.hpp"

#include <algorithm>

#include "privesc/winsim/winpath.hpp"

namespace privesc::state {

namespace wp = winsim::winpath;

namespace {

bool contains(const std::vector<std::string>& v, std::string_view path) {
  const std::string key = wp::normalize(path);
  return std::any_of(v.begin(), v.end(), [&](const std::string& p) { return wp::normalize(p) == key; });
}

void erase(std::vector<std::string>& v, std::string_view path) {
  const std::string key = wp::normalize(path);
  std::erase_if(v, [&](const std::string& p) { return wp::normalize(p) == key; });
}

}  // namespace

void AuxMemory::enqueue_dir(std::string_view path) {
  if (dir_writable.count(wp::normalize(path)) || contains(pending_dirs, path)) return;
  pending_dirs.emplace_back(path);
}

void AuxMemory::enqueue_file(std::string_view path) {
  if (file_access.count(wp::normalize(path)) || contains(pending_files, path)) return;
  pending_files.emplace_back(path);
}

void AuxMemory::record_dir(std::string_view path, bool writable) {
  dir_writable[wp::normalize(path)] = writable;
  erase(pending_dirs, path);
}

void AuxMemory::record_file(std::string_view path, FileAccess access) {
  file_access[wp::normalize(path)] = access;
  erase(pending_files, path);
}

std::optional<bool> AuxMemory::dir_known(std::string_view path) const {
  const auto it = dir_writable.find(wp::normalize(path));
  if (it == dir_writable.end()) return std::nullopt;
  return it->second;
}

std::optional<FileAccess> AuxMemory::file_known(std::string_view path) const {
  const auto it = file_access.find(wp::normalize(path));
  if (it == file_access.end()) return std::nullopt;
  return it->second;
}

bool AuxMemory::is_admin(std::string_view user) const {
  const std::string key = wp::normalize(user);
  return std::any_of(admins.begin(), admins.end(),
                     [&](const std::string& a) { return wp::normalize(a) == key; });
}

}  // namespace privesc::state
