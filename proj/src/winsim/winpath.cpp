#include "privesc/winsim/winpath.hpp"

#include <algorithm>
#include <cctype>

namespace privesc::winsim::winpath {

namespace {

char lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

}  // namespace

std::string normalize(std::string_view path) {
  std::string out;
  out.reserve(path.size());
  for (char c : path) {
    c = c == '/' ? '\\' : lower(c);
    if (c == '\\' && !out.empty() && out.back() == '\\') continue;
    out.push_back(c);
  }
  while (out.size() > 3 && out.back() == '\\') out.pop_back();
  if (out.size() == 2 && out[1] == ':') out.push_back('\\');
  return out;
}

bool equal(std::string_view a, std::string_view b) { return normalize(a) == normalize(b); }

bool is_drive_root(std::string_view path) {
  while (path.size() > 2 && (path.back() == '\\' || path.back() == '/')) path.remove_suffix(1);
  return path.size() == 2 && path[1] == ':' && std::isalpha(static_cast<unsigned char>(path[0]));
}

std::string parent(std::string_view path) {
  std::string p(path);
  while (p.size() > 3 && (p.back() == '\\' || p.back() == '/')) p.pop_back();
  if (is_drive_root(p)) return {};
  const auto pos = p.find_last_of("\\/");
  if (pos == std::string::npos) return {};
  if (pos == 2 && p[1] == ':') return p.substr(0, 3);
  return p.substr(0, pos);
}

std::string filename(std::string_view path) {
  const auto pos = path.find_last_of("\\/");
  return std::string(pos == std::string_view::npos ? path : path.substr(pos + 1));
}

std::string join(std::string_view dir, std::string_view name) {
  std::string out(dir);
  if (!out.empty() && out.back() != '\\') out.push_back('\\');
  out.append(name);
  return out;
}

std::vector<std::string> ancestors(std::string_view path) {
  std::vector<std::string> out;
  std::string cur = parent(path);
  while (!cur.empty() && !is_drive_root(cur)) {
    out.push_back(cur);
    cur = parent(cur);
  }
  return out;
}

bool in_windows_dir(std::string_view path) {
  const std::string n = normalize(path);
  return n == "c:\\windows" || n.rfind("c:\\windows\\", 0) == 0;
}

bool has_whitespace(std::string_view path) {
  return std::any_of(path.begin(), path.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

std::vector<std::string> unquoted_candidates(std::string_view exe_path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < exe_path.size(); ++i) {
    if (exe_path[i] == ' ') out.push_back(std::string(exe_path.substr(0, i)) + ".exe");
  }
  return out;
}

ImagePath parse_image_path(std::string_view image_path) {
  ImagePath out;
  std::string_view s = image_path;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  if (!s.empty() && s.front() == '"') {
    const auto close = s.find('"', 1);
    out.quoted = true;
    out.exe = std::string(s.substr(1, close == std::string_view::npos ? s.npos : close - 1));
  } else {
    const std::string low = to_lower(s);
    const auto ext = low.find(".exe");
    out.exe = std::string(ext == std::string::npos ? s : s.substr(0, ext + 4));
  }
  const std::string low_exe = to_lower(filename(out.exe));
  out.is_command = low_exe == "cmd.exe" || low_exe == "net.exe";
  return out;
}

}  // namespace privesc::winsim::winpath
