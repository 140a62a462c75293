#pragma once

#include <string>
#include <string_view>
#include <vector>

/// Windows-style path handling: case-insensitive, backslash separated,
/// drive-rooted ("C:\..."). Display strings keep their case; lookups go
/// through normalize().
namespace privesc::winsim::winpath {

std::string normalize(std::string_view path);

bool equal(std::string_view a, std::string_view b);

/// Parent directory in display form; empty for a drive root.
std::string parent(std::string_view path);

std::string filename(std::string_view path);

std::string join(std::string_view dir, std::string_view name);

bool is_drive_root(std::string_view path);

/// All ancestor directories of `path` from its parent upwards, excluding the
/// drive root.
std::vector<std::string> ancestors(std::string_view path);

bool in_windows_dir(std::string_view path);

bool has_whitespace(std::string_view path);

/// Executables tried by the service control manager before `exe_path` when
/// the image path is unquoted: one "<prefix>.exe" per whitespace position.
std::vector<std::string> unquoted_candidates(std::string_view exe_path);

struct ImagePath {
  std::string exe;        // executable part, without quotes
  bool quoted = false;
  bool is_command = false;  // "cmd.exe /c ..." style command line
};

/// Splits a service image path ("\"C:\\x y\\a.exe\" -k", "C:\\a b\\c.exe").
/// Unquoted paths are taken whole up to and including the first ".exe".
ImagePath parse_image_path(std::string_view image_path);

}  // namespace privesc::winsim::winpath
