#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "privesc/nn/params.hpp"

namespace privesc::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Binary layout, all integers and floats little-endian:
///   "PVNCKPT\0" | u32 version | u64 meta_len | meta (UTF-8 JSON)
///   | u32 n_tensors | per tensor: u32 name_len, name, u32 rows, u32 cols,
///     rows*cols f64 values
void save_checkpoint(const std::filesystem::path& path, const ParamStore& params, const nlohmann::json& meta);

struct Checkpoint {
  nlohmann::json meta;
  ParamStore params;
};

/// Throws CheckpointError on I/O failure, bad magic, version mismatch or
/// truncation.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies tensor values from `src` into `dst` by name; shapes must match.
void assign_params(ParamStore& dst, const ParamStore& src);

}  // namespace privesc::nn
