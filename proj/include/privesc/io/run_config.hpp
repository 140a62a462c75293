#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "privesc/a2c/trainer.hpp"
#include "privesc/net/policy_value_net.hpp"
#include "privesc/winsim/host.hpp"

namespace privesc::io {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EvalSettings {
  std::string policy = "oracle";
  int samples = 100;
  std::uint64_t seed = 1;
  bool parallel = true;
  std::string multi;  // empty: single-vulnerability table
  bool operator==(const EvalSettings&) const = default;
};

/// Everything a run depends on. Serialized into every artifact.
struct RunConfig {
  winsim::EnvConfig env;
  a2c::TrainConfig train;
  net::NetConfig net;
  EvalSettings eval;
  std::string out_dir = "runs/latest";
  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& c);
/// Unknown top-level sections are rejected; missing keys keep defaults.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies "section.key=value" overrides. Values parse as JSON when they can
/// and fall back to plain strings.
RunConfig apply_overrides(const RunConfig& base, const std::vector<std::string>& overrides);

}  // namespace privesc::io
