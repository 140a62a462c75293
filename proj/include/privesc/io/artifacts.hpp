#pragma once

#include <cstdint>
#include <filesystem>

#include "privesc/io/run_config.hpp"
#include "privesc/net/policy_value_net.hpp"

namespace privesc::io {

struct LoadedNetwork {
  net::PolicyValueNet net;
  RunConfig config;
  std::int64_t episode = 0;
};

void save_network(const std::filesystem::path& path, const net::PolicyValueNet& net, const RunConfig& cfg,
                  std::int64_t episode);
/// Rebuilds the network from the embedded architecture. Throws
/// nn::CheckpointError on any mismatch.
LoadedNetwork load_network(const std::filesystem::path& path);

}  // namespace privesc::io
