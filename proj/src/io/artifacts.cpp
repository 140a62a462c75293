#include "privesc/io/artifacts.hpp"

#include "privesc/nn/checkpoint.hpp"

namespace privesc::io {

void save_network(const std::filesystem::path& path, const net::PolicyValueNet& net, const RunConfig& cfg,
                  std::int64_t episode) {
  const nlohmann::json meta = {{"kind", "policy-value-net"},
                               {"episode", episode},
                               {"seed", cfg.train.seed},
                               {"param_count", net.param_count()},
                               {"config", to_json(cfg)}};
  nn::save_checkpoint(path, net.params(), meta);
}

LoadedNetwork load_network(const std::filesystem::path& path) {
  nn::Checkpoint ck = nn::load_checkpoint(path);
  RunConfig cfg;
  try {
    cfg = run_config_from_json(ck.meta.at("config"));
  } catch (const std::exception& e) {
    throw nn::CheckpointError(std::string("checkpoint lacks a usable run config: ") + e.what());
  }
  LoadedNetwork out{net::PolicyValueNet(cfg.net), cfg, ck.meta.value("episode", std::int64_t{0})};
  nn::assign_params(out.net.params(), ck.params);
  return out;
}

}  // namespace privesc::io
