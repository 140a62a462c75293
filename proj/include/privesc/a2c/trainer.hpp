#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "privesc/core/rng.hpp"
#include "privesc/net/policy_value_net.hpp"
#include "privesc/nn/adam.hpp"
#include "privesc/winsim/env.hpp"

namespace privesc::a2c {

/// How per-step losses combine into the episode loss.
enum class LossReduction : std::uint8_t { Sum, Mean };
std::string_view reduction_name(LossReduction r);
LossReduction parse_reduction(std::string_view s);

struct TrainConfig {
  double gamma = 0.995;
  nn::AdamConfig adam;
  std::int64_t episodes = 50000;
  double value_weight = 1.0;
  double entropy_weight = 0.0;
  double grad_clip = 20.0;  // global L2 norm; 0 disables
  LossReduction reduction = LossReduction::Sum;
  std::uint64_t seed = 1;
  std::int64_t checkpoint_every = 5000;  // 0 disables periodic checkpoints
  std::int64_t log_every = 1000;         // 0 disables progress lines
  /// Greedy validation on a fixed host set every select_every episodes from
  /// select_after on; the best-scoring parameters are returned. 0 disables.
  std::int64_t select_every = 500;
  std::int64_t select_after = 20000;
  int select_hosts = 200;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct StepRecord {
  state::EncodedState enc;
  winsim::Action action = winsim::Action::CreateExe;
  double reward = 0.0;
  double value = 0.0;
  double log_prob = 0.0;
};

struct EpisodeBuffer {
  std::vector<StepRecord> steps;
  bool success = false;
  int length() const { return static_cast<int>(steps.size()); }
  double total_reward() const;
};

enum class ActionMode : std::uint8_t { Sample, Greedy };

/// Plays one episode on `env` (already reset) with the network's policy and
/// its own state tracker.
EpisodeBuffer rollout(winsim::Env& env, const net::PolicyValueNet& net, Rng& rng, net::NetWorkspace& ws,
                      ActionMode mode = ActionMode::Sample);

/// G_t = sum_k gamma^k r_{t+k}; no bootstrap past the last step.
std::vector<double> compute_returns(std::span<const double> rewards, double gamma);
std::vector<double> compute_advantages(const EpisodeBuffer& buf, std::span<const double> returns);

struct LossTerms {
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double total = 0.0;
};

/// Summed episode loss at the network's current parameters, with the stored
/// advantages held fixed.
LossTerms episode_loss(const net::PolicyValueNet& net, const EpisodeBuffer& buf, const TrainConfig& cfg,
                       net::NetWorkspace& ws);

/// dL/dθ of episode_loss into `grad` (overwritten).
LossTerms episode_gradient(const net::PolicyValueNet& net, const EpisodeBuffer& buf, const TrainConfig& cfg,
                           net::NetWorkspace& ws, std::vector<double>& grad);

/// One Adam step on the summed episode loss.
LossTerms update(net::PolicyValueNet& net, nn::AdamState& adam, const EpisodeBuffer& buf, const TrainConfig& cfg,
                 net::NetWorkspace& ws, std::vector<double>& grad);

struct EpisodeMetric {
  std::int64_t episode = 0;  // 1-based
  int length = 0;
  double reward = 0.0;
  double avg100_length = 0.0;  // meaningful once episode >= 100
  double avg100_reward = 0.0;
};

struct Metrics {
  std::vector<EpisodeMetric> episodes;
  double wall_seconds = 0.0;
};

inline constexpr const char* kMetricsHeader = "episode,length,reward,avg100_length,avg100_reward";
void write_metric_row(std::ostream& os, const EpisodeMetric& m);

struct TrainHooks {
  std::ostream* metrics_csv = nullptr;  // header written by train()
  std::ostream* progress = nullptr;
  /// Called with (episode, net) every checkpoint_every episodes and at the end.
  std::function<void(std::int64_t, const net::PolicyValueNet&)> checkpoint;
};

struct ValidationPoint {
  std::int64_t episode = 0;
  int successes = 0;
  int hosts = 0;
  double mean_length = 0.0;
  bool operator==(const ValidationPoint&) const = default;
};

/// Plays the greedy policy once on each validation host.
ValidationPoint validate_greedy(const net::PolicyValueNet& net, const TrainConfig& cfg,
                                const winsim::EnvConfig& env_cfg, net::NetWorkspace& ws);

struct TrainResult {
  net::PolicyValueNet net;  // last parameters, or the selected ones when selection ran
  Metrics metrics;
  std::vector<ValidationPoint> validation;
  std::int64_t selected_episode = 0;  // episode whose parameters `net` holds
};

/// Host seeds and action-sampling streams are derived per episode from
/// cfg.seed, so a run is bit-reproducible.
TrainResult train(const TrainConfig& cfg, const winsim::EnvConfig& env_cfg, const net::NetConfig& net_cfg,
                  const TrainHooks& hooks = {});

std::uint64_t episode_host_seed(std::uint64_t seed, std::int64_t episode);
std::uint64_t episode_action_seed(std::uint64_t seed, std::int64_t episode);

}  // namespace privesc::a2c
