#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "privesc/core/rng.hpp"
#include "privesc/nn/dense.hpp"
#include "privesc/nn/params.hpp"
#include "privesc/state/agent_state.hpp"
#include "privesc/winsim/actions.hpp"

namespace privesc::net {

struct NetConfig {
  int embed = 16;
  int service_hidden = 32;
  int dll_hidden = 32;
  int autorun_hidden = 32;
  int task_hidden = 32;
  int head_hidden = 64;
  nn::Activation activation = nn::Activation::Relu;

  int trunk_width() const { return 4 * embed + state::kGeneralSize; }
  void validate() const;
  bool operator==(const NetConfig&) const = default;
};

nlohmann::json to_json(const NetConfig& c);
NetConfig net_config_from_json(const nlohmann::json& j);

inline constexpr int kParamBudget = 27000;

struct NetOutput {
  std::vector<double> per_service_values;
  int selected_service = 0;
  std::array<double, winsim::kNumActions> logits{};
  std::array<double, winsim::kNumActions> policy{};
  double value = 0.0;
};

/// Scratch buffers reused across calls; one per thread.
struct NetWorkspace {
  nn::Mlp::Cache svc, dll, ar, task, value_all;
  nn::Mlp::Cache svc_sel, dll_sel, value_sel, policy_sel;
  std::vector<double> dll_input;
  std::vector<int> dll_offset;  // first DLL row of each service, size N+1
  std::vector<double> dll_agg;  // N x embed
  std::vector<int> dll_arg;     // N x embed, absolute row index or -1
  std::vector<double> ar_agg, task_agg;
  std::vector<int> ar_arg, task_arg;
  std::vector<double> trunk;    // N x trunk_width
  std::vector<double> d_out, d_in;
  std::vector<double> d_trunk;
  std::vector<double> d_rows;
};

/// Shared per-entity encoders, max aggregation and per-service policy/value
/// heads. The network's value is the largest per-service value; its policy
/// comes from that service's head.
class PolicyValueNet {
 public:
  explicit PolicyValueNet(const NetConfig& cfg = {});

  void init(Rng& rng);
  void init(std::uint64_t seed);

  NetOutput forward(const state::EncodedState& enc, NetWorkspace& ws) const;
  NetOutput forward(const state::EncodedState& enc) const;

  /// Accumulates dL/dθ into `grad` for the forward pass last run on `ws` with
  /// `enc`. `d_value` is dL/d(value); `d_logits` is dL/d(selected logits).
  void backward(const state::EncodedState& enc, NetWorkspace& ws, const NetOutput& out, double d_value,
                std::span<const double> d_logits, std::span<double> grad) const;

  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  const NetConfig& config() const { return cfg_; }
  std::size_t param_count() const { return params_.count(); }

 private:
  void encode_set(const nn::Mlp& enc, const RowBlock& rows, nn::Mlp::Cache& cache, std::vector<double>& agg,
                  std::vector<int>& arg) const;
  void backward_set(const nn::Mlp& enc, const RowBlock& rows, nn::Mlp::Cache& cache, const std::vector<int>& arg,
                    std::span<const double> d_agg, NetWorkspace& ws, std::span<double> grad) const;

  NetConfig cfg_;
  nn::ParamStore params_;
  nn::Mlp svc_enc_, dll_enc_, ar_enc_, task_enc_, policy_head_, value_head_;
};

/// Index into the policy drawn by inverse-CDF sampling.
winsim::Action sample_action(const NetOutput& out, Rng& rng);
/// Most probable action, lowest index on ties.
winsim::Action greedy_action(const NetOutput& out);

}  // namespace privesc::net
