#include "privesc/net/policy_value_net.hpp"

#include <algorithm>
#include <stdexcept>

#include "privesc/nn/functional.hpp"

namespace privesc::net {

using nn::Activation;

void NetConfig::validate() const {
  for (int v : {embed, service_hidden, dll_hidden, autorun_hidden, task_hidden, head_hidden}) {
    if (v < 1 || v > 4096) throw std::invalid_argument("network layer sizes must be in [1,4096]");
  }
}

nlohmann::json to_json(const NetConfig& c) {
  return {{"embed", c.embed},
          {"service_hidden", c.service_hidden},
          {"dll_hidden", c.dll_hidden},
          {"autorun_hidden", c.autorun_hidden},
          {"task_hidden", c.task_hidden},
          {"head_hidden", c.head_hidden},
          {"activation", std::string(nn::activation_name(c.activation))}};
}

NetConfig net_config_from_json(const nlohmann::json& j) {
  NetConfig c;
  c.embed = j.value("embed", c.embed);
  c.service_hidden = j.value("service_hidden", c.service_hidden);
  c.dll_hidden = j.value("dll_hidden", c.dll_hidden);
  c.autorun_hidden = j.value("autorun_hidden", c.autorun_hidden);
  c.task_hidden = j.value("task_hidden", c.task_hidden);
  c.head_hidden = j.value("head_hidden", c.head_hidden);
  c.activation = nn::parse_activation(j.value("activation", std::string(nn::activation_name(c.activation))));
  c.validate();
  return c;
}

PolicyValueNet::PolicyValueNet(const NetConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const Activation h = cfg_.activation;
  const std::array<Activation, 2> enc_acts = {h, Activation::Identity};
  auto encoder = [&](const char* name, int in, int hidden) {
    const std::array<int, 3> sizes = {in, hidden, cfg_.embed};
    return nn::Mlp::create(params_, name, sizes, enc_acts);
  };
  svc_enc_ = encoder("service_encoder", state::kServiceAttrs, cfg_.service_hidden);
  dll_enc_ = encoder("dll_encoder", state::kDllAttrs, cfg_.dll_hidden);
  ar_enc_ = encoder("autorun_encoder", state::kAutoRunAttrs, cfg_.autorun_hidden);
  task_enc_ = encoder("task_encoder", state::kTaskAttrs, cfg_.task_hidden);
  const std::array<int, 3> pol = {cfg_.trunk_width(), cfg_.head_hidden, winsim::kNumActions};
  const std::array<int, 3> val = {cfg_.trunk_width(), cfg_.head_hidden, 1};
  policy_head_ = nn::Mlp::create(params_, "policy_head", pol, enc_acts);
  value_head_ = nn::Mlp::create(params_, "value_head", val, enc_acts);
}

void PolicyValueNet::init(Rng& rng) {
  for (const nn::Mlp* m : {&svc_enc_, &dll_enc_, &ar_enc_, &task_enc_, &policy_head_, &value_head_}) {
    m->init(params_, rng);
  }
}

void PolicyValueNet::init(std::uint64_t seed) {
  Rng rng(seed);
  init(rng);
}

void PolicyValueNet::encode_set(const nn::Mlp& enc, const RowBlock& rows, nn::Mlp::Cache& cache,
                                std::vector<double>& agg, std::vector<int>& arg) const {
  const int E = cfg_.embed;
  const auto out = enc.forward(params_, rows.data, rows.rows, cache);
  agg.assign(out.begin(), out.begin() + E);
  arg.assign(static_cast<std::size_t>(E), 0);
  for (int r = 1; r < rows.rows; ++r) {
    for (int k = 0; k < E; ++k) {
      const double v = out[static_cast<std::size_t>(r) * E + k];
      if (v > agg[static_cast<std::size_t>(k)]) {
        agg[static_cast<std::size_t>(k)] = v;
        arg[static_cast<std::size_t>(k)] = r;
      }
    }
  }
}

NetOutput PolicyValueNet::forward(const state::EncodedState& enc, NetWorkspace& ws) const {
  const int N = enc.services.rows;
  const int E = cfg_.embed;
  const int W = cfg_.trunk_width();
  if (N < 1 || enc.autoruns.rows < 1 || enc.tasks.rows < 1) throw std::invalid_argument("encoded state lacks padding rows");
  if (static_cast<int>(enc.dlls.size()) != N) throw std::invalid_argument("one DLL block per service row required");

  const auto S = svc_enc_.forward(params_, enc.services.data, N, ws.svc);

  ws.dll_offset.assign(static_cast<std::size_t>(N) + 1, 0);
  ws.dll_input.clear();
  for (int i = 0; i < N; ++i) {
    const RowBlock& b = enc.dlls[static_cast<std::size_t>(i)];
    ws.dll_input.insert(ws.dll_input.end(), b.data.begin(), b.data.end());
    ws.dll_offset[static_cast<std::size_t>(i) + 1] = ws.dll_offset[static_cast<std::size_t>(i)] + b.rows;
  }
  const int total_dlls = ws.dll_offset.back();
  std::span<const double> D;
  if (total_dlls > 0) D = dll_enc_.forward(params_, ws.dll_input, total_dlls, ws.dll);
  ws.dll_agg.assign(static_cast<std::size_t>(N) * E, 0.0);
  ws.dll_arg.assign(static_cast<std::size_t>(N) * E, -1);
  for (int i = 0; i < N; ++i) {
    double* agg = ws.dll_agg.data() + static_cast<std::size_t>(i) * E;
    int* arg = ws.dll_arg.data() + static_cast<std::size_t>(i) * E;
    for (int r = ws.dll_offset[static_cast<std::size_t>(i)]; r < ws.dll_offset[static_cast<std::size_t>(i) + 1]; ++r) {
      for (int k = 0; k < E; ++k) {
        const double v = D[static_cast<std::size_t>(r) * E + k];
        if (arg[k] < 0 || v > agg[k]) {
          agg[k] = v;
          arg[k] = r;
        }
      }
    }
  }

  encode_set(ar_enc_, enc.autoruns, ws.ar, ws.ar_agg, ws.ar_arg);
  encode_set(task_enc_, enc.tasks, ws.task, ws.task_agg, ws.task_arg);

  ws.trunk.resize(static_cast<std::size_t>(N) * W);
  for (int i = 0; i < N; ++i) {
    double* row = ws.trunk.data() + static_cast<std::size_t>(i) * W;
    std::copy_n(S.begin() + static_cast<std::ptrdiff_t>(i) * E, E, row);
    std::copy_n(ws.dll_agg.begin() + static_cast<std::ptrdiff_t>(i) * E, E, row + E);
    std::copy_n(ws.ar_agg.begin(), E, row + 2 * E);
    std::copy_n(ws.task_agg.begin(), E, row + 3 * E);
    std::copy(enc.general.begin(), enc.general.end(), row + 4 * E);
  }

  NetOutput out;
  const auto V = value_head_.forward(params_, ws.trunk, N, ws.value_all);
  out.per_service_values.assign(V.begin(), V.end());
  out.selected_service = static_cast<int>(std::max_element(V.begin(), V.end()) - V.begin());
  out.value = V[static_cast<std::size_t>(out.selected_service)];

  const std::span<const double> sel_row(ws.trunk.data() + static_cast<std::size_t>(out.selected_service) * W,
                                        static_cast<std::size_t>(W));
  const auto logits = policy_head_.forward(params_, sel_row, 1, ws.policy_sel);
  std::copy(logits.begin(), logits.end(), out.logits.begin());
  nn::softmax(out.logits, out.policy);
  return out;
}

NetOutput PolicyValueNet::forward(const state::EncodedState& enc) const {
  NetWorkspace ws;
  return forward(enc, ws);
}

void PolicyValueNet::backward_set(const nn::Mlp& enc, const RowBlock& rows, nn::Mlp::Cache& cache,
                                  const std::vector<int>& arg, std::span<const double> d_agg, NetWorkspace& ws,
                                  std::span<double> grad) const {
  const int E = cfg_.embed;
  ws.d_rows.assign(static_cast<std::size_t>(rows.rows) * E, 0.0);
  for (int k = 0; k < E; ++k) ws.d_rows[static_cast<std::size_t>(arg[static_cast<std::size_t>(k)]) * E + k] += d_agg[static_cast<std::size_t>(k)];
  enc.backward(params_, rows.data, cache, ws.d_rows, grad, {});
}

void PolicyValueNet::backward(const state::EncodedState& enc, NetWorkspace& ws, const NetOutput& out, double d_value,
                              std::span<const double> d_logits, std::span<double> grad) const {
  const int E = cfg_.embed;
  const int W = cfg_.trunk_width();
  const int sel = out.selected_service;
  if (grad.size() != params_.count()) throw std::invalid_argument("gradient buffer size mismatch");
  const std::span<const double> sel_row(ws.trunk.data() + static_cast<std::size_t>(sel) * W, static_cast<std::size_t>(W));

  ws.d_trunk.assign(static_cast<std::size_t>(W), 0.0);
  ws.d_in.resize(static_cast<std::size_t>(W));
  policy_head_.backward(params_, sel_row, ws.policy_sel, d_logits, grad, ws.d_in);
  for (int j = 0; j < W; ++j) ws.d_trunk[static_cast<std::size_t>(j)] += ws.d_in[static_cast<std::size_t>(j)];

  if (d_value != 0.0) {
    value_head_.forward(params_, sel_row, 1, ws.value_sel);
    const std::array<double, 1> dv = {d_value};
    value_head_.backward(params_, sel_row, ws.value_sel, dv, grad, ws.d_in);
    for (int j = 0; j < W; ++j) ws.d_trunk[static_cast<std::size_t>(j)] += ws.d_in[static_cast<std::size_t>(j)];
  }

  const std::span<const double> d_trunk(ws.d_trunk);
  svc_enc_.forward(params_, enc.services.row(sel), 1, ws.svc_sel);
  svc_enc_.backward(params_, enc.services.row(sel), ws.svc_sel, d_trunk.subspan(0, static_cast<std::size_t>(E)), grad, {});

  const int first = ws.dll_offset[static_cast<std::size_t>(sel)];
  const int n_dll = ws.dll_offset[static_cast<std::size_t>(sel) + 1] - first;
  if (n_dll > 0) {
    const std::span<const double> rows(ws.dll_input.data() + static_cast<std::size_t>(first) * state::kDllAttrs,
                                       static_cast<std::size_t>(n_dll) * state::kDllAttrs);
    dll_enc_.forward(params_, rows, n_dll, ws.dll_sel);
    ws.d_rows.assign(static_cast<std::size_t>(n_dll) * E, 0.0);
    for (int k = 0; k < E; ++k) {
      const int r = ws.dll_arg[static_cast<std::size_t>(sel) * E + k] - first;
      ws.d_rows[static_cast<std::size_t>(r) * E + k] += d_trunk[static_cast<std::size_t>(E + k)];
    }
    dll_enc_.backward(params_, rows, ws.dll_sel, ws.d_rows, grad, {});
  }

  backward_set(ar_enc_, enc.autoruns, ws.ar, ws.ar_arg, d_trunk.subspan(static_cast<std::size_t>(2 * E), static_cast<std::size_t>(E)), ws, grad);
  backward_set(task_enc_, enc.tasks, ws.task, ws.task_arg, d_trunk.subspan(static_cast<std::size_t>(3 * E), static_cast<std::size_t>(E)), ws, grad);
}

winsim::Action sample_action(const NetOutput& out, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (int i = 0; i < winsim::kNumActions; ++i) {
    const double p = out.policy[static_cast<std::size_t>(i)];
    if (p <= 0.0) continue;
    last_positive = i;
    acc += p;
    if (u < acc) return winsim::action_at(i);
  }
  return winsim::action_at(last_positive);
}

winsim::Action greedy_action(const NetOutput& out) {
  const auto it = std::max_element(out.policy.begin(), out.policy.end());
  return winsim::action_at(static_cast<int>(it - out.policy.begin()));
}

}  // namespace privesc::net
