#include "privesc/a2c/trainer.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "privesc/nn/functional.hpp"

namespace privesc::a2c {

std::string_view reduction_name(LossReduction r) { return r == LossReduction::Mean ? "mean" : "sum"; }

LossReduction parse_reduction(std::string_view s) {
  if (s == "sum") return LossReduction::Sum;
  if (s == "mean") return LossReduction::Mean;
  throw std::invalid_argument("reduction must be \"sum\" or \"mean\"");
}

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
  if (!(adam.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must be in [0,1)");
  }
  if (!(adam.eps > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
  if (episodes < 0) throw std::invalid_argument("episodes must be non-negative");
  if (value_weight < 0.0 || entropy_weight < 0.0 || grad_clip < 0.0) {
    throw std::invalid_argument("loss weights and grad_clip must be non-negative");
  }
  if (checkpoint_every < 0 || log_every < 0) throw std::invalid_argument("intervals must be non-negative");
  if (select_every < 0 || select_after < 0) throw std::invalid_argument("selection intervals must be non-negative");
  if (select_every > 0 && select_hosts < 1) throw std::invalid_argument("select_hosts must be positive");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"gamma", c.gamma},
          {"lr", c.adam.lr},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"adam_eps", c.adam.eps},
          {"episodes", c.episodes},
          {"value_weight", c.value_weight},
          {"entropy_weight", c.entropy_weight},
          {"grad_clip", c.grad_clip},
          {"reduction", std::string(reduction_name(c.reduction))},
          {"seed", c.seed},
          {"checkpoint_every", c.checkpoint_every},
          {"select_every", c.select_every},
          {"select_after", c.select_after},
          {"select_hosts", c.select_hosts},
          {"log_every", c.log_every}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.gamma = j.value("gamma", c.gamma);
  c.adam.lr = j.value("lr", c.adam.lr);
  c.adam.beta1 = j.value("beta1", c.adam.beta1);
  c.adam.beta2 = j.value("beta2", c.adam.beta2);
  c.adam.eps = j.value("adam_eps", c.adam.eps);
  c.episodes = j.value("episodes", c.episodes);
  c.value_weight = j.value("value_weight", c.value_weight);
  c.entropy_weight = j.value("entropy_weight", c.entropy_weight);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  if (j.contains("reduction")) c.reduction = parse_reduction(j.at("reduction").get<std::string>());
  c.seed = j.value("seed", c.seed);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.select_every = j.value("select_every", c.select_every);
  c.select_after = j.value("select_after", c.select_after);
  c.select_hosts = j.value("select_hosts", c.select_hosts);
  c.log_every = j.value("log_every", c.log_every);
  c.validate();
  return c;
}

double EpisodeBuffer::total_reward() const {
  double r = 0.0;
  for (const auto& s : steps) r += s.reward;
  return r;
}

EpisodeBuffer rollout(winsim::Env& env, const net::PolicyValueNet& net, Rng& rng, net::NetWorkspace& ws,
                      ActionMode mode) {
  EpisodeBuffer buf;
  state::AgentState st = state::init_state();
  while (!env.done()) {
    StepRecord rec;
    rec.enc = state::encode(st);
    const net::NetOutput out = net.forward(rec.enc, ws);
    rec.action = mode == ActionMode::Sample ? net::sample_action(out, rng) : net::greedy_action(out);
    rec.value = out.value;
    rec.log_prob = std::log(out.policy[static_cast<std::size_t>(winsim::index(rec.action))]);
    const winsim::StepResult r = env.step(rec.action);
    state::update(st, rec.action, r.facts);
    rec.reward = r.reward;
    buf.steps.push_back(std::move(rec));
    buf.success = r.success.has_value();
  }
  return buf;
}

std::vector<double> compute_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + gamma * acc;
    g[t] = acc;
  }
  return g;
}

std::vector<double> compute_advantages(const EpisodeBuffer& buf, std::span<const double> returns) {
  if (returns.size() != buf.steps.size()) throw std::invalid_argument("returns/buffer length mismatch");
  std::vector<double> adv(returns.size());
  for (std::size_t t = 0; t < adv.size(); ++t) adv[t] = returns[t] - buf.steps[t].value;
  return adv;
}

namespace {

struct Targets {
  std::vector<double> returns;
  std::vector<double> advantages;
};

Targets targets(const EpisodeBuffer& buf, double gamma) {
  std::vector<double> rewards;
  rewards.reserve(buf.steps.size());
  for (const auto& s : buf.steps) rewards.push_back(s.reward);
  Targets t;
  t.returns = compute_returns(rewards, gamma);
  t.advantages = compute_advantages(buf, t.returns);
  return t;
}

LossTerms run(const net::PolicyValueNet& net, const EpisodeBuffer& buf, const TrainConfig& cfg,
              net::NetWorkspace& ws, std::vector<double>* grad) {
  const Targets tg = targets(buf, cfg.gamma);
  if (grad) grad->assign(net.param_count(), 0.0);
  LossTerms L;
  std::array<double, winsim::kNumActions> d_logits{};
  for (std::size_t t = 0; t < buf.steps.size(); ++t) {
    const StepRecord& s = buf.steps[t];
    const net::NetOutput out = net.forward(s.enc, ws);
    const int a = winsim::index(s.action);
    const double adv = tg.advantages[t];
    const double logp = nn::log_softmax_at(out.logits, a);
    const double H = nn::entropy(out.policy);
    L.policy += -logp * adv;
    L.value += nn::huber(out.value, tg.returns[t]);
    L.entropy += H;
    if (!grad) continue;
    for (int j = 0; j < winsim::kNumActions; ++j) {
      const double p = out.policy[static_cast<std::size_t>(j)];
      double d = adv * (p - (j == a ? 1.0 : 0.0));
      if (cfg.entropy_weight != 0.0 && p > 0.0) d += cfg.entropy_weight * p * (std::log(p) + H);
      d_logits[static_cast<std::size_t>(j)] = d;
    }
    const double d_value = cfg.value_weight * nn::huber_grad(out.value, tg.returns[t]);
    net.backward(s.enc, ws, out, d_value, d_logits, *grad);
  }
  if (cfg.reduction == LossReduction::Mean && !buf.steps.empty()) {
    const double k = 1.0 / static_cast<double>(buf.steps.size());
    L.policy *= k;
    L.value *= k;
    L.entropy *= k;
    if (grad) {
      for (double& g : *grad) g *= k;
    }
  }
  L.total = L.policy + cfg.value_weight * L.value - cfg.entropy_weight * L.entropy;
  return L;
}

}  // namespace

LossTerms episode_loss(const net::PolicyValueNet& net, const EpisodeBuffer& buf, const TrainConfig& cfg,
                       net::NetWorkspace& ws) {
  return run(net, buf, cfg, ws, nullptr);
}

LossTerms episode_gradient(const net::PolicyValueNet& net, const EpisodeBuffer& buf, const TrainConfig& cfg,
                           net::NetWorkspace& ws, std::vector<double>& grad) {
  return run(net, buf, cfg, ws, &grad);
}

LossTerms update(net::PolicyValueNet& net, nn::AdamState& adam, const EpisodeBuffer& buf, const TrainConfig& cfg,
                 net::NetWorkspace& ws, std::vector<double>& grad) {
  const LossTerms L = episode_gradient(net, buf, cfg, ws, grad);
  if (cfg.grad_clip > 0.0) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > cfg.grad_clip) {
      const double scale = cfg.grad_clip / norm;
      for (double& g : grad) g *= scale;
    }
  }
  nn::adam_step(net.params().data(), grad, adam, cfg.adam);
  return L;
}

void write_metric_row(std::ostream& os, const EpisodeMetric& m) {
  os << m.episode << ',' << m.length << ',' << m.reward << ',';
  if (m.episode >= 100) {
    os << m.avg100_length << ',' << m.avg100_reward;
  } else {
    os << ',';
  }
  os << '\n';
}

std::uint64_t episode_host_seed(std::uint64_t seed, std::int64_t episode) {
  return derive_seed(seed, 0x7472616e, static_cast<std::uint64_t>(episode));
}

std::uint64_t episode_action_seed(std::uint64_t seed, std::int64_t episode) {
  return derive_seed(seed, 0x61637473, static_cast<std::uint64_t>(episode));
}

ValidationPoint validate_greedy(const net::PolicyValueNet& net, const TrainConfig& cfg,
                                const winsim::EnvConfig& env_cfg, net::NetWorkspace& ws) {
  ValidationPoint p;
  p.hosts = cfg.select_hosts;
  winsim::Env env;
  Rng unused(0);
  double total = 0.0;
  for (int i = 0; i < cfg.select_hosts; ++i) {
    env.reset(derive_seed(cfg.seed, 0x76616c69, static_cast<std::uint64_t>(i)), env_cfg);
    const EpisodeBuffer b = rollout(env, net, unused, ws, ActionMode::Greedy);
    p.successes += b.success ? 1 : 0;
    total += b.length();
  }
  p.mean_length = total / cfg.select_hosts;
  return p;
}

TrainResult train(const TrainConfig& cfg, const winsim::EnvConfig& env_cfg, const net::NetConfig& net_cfg,
                  const TrainHooks& hooks) {
  cfg.validate();
  env_cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res{net::PolicyValueNet(net_cfg), {}, {}, cfg.episodes};
  res.net.init(derive_seed(cfg.seed, 0x696e6974));
  nn::AdamState adam;
  net::NetWorkspace ws;
  std::vector<double> grad;
  std::deque<std::pair<int, double>> window;
  double sum_len = 0.0;
  double sum_rew = 0.0;
  if (hooks.metrics_csv) *hooks.metrics_csv << kMetricsHeader << '\n';

  std::optional<nn::ParamStore> best;
  ValidationPoint best_point;
  const auto better = [](const ValidationPoint& a, const ValidationPoint& b) {
    return a.successes != b.successes ? a.successes > b.successes : a.mean_length <= b.mean_length;
  };

  winsim::Env env;
  for (std::int64_t ep = 1; ep <= cfg.episodes; ++ep) {
    env.reset(episode_host_seed(cfg.seed, ep), env_cfg);
    Rng rng(episode_action_seed(cfg.seed, ep));
    const EpisodeBuffer buf = rollout(env, res.net, rng, ws);
    update(res.net, adam, buf, cfg, ws, grad);

    EpisodeMetric m;
    m.episode = ep;
    m.length = buf.length();
    m.reward = buf.total_reward();
    window.emplace_back(m.length, m.reward);
    sum_len += m.length;
    sum_rew += m.reward;
    if (window.size() > 100) {
      sum_len -= window.front().first;
      sum_rew -= window.front().second;
      window.pop_front();
    }
    m.avg100_length = sum_len / static_cast<double>(window.size());
    m.avg100_reward = sum_rew / static_cast<double>(window.size());
    res.metrics.episodes.push_back(m);
    if (hooks.metrics_csv) write_metric_row(*hooks.metrics_csv, m);

    if (hooks.progress && cfg.log_every > 0 && ep % cfg.log_every == 0) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      *hooks.progress << "episode " << ep << "  avg100_length " << m.avg100_length << "  avg100_reward "
                      << m.avg100_reward << "  elapsed " << secs << "s" << std::endl;
    }
    if (hooks.checkpoint && cfg.checkpoint_every > 0 && ep % cfg.checkpoint_every == 0 && ep != cfg.episodes) {
      hooks.checkpoint(ep, res.net);
    }
    if (cfg.select_every > 0 && ep >= cfg.select_after && (ep % cfg.select_every == 0 || ep == cfg.episodes)) {
      ValidationPoint p = validate_greedy(res.net, cfg, env_cfg, ws);
      p.episode = ep;
      res.validation.push_back(p);
      if (!best || better(p, best_point)) {
        best = res.net.params();
        best_point = p;
      }
      if (hooks.progress) {
        *hooks.progress << "validation " << ep << "  greedy success " << p.successes << "/" << p.hosts
                        << "  mean_length " << p.mean_length << std::endl;
      }
    }
  }
  if (hooks.checkpoint) hooks.checkpoint(cfg.episodes, res.net);
  if (best) {
    res.net.params() = *best;
    res.selected_episode = best_point.episode;
  }
  if (hooks.metrics_csv) hooks.metrics_csv->flush();
  res.metrics.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace privesc::a2c
