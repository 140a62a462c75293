#include "privesc/bench/evaluate.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "privesc/io/serialize.hpp"

namespace privesc::bench {

using winsim::Vuln;

EpisodeLog run_episode(PolicyKind kind, const net::PolicyValueNet* net, winsim::SimHost host, int max_steps,
                       std::uint64_t action_seed, bool record_actions, const StepObserver& observer) {
  EpisodeLog log;
  log.vulns = host.injected;
  log.action_seed = action_seed;
  winsim::Env env;
  env.reset(std::move(host), max_steps);
  Agent agent(kind, net, env.host(), action_seed);
  state::AgentState st = state::init_state();
  while (!env.done()) {
    const auto a = agent.act(st);
    if (!a) break;
    const winsim::StepResult r = env.step(*a);
    state::update(st, *a, r.facts);
    log.reward += r.reward;
    if (record_actions) log.actions.push_back(*a);
    if (observer) observer({r.step_index, *a, &r.facts, r.reward, r.done});
  }
  log.length = env.steps();
  log.path = env.success();
  log.success = log.path.has_value();
  return log;
}

namespace {

EpisodeLog run_task(const EvalTask& t, PolicyKind kind, const net::PolicyValueNet* net, bool record) {
  EpisodeLog log = run_episode(kind, net, winsim::generate_host(t.host_seed, t.env), t.env.max_steps, t.action_seed, record);
  log.id = t.id;
  log.host_seed = t.host_seed;
  return log;
}

std::uint64_t action_seed_for(std::uint64_t seed, std::int64_t id) {
  return derive_seed(seed, 0x61637473, static_cast<std::uint64_t>(id));
}

std::string joined_labels(const std::vector<Vuln>& vs) {
  std::string s;
  for (Vuln v : vs) {
    if (!s.empty()) s += '+';
    s += winsim::vuln_label(v);
  }
  return s;
}

nlohmann::json options_json(const EvalOptions& opt) {
  nlohmann::json vulns = nlohmann::json::array();
  for (Vuln v : opt.vulns) vulns.push_back(std::string(winsim::vuln_label(v)));
  return {{"policy", std::string(policy_name(opt.policy))},
          {"vulns", vulns},
          {"samples", opt.samples},
          {"seed", opt.seed},
          {"env", io::to_json(opt.env)}};
}

}  // namespace

std::vector<EvalTask> plan_single_vuln(const EvalOptions& opt) {
  if (opt.samples < 1) throw std::invalid_argument("samples must be positive");
  std::vector<EvalTask> tasks;
  std::int64_t id = 0;
  for (Vuln v : opt.vulns) {
    winsim::EnvConfig env = opt.env;
    env.mode = winsim::VulnMode::Fixed;
    env.vulns = {v};
    env.validate();
    for (int i = 0; i < opt.samples; ++i) {
      const auto host_seed = derive_seed(opt.seed, 0x686f7374 + static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(i));
      tasks.push_back({id, env, host_seed, action_seed_for(opt.seed, id)});
      ++id;
    }
  }
  return tasks;
}

std::vector<EpisodeLog> run_tasks_serial(const std::vector<EvalTask>& tasks, PolicyKind kind,
                                         const net::PolicyValueNet* net, bool record_actions) {
  std::vector<EpisodeLog> logs;
  logs.reserve(tasks.size());
  for (const auto& t : tasks) logs.push_back(run_task(t, kind, net, record_actions));
  return logs;
}

std::vector<EpisodeLog> run_tasks_parallel(const std::vector<EvalTask>& tasks, PolicyKind kind,
                                           const net::PolicyValueNet* net, bool record_actions) {
  std::vector<EpisodeLog> logs(tasks.size());
  const auto n = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    logs[static_cast<std::size_t>(i)] = run_task(tasks[static_cast<std::size_t>(i)], kind, net, record_actions);
  }
  return logs;
}

EvalReport aggregate(PolicyKind kind, std::string mode, std::vector<EpisodeLog> logs, nlohmann::json config) {
  EvalReport r;
  r.policy = kind;
  r.mode = std::move(mode);
  r.config = std::move(config);
  std::map<std::string, VulnRow> by_label;
  std::vector<std::string> order;
  int successes = 0;
  for (const auto& log : logs) {
    const std::string label = r.mode == "single" ? joined_labels(log.vulns) : r.mode;
    auto [it, fresh] = by_label.try_emplace(label);
    if (fresh) order.push_back(label);
    VulnRow& row = it->second;
    row.label = label;
    row.episodes += 1;
    row.successes += log.success ? 1 : 0;
    row.mean_length += log.length;
    successes += log.success ? 1 : 0;
  }
  auto rank = [](const std::string& label) {
    const auto v = winsim::parse_vuln(label);
    return v ? static_cast<int>(*v) : 1000;
  };
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
  int table_rows = 0;
  for (const auto& label : order) {
    VulnRow row = by_label[label];
    row.mean_length /= row.episodes;
    row.success_rate = static_cast<double>(row.successes) / row.episodes;
    row.in_table = label != "1.2";
    if (row.in_table) {
      r.average += row.mean_length;
      ++table_rows;
    }
    r.rows.push_back(row);
  }
  if (table_rows > 0) r.average /= table_rows;
  r.episodes = static_cast<int>(logs.size());
  r.success_rate = logs.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(logs.size());
  r.logs = std::move(logs);
  return r;
}

EvalReport evaluate(const EvalOptions& opt, const net::PolicyValueNet* net) {
  if (needs_network(opt.policy) && !net) throw std::invalid_argument("policy needs a trained network");
  const auto tasks = plan_single_vuln(opt);
  auto logs = opt.parallel ? run_tasks_parallel(tasks, opt.policy, net, opt.record_actions)
                           : run_tasks_serial(tasks, opt.policy, net, opt.record_actions);
  return aggregate(opt.policy, "single", std::move(logs), options_json(opt));
}

std::string_view multi_mode_name(MultiMode m) {
  switch (m) {
    case MultiMode::AllTwelve: return "all-12";
    case MultiMode::RandomPairs: return "random-pairs";
    case MultiMode::SixServiceVulns: return "six-service";
    case MultiMode::FiftyServices: return "50-services";
  }
  return "?";
}

std::optional<MultiMode> parse_multi_mode(std::string_view s) {
  for (MultiMode m : kAllMultiModes) {
    if (s == multi_mode_name(m)) return m;
  }
  return std::nullopt;
}

std::vector<EvalTask> plan_multi_vuln(MultiMode mode, const EvalOptions& opt) {
  if (opt.samples < 1) throw std::invalid_argument("samples must be positive");
  std::vector<EvalTask> tasks;
  const std::uint64_t base = derive_seed(opt.seed, 0x6d756c74, static_cast<std::uint64_t>(mode));
  for (int i = 0; i < opt.samples; ++i) {
    winsim::EnvConfig env = opt.env;
    const auto host_seed = derive_seed(base, static_cast<std::uint64_t>(i));
    switch (mode) {
      case MultiMode::AllTwelve:
        env.mode = winsim::VulnMode::Multi;
        env.vulns.assign(winsim::kTableRowVulns.begin(), winsim::kTableRowVulns.end());
        break;
      case MultiMode::RandomPairs: {
        Rng rng(derive_seed(host_seed, 0x70616972));
        const int a = uniform_int(rng, 0, winsim::kNumVulnVariants - 1);
        int b = uniform_int(rng, 0, winsim::kNumVulnVariants - 2);
        if (b >= a) ++b;
        env.mode = winsim::VulnMode::Multi;
        env.vulns = {winsim::kAllVulns[static_cast<std::size_t>(a)], winsim::kAllVulns[static_cast<std::size_t>(b)]};
        break;
      }
      case MultiMode::SixServiceVulns:
        env.mode = winsim::VulnMode::Multi;
        env.vulns = {Vuln::MissingDll,          Vuln::ReconfigurableService, Vuln::UnquotedServicePath,
                     Vuln::ModifiableImagePath, Vuln::WritableServiceExe,    Vuln::MissingServiceBinary};
        break;
      case MultiMode::FiftyServices:
        env.mode = winsim::VulnMode::SingleRandom;
        env.vulns.clear();
        env.services = {50, 50};
        env.windows_service_fraction = 0.0;
        break;
    }
    env.validate();
    tasks.push_back({i, env, host_seed, action_seed_for(base, i)});
  }
  return tasks;
}

EvalReport multi_vuln_eval(MultiMode mode, const EvalOptions& opt, const net::PolicyValueNet* net) {
  if (needs_network(opt.policy) && !net) throw std::invalid_argument("policy needs a trained network");
  if (opt.policy == PolicyKind::Oracle) throw std::invalid_argument("the oracle is defined for single-vulnerability hosts");
  const auto tasks = plan_multi_vuln(mode, opt);
  auto logs = opt.parallel ? run_tasks_parallel(tasks, opt.policy, net, opt.record_actions)
                           : run_tasks_serial(tasks, opt.policy, net, opt.record_actions);
  auto cfg = options_json(opt);
  cfg["multi_mode"] = std::string(multi_mode_name(mode));
  return aggregate(opt.policy, std::string(multi_mode_name(mode)), std::move(logs), std::move(cfg));
}

nlohmann::json to_json(const EpisodeLog& log) {
  nlohmann::json vulns = nlohmann::json::array();
  for (Vuln v : log.vulns) vulns.push_back(std::string(winsim::vuln_label(v)));
  nlohmann::json j = {{"id", log.id},
                      {"vulns", vulns},
                      {"host_seed", log.host_seed},
                      {"action_seed", log.action_seed},
                      {"length", log.length},
                      {"success", log.success},
                      {"reward", log.reward},
                      {"success_path", log.path ? nlohmann::json(winsim::success_path_name(*log.path)) : nlohmann::json(nullptr)}};
  if (!log.actions.empty()) {
    nlohmann::json acts = nlohmann::json::array();
    for (auto a : log.actions) acts.push_back(winsim::number(a));
    j["actions"] = acts;
  }
  return j;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"vuln", row.label},
                    {"episodes", row.episodes},
                    {"successes", row.successes},
                    {"mean_length", row.mean_length},
                    {"success_rate", row.success_rate},
                    {"in_average", row.in_table}});
  }
  return {{"policy", std::string(policy_name(r.policy))},
          {"mode", r.mode},
          {"rows", rows},
          {"average", r.average},
          {"success_rate", r.success_rate},
          {"episodes", r.episodes},
          {"config", r.config}};
}

void write_jsonl(std::ostream& os, const EvalReport& r) {
  for (const auto& log : r.logs) {
    auto j = to_json(log);
    j["policy"] = std::string(policy_name(r.policy));
    j["mode"] = r.mode;
    os << j.dump() << '\n';
  }
}

namespace {

std::string fmt(double v, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

}  // namespace

std::string format_table(const std::vector<EvalReport>& reports) {
  std::vector<std::string> labels;
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      if (std::find(labels.begin(), labels.end(), row.label) == labels.end()) labels.push_back(row.label);
    }
  }
  std::stable_sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) {
    const auto va = winsim::parse_vuln(a), vb = winsim::parse_vuln(b);
    const bool ta = a != "1.2", tb = b != "1.2";
    if (ta != tb) return ta;
    return (va ? static_cast<int>(*va) : 1000) < (vb ? static_cast<int>(*vb) : 1000);
  });

  constexpr int kW = 15;
  std::ostringstream os;
  os << std::left << std::setw(8) << "Vuln";
  for (const auto& r : reports) os << std::right << std::setw(kW) << policy_title(r.policy);
  os << '\n';
  auto cell = [&](const EvalReport& r, const std::string& label) -> std::string {
    for (const auto& row : r.rows) {
      if (row.label == label) return fmt(row.mean_length, 1) + (row.success_rate < 1.0 ? "*" : " ");
    }
    return "- ";
  };
  bool avg_done = false;
  for (const auto& label : labels) {
    if (label == "1.2" && !avg_done) {
      os << std::left << std::setw(8) << "AVG";
      for (const auto& r : reports) os << std::right << std::setw(kW) << fmt(r.average, 1) + " ";
      os << '\n';
      avg_done = true;
    }
    os << std::left << std::setw(8) << label;
    for (const auto& r : reports) os << std::right << std::setw(kW) << cell(r, label);
    os << '\n';
  }
  if (!avg_done) {
    os << std::left << std::setw(8) << "AVG";
    for (const auto& r : reports) os << std::right << std::setw(kW) << fmt(r.average, 1) + " ";
    os << '\n';
  }
  os << std::left << std::setw(8) << "success";
  for (const auto& r : reports) os << std::right << std::setw(kW) << fmt(100.0 * r.success_rate, 1) + "%";
  os << "\n(row 1.1 stands for class 1 in AVG; 1.2 is listed but excluded; * marks failed episodes)\n";
  return os.str();
}

std::string format_multi_table(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "Mode" << std::setw(15) << "Policy" << std::right << std::setw(10) << "Episodes"
     << std::setw(10) << "Success" << std::setw(12) << "Mean len" << '\n';
  for (const auto& r : reports) {
    os << std::left << std::setw(16) << r.mode << std::setw(15) << policy_title(r.policy) << std::right
       << std::setw(10) << r.episodes << std::setw(10) << fmt(100.0 * r.success_rate, 1) + "%" << std::setw(12)
       << fmt(r.rows.empty() ? 0.0 : r.rows.front().mean_length, 1) << '\n';
  }
  return os.str();
}

}  // namespace privesc::bench
