#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "privesc/a2c/trainer.hpp"
#include "privesc/bench/evaluate.hpp"
#include "privesc/io/artifacts.hpp"
#include "privesc/io/run_config.hpp"
#include "privesc/io/serialize.hpp"
#include "privesc/nn/checkpoint.hpp"

namespace fs = std::filesystem;
using namespace privesc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kTraceSchema = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
};

io::RunConfig resolve(const Common& c, std::vector<std::string> extra) {
  io::RunConfig cfg = c.config_path.empty() ? io::RunConfig{} : io::load_run_config(c.config_path);
  std::vector<std::string> all = c.overrides;
  all.insert(all.end(), extra.begin(), extra.end());
  return all.empty() ? cfg : io::apply_overrides(cfg, all);
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "JSON run config");
  app->add_option("--set", c.overrides, "Override a config key, e.g. --set train.lr=5e-4")->take_all();
}

std::vector<winsim::Vuln> parse_vuln_list(const std::string& text) {
  std::vector<winsim::Vuln> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = winsim::parse_vuln(item);
    if (!v) throw UsageError("unknown vulnerability label: " + item);
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError("empty vulnerability list");
  return out;
}

io::LoadedNetwork load_checkpoint_or_usage(const std::string& path) {
  if (path.empty()) throw UsageError("this policy needs --checkpoint");
  if (!fs::is_regular_file(path)) throw UsageError("checkpoint not found: " + path);
  return io::load_network(path);
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  Common common;
  std::optional<std::int64_t> episodes;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a) {
  std::vector<std::string> extra;
  if (a.episodes) extra.push_back("train.episodes=" + std::to_string(*a.episodes));
  if (a.seed) extra.push_back("train.seed=" + std::to_string(*a.seed));
  if (!a.out.empty()) extra.push_back("out_dir=" + nlohmann::json(a.out).dump());
  const io::RunConfig cfg = resolve(a.common, extra);

  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir / "checkpoints");
  open_out(dir / "config.json") << to_json(cfg).dump(2) << '\n';
  std::ofstream csv = open_out(dir / "metrics.csv");

  a2c::TrainHooks hooks;
  hooks.metrics_csv = &csv;
  hooks.progress = a.quiet ? nullptr : &std::cerr;
  hooks.checkpoint = [&](std::int64_t ep, const net::PolicyValueNet& n) {
    const fs::path p = dir / "checkpoints" / ("episode_" + std::to_string(ep) + ".pvn");
    io::save_network(p, n, cfg, ep);
  };
  const auto res = a2c::train(cfg.train, cfg.env, cfg.net, hooks);
  io::save_network(dir / "final.pvn", res.net, cfg, res.selected_episode);
  if (!res.validation.empty()) {
    std::ofstream v = open_out(dir / "validation.csv");
    v << "episode,successes,hosts,mean_length\n";
    for (const auto& p : res.validation) v << p.episode << ',' << p.successes << ',' << p.hosts << ',' << p.mean_length << '\n';
  }
  const auto& eps = res.metrics.episodes;
  std::cout << "trained " << eps.size() << " episodes in " << res.metrics.wall_seconds << " s";
  if (!eps.empty()) std::cout << "; final avg100_length " << eps.back().avg100_length;
  if (!res.validation.empty()) std::cout << "; kept parameters from episode " << res.selected_episode;
  std::cout << "\ncheckpoint: " << (dir / "final.pvn").string() << "\nmetrics: " << (dir / "metrics.csv").string()
            << '\n';
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  Common common;
  std::string policy;
  std::string checkpoint;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::string vulns;
  std::string multi;
  std::string json_out;
  std::string jsonl_out;
  bool serial = false;
};

int cmd_eval(const EvalArgs& a) {
  std::vector<std::string> extra;
  if (!a.policy.empty()) extra.push_back("eval.policy=" + nlohmann::json(a.policy).dump());
  if (a.samples) extra.push_back("eval.samples=" + std::to_string(*a.samples));
  if (a.seed) extra.push_back("eval.seed=" + std::to_string(*a.seed));
  if (!a.multi.empty()) extra.push_back("eval.multi=" + nlohmann::json(a.multi).dump());
  if (a.serial) extra.push_back("eval.parallel=false");
  const io::RunConfig cfg = resolve(a.common, extra);

  std::vector<bench::PolicyKind> kinds;
  if (cfg.eval.policy == "all") {
    for (auto k : bench::kAllPolicies) {
      if (!bench::needs_network(k) || !a.checkpoint.empty()) kinds.push_back(k);
    }
  } else {
    const auto k = bench::parse_policy(cfg.eval.policy);
    if (!k) throw UsageError("unknown policy: " + cfg.eval.policy);
    kinds.push_back(*k);
  }

  std::optional<io::LoadedNetwork> loaded;
  for (auto k : kinds) {
    if (bench::needs_network(k) && !loaded) loaded = load_checkpoint_or_usage(a.checkpoint);
  }
  const net::PolicyValueNet* net = loaded ? &loaded->net : nullptr;

  bench::EvalOptions opt;
  opt.samples = cfg.eval.samples;
  opt.seed = cfg.eval.seed;
  opt.env = cfg.env;
  opt.parallel = cfg.eval.parallel;
  if (!a.vulns.empty()) opt.vulns = parse_vuln_list(a.vulns);

  std::vector<bench::MultiMode> modes;
  if (cfg.eval.multi == "all") {
    modes.assign(bench::kAllMultiModes.begin(), bench::kAllMultiModes.end());
  } else if (!cfg.eval.multi.empty()) {
    const auto m = bench::parse_multi_mode(cfg.eval.multi);
    if (!m) throw UsageError("unknown multi-vulnerability mode: " + cfg.eval.multi);
    modes.push_back(*m);
  }

  std::vector<bench::EvalReport> reports;
  for (auto k : kinds) {
    opt.policy = k;
    if (modes.empty()) {
      reports.push_back(bench::evaluate(opt, net));
    } else {
      if (k == bench::PolicyKind::Oracle) continue;
      for (auto m : modes) reports.push_back(bench::multi_vuln_eval(m, opt, net));
    }
  }
  std::cout << (modes.empty() ? bench::format_table(reports) : bench::format_multi_table(reports));

  if (!a.json_out.empty()) {
    nlohmann::json j = {{"config", to_json(cfg)}, {"checkpoint", a.checkpoint}, {"reports", nlohmann::json::array()}};
    for (const auto& r : reports) j["reports"].push_back(bench::to_json(r));
    open_out(a.json_out) << j.dump(2) << '\n';
  }
  if (!a.jsonl_out.empty()) {
    std::ofstream f = open_out(a.jsonl_out);
    for (const auto& r : reports) bench::write_jsonl(f, r);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- trace

struct TraceArgs {
  Common common;
  std::string policy = "stoch-rl";
  std::string checkpoint;
  int episodes = 10;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_trace(const TraceArgs& a) {
  std::vector<std::string> extra;
  if (a.seed) extra.push_back("eval.seed=" + std::to_string(*a.seed));
  const io::RunConfig cfg = resolve(a.common, extra);
  if (a.episodes < 1) throw UsageError("--episodes must be positive");
  const auto kind = bench::parse_policy(a.policy);
  if (!kind) throw UsageError("unknown policy: " + a.policy);
  std::optional<io::LoadedNetwork> loaded;
  if (bench::needs_network(*kind)) loaded = load_checkpoint_or_usage(a.checkpoint);
  const net::PolicyValueNet* net = loaded ? &loaded->net : nullptr;

  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& os = a.out.empty() ? std::cout : file;

  os << nlohmann::json{{"type", "header"},
                       {"schema", kTraceSchema},
                       {"policy", a.policy},
                       {"checkpoint", a.checkpoint},
                       {"seed", cfg.eval.seed},
                       {"config", to_json(cfg)}}
            .dump()
     << '\n';
  for (int ep = 0; ep < a.episodes; ++ep) {
    const auto host_seed = derive_seed(cfg.eval.seed, 0x74726163, static_cast<std::uint64_t>(ep));
    const auto action_seed = derive_seed(cfg.eval.seed, 0x61637473, static_cast<std::uint64_t>(ep));
    winsim::SimHost host = winsim::generate_host(host_seed, cfg.env);
    nlohmann::json labels = nlohmann::json::array();
    for (auto v : host.injected) labels.push_back(std::string(winsim::vuln_label(v)));
    bench::run_episode(*kind, net, std::move(host), cfg.env.max_steps, action_seed, false,
                       [&](const bench::StepEvent& e) {
                         nlohmann::json facts = nlohmann::json::array();
                         for (const auto& f : *e.facts) facts.push_back(std::string(winsim::fact_kind(f)));
                         os << nlohmann::json{{"type", "step"},
                                              {"schema", kTraceSchema},
                                              {"episode", ep},
                                              {"host_seed", host_seed},
                                              {"step", e.step},
                                              {"action_id", winsim::number(e.action)},
                                              {"action", std::string(winsim::action_name(e.action))},
                                              {"facts", facts},
                                              {"reward", e.reward},
                                              {"done", e.done},
                                              {"vulns", labels}}
                                   .dump()
                            << '\n';
                       });
  }
  return kExitOk;
}

// -------------------------------------------------------------- inspect

struct InspectArgs {
  Common common;
  std::uint64_t seed = 1;
  std::string vuln;
  bool json = false;
};

int cmd_inspect(const InspectArgs& a) {
  io::RunConfig cfg = resolve(a.common, {});
  if (!a.vuln.empty()) {
    const auto v = winsim::parse_vuln(a.vuln);
    if (!v) throw UsageError("unknown vulnerability label: " + a.vuln);
    cfg.env.mode = winsim::VulnMode::Fixed;
    cfg.env.vulns = {*v};
  }
  const winsim::SimHost host = winsim::generate_host(a.seed, cfg.env);
  if (a.json) {
    nlohmann::json j = io::host_to_json(host);
    j["seed"] = a.seed;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "seed: " << a.seed << '\n' << io::format_host(host);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated Windows privilege-escalation RL toolkit"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train the policy/value network with A2C");
  add_common(t, train.common);
  t->add_option("--episodes", train.episodes, "Number of training episodes");
  t->add_option("--seed", train.seed, "Master seed");
  t->add_option("-o,--out", train.out, "Output directory");
  t->add_flag("-q,--quiet", train.quiet, "No progress lines");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate a policy on generated hosts");
  add_common(e, eval.common);
  e->add_option("-p,--policy", eval.policy, "oracle | expert | det-rl | stoch-rl | random | all");
  e->add_option("--checkpoint", eval.checkpoint, "Trained network (needed by det-rl and stoch-rl)");
  e->add_option("-n,--samples", eval.samples, "Episodes per vulnerability");
  e->add_option("--seed", eval.seed, "Evaluation seed");
  e->add_option("--vulns", eval.vulns, "Comma-separated labels, e.g. 1.1,2,9");
  e->add_option("--multi", eval.multi, "all-12 | random-pairs | six-service | 50-services | all");
  e->add_option("--json", eval.json_out, "Write the report as JSON");
  e->add_option("--jsonl", eval.jsonl_out, "Write per-episode records as JSONL");
  e->add_flag("--serial", eval.serial, "Disable the parallel episode fan-out");

  TraceArgs trace;
  auto* r = app.add_subcommand("trace", "Write labeled per-step attack traces as JSONL");
  add_common(r, trace.common);
  r->add_option("-p,--policy", trace.policy, "Policy generating the traces")->capture_default_str();
  r->add_option("--checkpoint", trace.checkpoint, "Trained network");
  r->add_option("-n,--episodes", trace.episodes, "Number of episodes")->capture_default_str();
  r->add_option("--seed", trace.seed, "Trace seed");
  r->add_option("-o,--out", trace.out, "Output file (stdout if omitted)");

  InspectArgs inspect;
  auto* i = app.add_subcommand("inspect", "Print a generated host");
  add_common(i, inspect.common);
  i->add_option("--seed", inspect.seed, "Host seed")->capture_default_str();
  i->add_option("--vuln", inspect.vuln, "Inject this vulnerability");
  i->add_flag("--json", inspect.json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitUsage;
  }

  try {
    if (t->parsed()) return cmd_train(train);
    if (e->parsed()) return cmd_eval(eval);
    if (r->parsed()) return cmd_trace(trace);
    if (i->parsed()) return cmd_inspect(inspect);
  } catch (const UsageError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const io::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
