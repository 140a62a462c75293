#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "privesc/bench/policies.hpp"
#include "privesc/winsim/env.hpp"

namespace privesc::bench {

struct StepEvent {
  int step = 0;  // 1-based
  winsim::Action action = winsim::Action::CreateExe;
  const std::vector<winsim::Fact>* facts = nullptr;
  double reward = 0.0;
  bool done = false;
};

using StepObserver = std::function<void(const StepEvent&)>;

struct EpisodeLog {
  std::int64_t id = 0;
  std::vector<winsim::Vuln> vulns;
  std::uint64_t host_seed = 0;
  std::uint64_t action_seed = 0;
  int length = 0;
  bool success = false;
  double reward = 0.0;
  std::optional<winsim::SuccessPath> path;
  std::vector<winsim::Action> actions;  // filled when requested
  bool operator==(const EpisodeLog&) const = default;
};

/// Plays `kind` on `host` with a fresh tracker until the episode ends.
EpisodeLog run_episode(PolicyKind kind, const net::PolicyValueNet* net, winsim::SimHost host, int max_steps,
                       std::uint64_t action_seed, bool record_actions = false, const StepObserver& observer = {});

/// One unit of evaluation work.
struct EvalTask {
  std::int64_t id = 0;
  winsim::EnvConfig env;
  std::uint64_t host_seed = 0;
  std::uint64_t action_seed = 0;
};

struct EvalOptions {
  PolicyKind policy = PolicyKind::Oracle;
  std::vector<winsim::Vuln> vulns{winsim::kAllVulns.begin(), winsim::kAllVulns.end()};
  int samples = 100;  // episodes per vulnerability (or per multi-vuln mode)
  std::uint64_t seed = 1;
  winsim::EnvConfig env;
  bool record_actions = false;
  bool parallel = true;
};

std::vector<EvalTask> plan_single_vuln(const EvalOptions& opt);

std::vector<EpisodeLog> run_tasks_serial(const std::vector<EvalTask>& tasks, PolicyKind kind,
                                         const net::PolicyValueNet* net, bool record_actions = false);
/// OpenMP fan-out; identical output to the serial runner.
std::vector<EpisodeLog> run_tasks_parallel(const std::vector<EvalTask>& tasks, PolicyKind kind,
                                           const net::PolicyValueNet* net, bool record_actions = false);

struct VulnRow {
  std::string label;
  int episodes = 0;
  int successes = 0;
  double mean_length = 0.0;
  double success_rate = 0.0;
  bool in_table = false;  // counts toward the overall average
};

struct EvalReport {
  PolicyKind policy = PolicyKind::Oracle;
  std::string mode = "single";
  std::vector<VulnRow> rows;
  double average = 0.0;  // mean over in_table rows of mean_length
  double success_rate = 0.0;
  int episodes = 0;
  nlohmann::json config;
  std::vector<EpisodeLog> logs;
};

/// Groups logs by vulnerability label; rows 1..12 use the missing-DLL variant
/// for class 1 and 1.2 is reported outside the average.
EvalReport aggregate(PolicyKind kind, std::string mode, std::vector<EpisodeLog> logs, nlohmann::json config);

EvalReport evaluate(const EvalOptions& opt, const net::PolicyValueNet* net);

enum class MultiMode : std::uint8_t { AllTwelve, RandomPairs, SixServiceVulns, FiftyServices };
inline constexpr std::array<MultiMode, 4> kAllMultiModes = {MultiMode::AllTwelve, MultiMode::RandomPairs,
                                                            MultiMode::SixServiceVulns, MultiMode::FiftyServices};
std::string_view multi_mode_name(MultiMode m);
std::optional<MultiMode> parse_multi_mode(std::string_view s);

std::vector<EvalTask> plan_multi_vuln(MultiMode mode, const EvalOptions& opt);
EvalReport multi_vuln_eval(MultiMode mode, const EvalOptions& opt, const net::PolicyValueNet* net);

nlohmann::json to_json(const EpisodeLog& log);
nlohmann::json to_json(const EvalReport& r);
void write_jsonl(std::ostream& os, const EvalReport& r);

/// Side-by-side table, one column per report.
std::string format_table(const std::vector<EvalReport>& reports);
std::string format_multi_table(const std::vector<EvalReport>& reports);

}  // namespace privesc::bench
