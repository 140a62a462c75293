#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "privesc/io/artifacts.hpp"
#include "privesc/io/run_config.hpp"
#include "privesc/winsim/env.hpp"

using namespace privesc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(PRIVESC_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::vector<json> out;
  std::ifstream f(p);
  std::string line;
  while (std::getline(f, line)) out.push_back(json::parse(line));
  return out;
}

// One short training run shared by the checkpoint-dependent cases.
const fs::path& smoke_run() {
  static const fs::path dir = [] {
    const fs::path d = fs::current_path() / "cli_smoke";
    fs::remove_all(d);
    const Run r = cli("train --episodes 500 --seed 3 -q -o " + d.string());
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("eval --policy det-rl").code == 2);
  CHECK(cli("eval --policy det-rl --checkpoint no/such/file.pvn").code == 2);
  CHECK(cli("eval --policy nonsense").code == 2);
  CHECK(cli("train --episodes 5 --set env.services=[0,0] -o cli_bad").code == 2);
  CHECK(cli("train --set train.bogus=1 -o cli_bad").code == 2);
  CHECK(cli("train -c does-not-exist.json").code == 2);
  CHECK(cli("inspect --vuln 42").code == 2);
}

TEST_CASE("inspect is stable and reflects the vulnerability") {
  const Run a = cli("inspect --seed 11 --vuln 9");
  const Run b = cli("inspect --seed 11 --vuln 9");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("9 (") != std::string::npos);
  const Run j = cli("inspect --seed 11 --vuln 4 --json");
  REQUIRE(j.code == 0);
  const json h = json::parse(j.out);
  CHECK(h.at("vulns") == json::array({"4"}));
  CHECK(h.at("seed") == 11);
  CHECK(h.at("services").is_array());
}

TEST_CASE("oracle evaluation prints the reference column") {
  const fs::path out = fs::current_path() / "cli_oracle.json";
  const Run r = cli("eval --policy oracle --samples 5 --json " + out.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Oracle") != std::string::npos);
  CHECK(r.out.find("5.9") != std::string::npos);
  const json j = json::parse(slurp(out));
  CHECK(j.contains("config"));
  const json& rep = j.at("reports").at(0);
  std::map<std::string, double> means;
  for (const auto& row : rep.at("rows")) means[row.at("vuln")] = row.at("mean_length");
  const std::map<std::string, double> expected = {{"1.1", 10}, {"2", 5},  {"3", 7},  {"4", 5},
                                                  {"5", 7},    {"6", 7},  {"7", 6},  {"8", 5},
                                                  {"9", 3},    {"10", 4}, {"11", 6}, {"12", 6}};
  for (const auto& [label, len] : expected) CHECK(means.at(label) == len);
}

TEST_CASE("random evaluation over 1000 samples lands in the band") {
  const fs::path out = fs::current_path() / "cli_random.json";
  const Run r = cli("eval --policy random --samples 1000 --json " + out.string());
  REQUIRE(r.code == 0);
  const double avg = json::parse(slurp(out)).at("reports").at(0).at("average");
  MESSAGE("random average " << avg);
  CHECK(avg >= 80);
  CHECK(avg <= 400);
}

TEST_CASE("training smoke run writes artifacts") {
  const fs::path& d = smoke_run();
  CHECK(fs::is_regular_file(d / "final.pvn"));
  CHECK(fs::is_regular_file(d / "checkpoints" / "episode_500.pvn"));
  const json cfg = json::parse(slurp(d / "config.json"));
  CHECK(cfg.at("train").at("episodes") == 500);
  CHECK(cfg.at("train").at("seed") == 3);
  std::istringstream csv(slurp(d / "metrics.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "episode,length,reward,avg100_length,avg100_reward");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 500);
  const Run e = cli("eval --policy det-rl --samples 2 --vulns 9,2 --checkpoint " + (d / "final.pvn").string());
  CHECK(e.code == 0);
  CHECK(e.out.find("Deterministic") != std::string::npos);
}

TEST_CASE("training with the same seed repeats its metrics") {
  const fs::path a = fs::current_path() / "cli_rep_a";
  const fs::path b = fs::current_path() / "cli_rep_b";
  REQUIRE(cli("train --episodes 200 --seed 7 -q -o " + a.string()).code == 0);
  REQUIRE(cli("train --episodes 200 --seed 7 -q -o " + b.string()).code == 0);
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
  CHECK(io::load_network(a / "final.pvn").net.params() == io::load_network(b / "final.pvn").net.params());
}

TEST_CASE("training with validation keeps the selected parameters") {
  const fs::path d = fs::current_path() / "cli_select";
  fs::remove_all(d);
  REQUIRE(cli("train --episodes 200 --seed 4 -q -o " + d.string() +
              " --set train.select_every=100 train.select_after=100 train.select_hosts=4 train.checkpoint_every=100")
              .code == 0);
  std::istringstream csv(slurp(d / "validation.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "episode,successes,hosts,mean_length");
  std::set<std::int64_t> episodes;
  while (std::getline(csv, line)) episodes.insert(std::stoll(line.substr(0, line.find(','))));
  CHECK(episodes == std::set<std::int64_t>{100, 200});
  const auto final_net = io::load_network(d / "final.pvn");
  REQUIRE(episodes.count(final_net.episode) == 1);
  const auto snapshot = io::load_network(d / "checkpoints" / ("episode_" + std::to_string(final_net.episode) + ".pvn"));
  CHECK(final_net.net.params() == snapshot.net.params());
}

TEST_CASE("traces are schema-valid, labeled and replayable") {
  const fs::path ck = smoke_run() / "final.pvn";
  const fs::path out = fs::current_path() / "cli_trace.jsonl";
  REQUIRE(cli("trace -n 100 --seed 5 --checkpoint " + ck.string() + " -o " + out.string()).code == 0);
  const auto lines = read_jsonl(out);
  REQUIRE(lines.size() > 100);
  const json& header = lines.front();
  CHECK(header.at("type") == "header");
  CHECK(header.at("schema") == 1);
  const io::RunConfig cfg = io::run_config_from_json(header.at("config"));

  std::map<int, std::vector<json>> episodes;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const json& s = lines[i];
    CHECK(s.at("type") == "step");
    for (const char* key : {"schema", "episode", "host_seed", "step", "action_id", "action", "facts", "reward",
                            "done", "vulns"}) {
      CHECK_MESSAGE(s.contains(key), key);
    }
    episodes[s.at("episode").get<int>()].push_back(s);
  }
  CHECK(episodes.size() == 100);

  for (const auto& [ep, steps] : episodes) {
    winsim::Env env(steps.front().at("host_seed").get<std::uint64_t>(), cfg.env);
    json labels = json::array();
    for (auto v : env.host().injected) labels.push_back(std::string(winsim::vuln_label(v)));
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const json& s = steps[i];
      CHECK(s.at("step") == static_cast<int>(i) + 1);
      CHECK(s.at("vulns") == labels);
      const auto a = winsim::parse_action(s.at("action").get<std::string>());
      REQUIRE(a.has_value());
      CHECK(winsim::number(*a) == s.at("action_id"));
      const auto r = env.step(*a);
      CHECK(r.reward == s.at("reward").get<double>());
      CHECK(r.done == s.at("done").get<bool>());
      CHECK(r.facts.size() == s.at("facts").size());
    }
    CHECK(env.done());
  }
}

TEST_CASE("stochastic traces for one vulnerability vary") {
  const fs::path ck = smoke_run() / "final.pvn";
  const fs::path out = fs::current_path() / "cli_trace9.jsonl";
  REQUIRE(cli("trace -n 20 --checkpoint " + ck.string() + " --set env.mode=fixed 'env.vulns=[\"9\"]' -o " +
              out.string())
              .code == 0);
  std::map<int, std::vector<int>> seqs;
  for (const auto& s : read_jsonl(out)) {
    if (s.at("type") != "step") continue;
    CHECK(s.at("vulns") == json::array({"9"}));
    seqs[s.at("episode").get<int>()].push_back(s.at("action_id").get<int>());
  }
  std::set<std::vector<int>> distinct;
  for (const auto& [_, seq] : seqs) distinct.insert(seq);
  CHECK(seqs.size() == 20);
  CHECK(distinct.size() > 1);
}
