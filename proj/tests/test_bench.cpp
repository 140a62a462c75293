#include <doctest.h>

#include <cmath>
#include <sstream>

#include "privesc/bench/evaluate.hpp"
#include "privesc/state/agent_state.hpp"
#include "support.hpp"

using namespace privesc;
using namespace privesc::bench;
using winsim::Action;
using winsim::Vuln;

TEST_CASE("oracle sequences") {
  using A = Action;
  CHECK(oracle_policy(Vuln::WinlogonCredentials) ==
        std::vector<A>{A::CheckWinlogon, A::ListUsers, A::TestCredentials});
  CHECK(oracle_policy(Vuln::ReconfigurableService) ==
        std::vector<A>{A::GetCurrentUser, A::ListServices, A::CheckServicePermissions,
                       A::ReconfigureServiceAddAdmin, A::StartExploitedService});
  CHECK(oracle_policy(Vuln::AlwaysInstallElevated).size() == 5);
  CHECK(oracle_policy(Vuln::AlwaysInstallElevated).back() == A::InstallMsi);
}

TEST_CASE("oracle evaluation reproduces the reference column") {
  EvalOptions opt;
  opt.samples = 20;
  const EvalReport r = evaluate(opt, nullptr);
  const double expected[] = {10, 5, 7, 5, 7, 7, 6, 5, 3, 4, 6, 6};
  int k = 0;
  for (const auto& row : r.rows) {
    if (!row.in_table) {
      CHECK(row.label == "1.2");
      CHECK(row.mean_length == 9.0);
      continue;
    }
    CHECK(row.mean_length == expected[k++]);
    CHECK(row.success_rate == 1.0);
  }
  CHECK(k == 12);
  CHECK(std::round(r.average * 10) / 10 == 5.9);
  CHECK(r.success_rate == 1.0);
  CHECK(r.episodes == 13 * 20);
}

TEST_CASE("expert solves vuln 9 in three actions") {
  EvalOptions opt;
  opt.policy = PolicyKind::Expert;
  opt.vulns = {Vuln::WinlogonCredentials};
  opt.samples = 30;
  const auto r = evaluate(opt, nullptr);
  CHECK(r.rows.at(0).mean_length == 3.0);
  CHECK(r.success_rate == 1.0);
  const auto s = state::init_state();
  CHECK(expert_policy(s) == Action::CheckWinlogon);
}

TEST_CASE("expert handles missing service binaries briefly") {
  EvalOptions opt;
  opt.policy = PolicyKind::Expert;
  opt.vulns = {Vuln::MissingServiceBinary};
  opt.samples = 50;
  const auto r = evaluate(opt, nullptr);
  CHECK(r.success_rate == 1.0);
  CHECK(r.rows.at(0).mean_length <= 10.0);
}

TEST_CASE("serial and parallel runners agree") {
  EvalOptions opt;
  opt.samples = 4;
  const auto tasks = plan_single_vuln(opt);
  CHECK(tasks.size() == 13 * 4);
  for (auto k : {PolicyKind::Expert, PolicyKind::Random}) {
    CHECK(run_tasks_serial(tasks, k, nullptr, true) == run_tasks_parallel(tasks, k, nullptr, true));
  }
  net::PolicyValueNet n;
  n.init(3);
  const std::vector<EvalTask> few(tasks.begin(), tasks.begin() + 6);
  CHECK(run_tasks_serial(few, PolicyKind::StochasticRL, &n, true) ==
        run_tasks_parallel(few, PolicyKind::StochasticRL, &n, true));
}

TEST_CASE("reports are reproducible from policy, seed and config") {
  EvalOptions opt;
  opt.policy = PolicyKind::Random;
  opt.samples = 3;
  opt.seed = 42;
  const auto a = evaluate(opt, nullptr);
  const auto b = evaluate(opt, nullptr);
  CHECK(to_json(a) == to_json(b));
  opt.seed = 43;
  CHECK_FALSE(to_json(evaluate(opt, nullptr)) == to_json(a));
  CHECK(to_json(a).contains("config"));
}

TEST_CASE("random policy is uniform and independent across steps") {
  EvalOptions opt;
  opt.policy = PolicyKind::Random;
  opt.samples = 8;
  opt.record_actions = true;
  const auto r = evaluate(opt, nullptr);
  std::array<double, winsim::kNumActions> counts{};
  std::array<std::array<double, 2>, 2> pairs{};
  double n = 0;
  for (const auto& log : r.logs) {
    for (std::size_t i = 0; i < log.actions.size(); ++i) {
      counts[winsim::index(log.actions[i])] += 1;
      n += 1;
      if (i > 0) {
        const int a = winsim::index(log.actions[i - 1]) < 19 ? 0 : 1;
        const int b = winsim::index(log.actions[i]) < 19 ? 0 : 1;
        pairs[a][b] += 1;
      }
    }
  }
  REQUIRE(n > 5000);
  double chi = 0;
  for (double c : counts) chi += (c - n / 38) * (c - n / 38) / (n / 38);
  MESSAGE("chi-square (37 dof) " << chi);
  CHECK(chi < 69.3);  // p = 0.001
  const double tot = pairs[0][0] + pairs[0][1] + pairs[1][0] + pairs[1][1];
  double chi2 = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double e = (pairs[a][0] + pairs[a][1]) * (pairs[0][b] + pairs[1][b]) / tot;
      chi2 += (pairs[a][b] - e) * (pairs[a][b] - e) / e;
    }
  }
  MESSAGE("independence chi-square (1 dof) " << chi2);
  CHECK(chi2 < 10.83);  // p = 0.001
}

TEST_CASE("aggregate keeps 1.2 out of the average") {
  std::vector<EpisodeLog> logs;
  auto add = [&](Vuln v, int len, bool ok) {
    EpisodeLog l;
    l.vulns = {v};
    l.length = len;
    l.success = ok;
    logs.push_back(l);
  };
  add(Vuln::MissingDll, 10, true);
  add(Vuln::WritableDll, 100, true);
  add(Vuln::WinlogonCredentials, 3, true);
  add(Vuln::WinlogonCredentials, 5, false);
  const auto r = aggregate(PolicyKind::Expert, "single", logs, {});
  CHECK(r.average == doctest::Approx((10.0 + 4.0) / 2));
  CHECK(r.success_rate == doctest::Approx(0.75));
  const auto table = format_table({r});
  CHECK(table.find("AVG") != std::string::npos);
  CHECK(table.find("1.2") != std::string::npos);
  CHECK(table.find("Expert") != std::string::npos);
}

TEST_CASE("expert generalizes to multi-vulnerability hosts") {
  EvalOptions opt;
  opt.policy = PolicyKind::Expert;
  opt.samples = 30;
  for (auto m : kAllMultiModes) {
    const auto r = multi_vuln_eval(m, opt, nullptr);
    CHECK_MESSAGE(r.success_rate >= 0.95, multi_mode_name(m));
    CHECK(r.mode == multi_mode_name(m));
    CHECK(parse_multi_mode(multi_mode_name(m)) == m);
  }
  const auto pairs = plan_multi_vuln(MultiMode::RandomPairs, opt);
  for (const auto& t : pairs) CHECK(winsim::choose_vulns(t.host_seed, t.env).size() == 2);
  opt.policy = PolicyKind::Oracle;
  CHECK_THROWS(multi_vuln_eval(MultiMode::AllTwelve, opt, nullptr));
}

TEST_CASE("network policies require a network") {
  EvalOptions opt;
  opt.policy = PolicyKind::DeterministicRL;
  CHECK_THROWS(evaluate(opt, nullptr));
  for (auto k : kAllPolicies) CHECK(parse_policy(policy_name(k)) == k);
  CHECK(needs_network(PolicyKind::StochasticRL));
  CHECK_FALSE(needs_network(PolicyKind::Expert));
}

TEST_CASE("episode logs serialize") {
  EvalOptions opt;
  opt.samples = 1;
  opt.record_actions = true;
  const auto r = evaluate(opt, nullptr);
  std::ostringstream os;
  write_jsonl(os, r);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("length"));
    CHECK(j.contains("vulns"));
    CHECK(j.contains("actions"));
    ++lines;
  }
  CHECK(lines == 13);
}
