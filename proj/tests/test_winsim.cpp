#include <doctest.h>

#include <algorithm>
#include <set>

#include "privesc/core/base64.hpp"
#include "privesc/core/rng.hpp"
#include "privesc/state/agent_state.hpp"
#include "privesc/winsim/env.hpp"
#include "privesc/winsim/vuln.hpp"
#include "privesc/winsim/winpath.hpp"
#include "support.hpp"

using namespace privesc;
using namespace privesc::winsim;
using privesc::testing::fixed_env;
using privesc::testing::multi_env;
using privesc::testing::replay;

namespace {

constexpr std::array<int, kNumVulnVariants> kOracleLengths = {10, 9, 5, 7, 5, 7, 7, 6, 5, 3, 4, 6, 6};

std::set<Action> exploit_subset(Vuln v) {
  std::set<Action> out;
  for (auto a : oracle_sequence(v)) {
    if (action_kind(a) == ActionKind::Exploit && a != Action::StartExploitedService &&
        a != Action::StopExploitedService) {
      out.insert(a);
    }
  }
  return out;
}

bool disjoint(const std::set<Action>& a, const std::set<Action>& b) {
  return std::none_of(a.begin(), a.end(), [&](Action x) { return b.count(x) > 0; });
}

}  // namespace

TEST_CASE("path helpers") {
  CHECK(winpath::equal("C:\\Program Files\\A", "c:\\program files\\a\\"));
  CHECK(winpath::parent("C:\\a\\b.exe") == "C:\\a");
  CHECK(winpath::filename("C:\\a\\b.exe") == "b.exe");
  CHECK(winpath::join("C:\\a", "b.dll") == "C:\\a\\b.dll");
  CHECK(winpath::is_drive_root("C:\\"));
  CHECK(winpath::is_drive_root("C:"));
  CHECK_FALSE(winpath::is_drive_root("C:\\x"));
  CHECK(winpath::in_windows_dir("C:\\Windows\\System32\\svchost.exe"));
  CHECK_FALSE(winpath::in_windows_dir("C:\\Program Files\\x.exe"));
  const auto cands = winpath::unquoted_candidates("C:\\Program Files\\My App\\svc.exe");
  REQUIRE(cands.size() == 2);
  CHECK(cands[0] == "C:\\Program.exe");
  CHECK(cands[1] == "C:\\Program Files\\My.exe");
  const auto ip = winpath::parse_image_path("\"C:\\x y\\a.exe\" -k netsvcs");
  CHECK(ip.quoted);
  CHECK(ip.exe == "C:\\x y\\a.exe");
  const auto anc = winpath::ancestors("C:\\a\\b\\c.exe");
  CHECK(anc == std::vector<std::string>{"C:\\a\\b", "C:\\a"});
}

TEST_CASE("filesystem ACLs are total") {
  FileSystem fs;
  fs.add_dir("C:\\Program Files\\App", system_acl());
  fs.add_file("C:\\Program Files\\App\\app.exe", user_writable_acl());
  const std::vector<std::string> user = {"alice", "Users", "Everyone"};
  CHECK(fs.is_dir("C:\\Program Files"));
  CHECK(fs.can_write_path("C:\\Program Files\\App\\app.exe", user));
  CHECK_FALSE(fs.can_write_path("C:\\Program Files\\App\\other.exe", user));
  CHECK_FALSE(fs.can_write("C:\\does\\not\\exist", user));
  CHECK(fs.write_file("C:\\Program Files\\App\\app.exe", user, Content::MaliciousExe));
  CHECK(fs.find("c:\\program files\\app\\APP.EXE")->content == Content::MaliciousExe);
  Acl empty;
  CHECK(empty.access("nobody") == 0);
}

TEST_CASE("host generation is deterministic in seed and config") {
  EnvConfig cfg;
  for (std::uint64_t s = 0; s < 20; ++s) {
    CHECK(generate_host(s, cfg) == generate_host(s, cfg));
    Env a(s, cfg), b(s, cfg);
    CHECK(a.host() == b.host());
  }
  CHECK_FALSE(generate_host(1, cfg) == generate_host(2, cfg));
}

TEST_CASE("generated hosts respect configured ranges and resolve their paths") {
  EnvConfig cfg;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const SimHost h = generate_host(s, cfg);
    CHECK(h.injected.size() == 1);
    CHECK((h.services.size() >= 1 && h.services.size() <= 20 + 1));
    CHECK(h.autoruns.size() <= 10 + 1);
    CHECK(h.tasks.size() <= 10 + 1);
    const bool missing_vuln = h.injected[0] == Vuln::MissingServiceBinary;
    const bool missing_decoy = std::find(h.decoys.begin(), h.decoys.end(), Decoy::NonElevatedVulnerableService) !=
                               h.decoys.end();
    for (const auto& svc : h.services) {
      const auto ip = winpath::parse_image_path(svc.image_path);
      if (ip.is_command || h.fs.is_file(ip.exe)) continue;
      CHECK_MESSAGE((missing_vuln || (missing_decoy && !svc.elevated)), svc.image_path);
      CHECK(h.fs.is_dir(winpath::parent(ip.exe)));
    }
    for (const auto& t : h.tasks) CHECK(h.fs.is_file(t.exe_path));
    for (const auto& ar : h.autoruns) CHECK(h.fs.exists(ar.path));
  }
}

TEST_CASE("fixed vuln 9 stores admin credentials in Winlogon") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SimHost h = generate_host(s, fixed_env(Vuln::WinlogonCredentials));
    REQUIRE(h.registry.winlogon_user.has_value());
    REQUIRE(h.registry.winlogon_password.has_value());
    CHECK(h.is_admin(*h.registry.winlogon_user));
    CHECK(h.find_user(*h.registry.winlogon_user)->password == *h.registry.winlogon_password);
  }
}

TEST_CASE("vuln 9 walkthrough") {
  Env env(4, fixed_env(Vuln::WinlogonCredentials));
  auto r1 = env.step(Action::CheckWinlogon);
  REQUIRE(r1.facts.size() == 1);
  CHECK(std::holds_alternative<WinlogonCreds>(r1.facts[0]));
  CHECK(r1.reward == 0.0);
  auto r2 = env.step(Action::ListUsers);
  CHECK(std::holds_alternative<UserList>(r2.facts.at(0)));
  auto r3 = env.step(Action::TestCredentials);
  REQUIRE(std::holds_alternative<CredTestResult>(r3.facts.at(0)));
  CHECK(std::get<CredTestResult>(r3.facts[0]).valid);
  CHECK(r3.reward == 1.0);
  CHECK(r3.done);
  CHECK(r3.success == SuccessPath::AdminCredentials);
  CHECK_THROWS_AS(env.step(Action::ListUsers), std::logic_error);
}

TEST_CASE("unmet preconditions fail without reward") {
  Env env(1, EnvConfig{});
  CHECK_FALSE(check_success(env.host(), env.attacker()).has_value());
  const auto r = env.step(Action::StartExploitedService);
  REQUIRE(r.facts.size() == 1);
  CHECK(std::holds_alternative<ActionFailed>(r.facts[0]));
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);
}

TEST_CASE("episode ends at the step limit") {
  Env env(1, EnvConfig{});
  StepResult r;
  for (int i = 0; i < 1000; ++i) {
    REQUIRE_FALSE(env.done());
    r = env.step(Action::StartExploitedService);
    CHECK(r.reward == 0.0);
  }
  CHECK(r.done);
  CHECK(r.step_index == 1000);
  CHECK(env.steps() == 1000);
  CHECK_FALSE(env.success().has_value());
}

TEST_CASE("reconfigurable service grants the admin-group path") {
  Env env(9, fixed_env(Vuln::ReconfigurableService));
  const auto& seq = oracle_sequence(Vuln::ReconfigurableService);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) env.step(seq[i]);
  CHECK_FALSE(env.done());
  const auto r = env.step(seq.back());
  CHECK(r.success == SuccessPath::AdminGroup);
}

TEST_CASE("autorun overwrite succeeds at the overwrite") {
  Env env(2, fixed_env(Vuln::WritableAutoRunExe));
  const auto& seq = oracle_sequence(Vuln::WritableAutoRunExe);
  CHECK(seq.back() == Action::OverwriteAutoRun);
  const auto r = replay(env, seq);
  CHECK(r.done);
  CHECK(env.success() == SuccessPath::ElevatedProgram);
}

TEST_CASE("oracle replay solves every vulnerability in exactly its sequence length") {
  for (int vi = 0; vi < kNumVulnVariants; ++vi) {
    const Vuln v = kAllVulns[vi];
    CHECK(static_cast<int>(oracle_sequence(v).size()) == kOracleLengths[vi]);
    for (std::uint64_t s = 0; s < 100; ++s) {
      Env env(s, fixed_env(v));
      const auto r = replay(env, oracle_sequence(v));
      CHECK_MESSAGE(r.done, vuln_label(v), " seed ", s);
      CHECK(r.reward == 1.0);
      CHECK(r.rewarded_steps == 1);
      CHECK(r.steps == kOracleLengths[vi]);
    }
  }
}

TEST_CASE("exploit sequences of unrelated vulnerabilities do not pay out") {
  for (auto v : kAllVulns) {
    for (auto w : kAllVulns) {
      if (v == w || !disjoint(exploit_subset(v), exploit_subset(w))) continue;
      for (std::uint64_t s = 0; s < 20; ++s) {
        Env env(s, fixed_env(v));
        const auto r = replay(env, oracle_sequence(w));
        CHECK_MESSAGE(r.reward == 0.0, "host ", vuln_label(v), " sequence ", vuln_label(w), " seed ", s);
      }
    }
  }
}

TEST_CASE("fifty-service hosts stay solvable") {
  for (auto v : kAllVulns) {
    EnvConfig cfg = fixed_env(v);
    cfg.services = {50, 50};
    for (std::uint64_t s = 0; s < 10; ++s) {
      Env env(s, cfg);
      CHECK(env.host().services.size() >= 50);
      CHECK(replay(env, oracle_sequence(v)).reward == 1.0);
    }
  }
}

TEST_CASE("multi mode injects every requested vulnerability") {
  std::vector<Vuln> all(kTableRowVulns.begin(), kTableRowVulns.end());
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SimHost h = generate_host(s, multi_env(all));
    CHECK(h.injected.size() == 12);
    for (auto v : all) {
      Env env;
      env.reset(h, 1000);
      CHECK_MESSAGE(replay(env, oracle_sequence(v)).reward == 1.0, vuln_label(v));
    }
  }
}

TEST_CASE("identical action streams give identical facts and rewards") {
  Rng pick(17);
  std::vector<Action> actions;
  for (int i = 0; i < 400; ++i) actions.push_back(action_at(uniform_int(pick, 0, kNumActions - 1)));
  for (std::uint64_t s = 0; s < 10; ++s) {
    Env a(s, EnvConfig{}), b(s, EnvConfig{});
    for (auto act : actions) {
      if (a.done()) break;
      const auto ra = a.step(act);
      const auto rb = b.step(act);
      CHECK(ra.facts == rb.facts);
      CHECK(ra.reward == rb.reward);
    }
  }
}

namespace {

void check_fact(const Fact& f, const SimHost& h, const state::AgentState& known) {
  const auto tok = h.current_token();
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ServiceList>) {
          REQUIRE(x.entries.size() == h.services.size());
          for (std::size_t i = 0; i < x.entries.size(); ++i) {
            const ServiceRec* s = h.find_service(x.entries[i].name);
            REQUIRE(s != nullptr);
            CHECK(s->image_path == x.entries[i].image_path);
            CHECK(s->run_as == x.entries[i].run_as);
          }
        } else if constexpr (std::is_same_v<T, TaskList>) {
          CHECK(x.entries.size() == h.tasks.size());
        } else if constexpr (std::is_same_v<T, AutoRunList>) {
          CHECK(x.entries.size() == h.autoruns.size());
        } else if constexpr (std::is_same_v<T, UserList>) {
          CHECK(x.users.size() == h.users.size());
          for (const auto& a : x.admins) CHECK(h.is_admin(a));
        } else if constexpr (std::is_same_v<T, CurrentUser>) {
          CHECK(x.name == h.current_user);
        } else if constexpr (std::is_same_v<T, WindowsPath>) {
          CHECK(x.dirs == h.path_dirs);
        } else if constexpr (std::is_same_v<T, DirAclResult>) {
          CHECK(x.writable == (h.fs.is_dir(x.path) && h.fs.can_write(x.path, tok)));
        } else if constexpr (std::is_same_v<T, FileAclResult>) {
          CHECK(x.exists == h.fs.is_file(x.path));
          CHECK(x.writable == h.fs.can_write_path(x.path, tok));
        } else if constexpr (std::is_same_v<T, ServiceAclResult>) {
          REQUIRE(h.find_service(x.service) != nullptr);
          CHECK(x.reconfigurable == h.find_service(x.service)->reconfig_acl);
        } else if constexpr (std::is_same_v<T, RegistryAclResult>) {
          REQUIRE(h.find_service(x.service) != nullptr);
          CHECK(x.modifiable == h.find_service(x.service)->registry_acl);
        } else if constexpr (std::is_same_v<T, WinlogonCreds>) {
          CHECK(x.user == h.registry.winlogon_user);
          CHECK(x.password == h.registry.winlogon_password);
        } else if constexpr (std::is_same_v<T, InstallElevatedBits>) {
          CHECK(x.machine == h.registry.install_elevated_machine);
          CHECK(x.user == h.registry.install_elevated_user);
        } else if constexpr (std::is_same_v<T, UnattendFound>) {
          CHECK(x.files.size() == h.unattend_files.size());
          for (const auto& e : x.files) {
            const auto it = std::find_if(h.unattend_files.begin(), h.unattend_files.end(),
                                         [&](const UnattendFile& u) { return winpath::equal(u.path, e.path); });
            REQUIRE(it != h.unattend_files.end());
            CHECK(it->user == e.user);
            CHECK(it->password_base64 == e.password_base64);
          }
        } else if constexpr (std::is_same_v<T, DecodedCreds>) {
          const auto it = std::find_if(h.unattend_files.begin(), h.unattend_files.end(),
                                       [&](const UnattendFile& u) { return u.user == x.user; });
          REQUIRE(it != h.unattend_files.end());
          CHECK(base64_decode(it->password_base64) == x.password);
        } else if constexpr (std::is_same_v<T, CredTestResult>) {
          if (x.valid) {
            REQUIRE(h.find_user(x.user) != nullptr);
            CHECK(x.admin == h.is_admin(x.user));
          }
        } else if constexpr (std::is_same_v<T, DllScan>) {
          REQUIRE(h.find_service(x.service) != nullptr);
          CHECK(x.dlls == h.find_service(x.service)->dll_imports);
        } else if constexpr (std::is_same_v<T, DllSearch>) {
          const state::ServiceState* s = known.find_service(x.service);
          REQUIRE(s != nullptr);
          CHECK(x.path == h.resolve_dll(winpath::parent(s->exe), x.dll));
        }
      },
      f);
}

}  // namespace

TEST_CASE("facts never contradict the host") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    Env env(s, EnvConfig{});
    Rng pick(derive_seed(s, 99));
    int checked = 0;
    while (!env.done() && checked < 600) {
      const SimHost before = env.host();
      const state::AgentState known = env.attacker().knowledge;
      const Action a = action_at(uniform_int(pick, 0, kNumActions - 1));
      const auto r = env.step(a);
      for (const auto& f : r.facts) check_fact(f, before, known);
      CHECK(((r.reward == 0.0 && !r.success) || (r.reward == 1.0 && r.done)));
      ++checked;
    }
  }
}

TEST_CASE("config validation") {
  EnvConfig c;
  c.services = {0, 3};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = EnvConfig{};
  c.tasks = {5, 2};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = EnvConfig{};
  c.mode = VulnMode::Fixed;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = EnvConfig{};
  c.decoys.writable_path_folder = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_NOTHROW(EnvConfig{}.validate());
}

TEST_CASE("labels round trip") {
  for (auto v : kAllVulns) CHECK(parse_vuln(vuln_label(v)) == v);
  CHECK(vuln_class(Vuln::WritableDll) == 1);
  CHECK(vuln_class(Vuln::WritableStartupFolder) == 12);
  CHECK_FALSE(parse_vuln("13").has_value());
  for (int i = 0; i < kNumActions; ++i) {
    const Action a = action_at(i);
    CHECK(parse_action(action_name(a)) == a);
    CHECK(parse_action("A" + std::to_string(number(a))) == a);
  }
}
