#include "privesc/bench/policies.hpp"

#include <algorithm>

namespace privesc::bench {

using winsim::Action;
using winsim::Artifact;

std::string_view policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Oracle: return "oracle";
    case PolicyKind::Expert: return "expert";
    case PolicyKind::DeterministicRL: return "det-rl";
    case PolicyKind::StochasticRL: return "stoch-rl";
    case PolicyKind::Random: return "random";
  }
  return "?";
}

std::string_view policy_title(PolicyKind k) {
  switch (k) {
    case PolicyKind::Oracle: return "Oracle";
    case PolicyKind::Expert: return "Expert";
    case PolicyKind::DeterministicRL: return "Deterministic";
    case PolicyKind::StochasticRL: return "Stochastic";
    case PolicyKind::Random: return "Random";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view s) {
  for (PolicyKind k : kAllPolicies) {
    if (s == policy_name(k)) return k;
  }
  return std::nullopt;
}

bool needs_network(PolicyKind k) { return k == PolicyKind::DeterministicRL || k == PolicyKind::StochasticRL; }

const std::vector<Action>& oracle_policy(winsim::Vuln v) { return winsim::oracle_sequence(v); }

namespace {

constexpr Action kCreate[] = {Action::CreateExe, Action::CreateServiceExe, Action::CompileDll, Action::CreateMsi};
constexpr Action kDownload[] = {Action::DownloadExe, Action::DownloadServiceExe, Action::DownloadDll,
                                Action::DownloadMsi};

bool is(Trit t) { return t == Trit::True; }
bool unknown(Trit t) { return t == Trit::Unknown; }

/// Create, download, then fire.
Action staged(const state::AgentState& s, Artifact a, Action exploit) {
  const int i = static_cast<int>(a);
  if (!s.flags[static_cast<std::size_t>(state::kCreatedExe + i)]) return kCreate[i];
  if (!s.flags[static_cast<std::size_t>(state::kDownloadedExe + i)]) return kDownload[i];
  return exploit;
}

template <typename Pred>
bool any_service(const state::AgentState& s, Pred p) {
  return std::any_of(s.services.begin(), s.services.end(), [&](const state::ServiceState& x) {
    return !x.is_command && !is(x.attrs[state::kSvcExploited]) && is(x.attrs[state::kSvcElevated]) && p(x);
  });
}

}  // namespace

std::vector<Action> expert_candidates(const state::AgentState& s) {
  using namespace state;
  std::vector<Action> c;
  const auto& aux = s.aux;

  if (!aux.pending_start.empty()) c.push_back(Action::StartExploitedService);

  bool untested = false;
  for (const auto& cr : aux.credentials) {
    if (!cr.tested && !cr.password.empty()) untested = true;
  }
  if (untested) c.push_back(aux.users_known ? Action::TestCredentials : Action::ListUsers);
  if (s.flags[kBase64Pending]) c.push_back(Action::DecodeBase64Credentials);

  if (is(s.general[kInstallElevatedSet])) c.push_back(staged(s, Artifact::Msi, Action::InstallMsi));
  if (any_service(s, [](const ServiceState& x) { return is(x.attrs[kSvcReconfigurable]); })) {
    c.push_back(Action::ReconfigureServiceAddAdmin);
  }
  if (any_service(s, [](const ServiceState& x) { return is(x.attrs[kSvcRegistryModifiable]); })) {
    c.push_back(Action::RegistryServiceAddAdmin);
  }
  if (any_service(s, [](const ServiceState& x) { return is(x.attrs[kSvcExeWritable]); })) {
    c.push_back(staged(s, Artifact::ServiceExe, Action::OverwriteServiceBinary));
  }
  if (any_service(s, [](const ServiceState& x) {
        return is(x.attrs[kSvcUnquoted]) && is(x.attrs[kSvcWhitespace]) && is(x.attrs[kSvcWritableParent]);
      })) {
    c.push_back(staged(s, Artifact::ServiceExe, Action::PlantUnquotedPathExe));
  }
  const bool path_writable = is(s.general[kWritablePathFolder]);
  if (any_service(s, [](const ServiceState& x) {
        return std::any_of(x.dlls.begin(), x.dlls.end(), [](const DllState& d) {
          return is(d.attrs[kDllWritable]) && !is(d.attrs[kDllReplaced]);
        });
      })) {
    c.push_back(staged(s, Artifact::Dll, Action::OverwriteDll));
  }
  if (path_writable && any_service(s, [](const ServiceState& x) {
        return std::any_of(x.dlls.begin(), x.dlls.end(), [](const DllState& d) {
          return is(d.attrs[kDllMissing]) && !is(d.attrs[kDllReplaced]);
        });
      })) {
    c.push_back(staged(s, Artifact::Dll, Action::PlantMissingDll));
  }
  if (std::any_of(s.autoruns.begin(), s.autoruns.end(),
                  [](const AutoRunState& a) { return !a.overwritten && is(a.attrs[kArWritable]); })) {
    c.push_back(staged(s, Artifact::Exe, Action::OverwriteAutoRun));
  }
  if (std::any_of(s.tasks.begin(), s.tasks.end(), [](const TaskState& t) {
        return !t.overwritten && is(t.attrs[kTaskElevated]) && is(t.attrs[kTaskExeWritable]);
      })) {
    c.push_back(staged(s, Artifact::Exe, Action::OverwriteTaskBinary));
  }

  const bool user = s.flags[kKnowsCurrentUser];
  if (unknown(s.general[kCredsInRegistry])) c.push_back(Action::CheckWinlogon);
  if (!user) c.push_back(Action::GetCurrentUser);
  if (!s.flags[kKnowsServices]) c.push_back(Action::ListServices);
  const bool unchecked_cfg = std::any_of(s.services.begin(), s.services.end(),
                                         [](const ServiceState& x) { return unknown(x.attrs[kSvcReconfigurable]); });
  const bool unchecked_reg = std::any_of(s.services.begin(), s.services.end(), [](const ServiceState& x) {
    return unknown(x.attrs[kSvcRegistryModifiable]);
  });
  if (s.flags[kFoldersPending]) c.push_back(Action::CheckDirectoryPermissions);
  if (s.flags[kExecutablesPending]) c.push_back(Action::CheckExecutablePermissions);
  if (unchecked_cfg) c.push_back(Action::CheckServicePermissions);
  if (unchecked_reg) c.push_back(Action::CheckServiceRegistryAcl);
  if (unknown(s.general[kInstallElevatedSet])) c.push_back(Action::CheckInstallElevated);
  if (!s.flags[kKnowsAutoRuns]) c.push_back(Action::ListAutoRuns);
  if (!s.flags[kKnowsTasks]) c.push_back(Action::ListScheduledTasks);
  if (!s.flags[kDllsAnalyzed]) c.push_back(Action::AnalyzeServiceDlls);
  if (!s.flags[kDllsSearched]) c.push_back(Action::SearchDlls);
  if (!s.flags[kKnowsPath]) c.push_back(Action::GetWindowsPath);
  if (unknown(s.general[kCredsInFiles])) c.push_back(Action::SearchUnattendFiles);
  if (!s.flags[kKnowsUsers]) c.push_back(Action::ListUsers);
  return c;
}

Action expert_policy(const state::AgentState& s) {
  const auto c = expert_candidates(s);
  return c.empty() ? Action::GetCurrentUser : c.front();
}

Action random_policy(Rng& rng) { return winsim::action_at(uniform_int(rng, 0, winsim::kNumActions - 1)); }

Agent::Agent(PolicyKind kind, const net::PolicyValueNet* net, const winsim::SimHost& host, std::uint64_t action_seed)
    : kind_(kind), net_(net), rng_(action_seed) {
  if (needs_network(kind) && !net) throw std::invalid_argument("policy needs a trained network");
  if (kind == PolicyKind::Oracle) {
    if (host.injected.empty()) throw std::invalid_argument("oracle needs a host with a known vulnerability");
    script_ = oracle_policy(host.injected.front());
  }
}

std::optional<Action> Agent::act(const state::AgentState& s) {
  switch (kind_) {
    case PolicyKind::Oracle:
      if (cursor_ >= script_.size()) return std::nullopt;
      return script_[cursor_++];
    case PolicyKind::Random:
      return random_policy(rng_);
    case PolicyKind::DeterministicRL:
      return net::greedy_action(net_->forward(state::encode(s), ws_));
    case PolicyKind::StochasticRL:
      return net::sample_action(net_->forward(state::encode(s), ws_), rng_);
    case PolicyKind::Expert:
      break;
  }

  if (last_state_ && *last_state_ == s) {
    stalled_.push_back(*last_action_);
  } else {
    stalled_.clear();
  }
  Action pick = Action::GetCurrentUser;
  bool found = false;
  for (Action a : expert_candidates(s)) {
    if (std::find(stalled_.begin(), stalled_.end(), a) == stalled_.end()) {
      pick = a;
      found = true;
      break;
    }
  }
  if (!found) pick = random_policy(rng_);
  last_state_ = s;
  last_action_ = pick;
  return pick;
}

}  // namespace privesc::bench
