#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "privesc/core/rng.hpp"
#include "privesc/net/policy_value_net.hpp"
#include "privesc/state/agent_state.hpp"
#include "privesc/winsim/host.hpp"

namespace privesc::bench {

enum class PolicyKind : std::uint8_t { Oracle, Expert, DeterministicRL, StochasticRL, Random };

inline constexpr std::array<PolicyKind, 5> kAllPolicies = {PolicyKind::Oracle, PolicyKind::Expert,
                                                           PolicyKind::DeterministicRL, PolicyKind::StochasticRL,
                                                           PolicyKind::Random};

/// CLI names: oracle, expert, det-rl, stoch-rl, random.
std::string_view policy_name(PolicyKind k);
/// Column headers of the report table.
std::string_view policy_title(PolicyKind k);
std::optional<PolicyKind> parse_policy(std::string_view s);
bool needs_network(PolicyKind k);

/// The minimal exploit sequence for `v`, played with full knowledge.
const std::vector<winsim::Action>& oracle_policy(winsim::Vuln v);

/// Expert rule cascade, highest priority first. Finishing moves for anything
/// already known to be exploitable come before information gathering.
std::vector<winsim::Action> expert_candidates(const state::AgentState& s);
winsim::Action expert_policy(const state::AgentState& s);

winsim::Action random_policy(Rng& rng);

/// Per-episode decision maker. Returns nullopt when the policy has nothing
/// left to play (only the oracle can run dry).
class Agent {
 public:
  Agent(PolicyKind kind, const net::PolicyValueNet* net, const winsim::SimHost& host, std::uint64_t action_seed);

  std::optional<winsim::Action> act(const state::AgentState& s);

 private:
  PolicyKind kind_;
  const net::PolicyValueNet* net_;
  Rng rng_;
  std::vector<winsim::Action> script_;
  std::size_t cursor_ = 0;
  net::NetWorkspace ws_;
  // Expert: actions that left the belief unchanged are skipped until it moves.
  std::optional<state::AgentState> last_state_;
  std::optional<winsim::Action> last_action_;
  std::vector<winsim::Action> stalled_;
};

}  // namespace privesc::bench
