#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privesc/state/agent_state.hpp"
#include "privesc/winsim/facts.hpp"
#include "privesc/winsim/host.hpp"

namespace privesc::winsim {

enum class SuccessPath : std::uint8_t {
  AdminGroup = 1,        // current user is a local administrator
  AdminCredentials = 2,  // verified credentials of an administrator
  ElevatedProgram = 3,   // payload planted where it runs elevated
};

std::string_view success_path_name(SuccessPath p);

struct KnownCredential {
  std::string user;
  std::string password;
  bool verified = false;
  bool operator==(const KnownCredential&) const = default;
};

/// Attacker-side state: payloads built on the attack box, payloads moved to
/// the host, credentials in hand, and what has been learned so far. The
/// knowledge is updated from emitted facts exactly like an agent's tracker and
/// is what action arguments are filled from.
struct AttackerContext {
  std::array<bool, kNumArtifacts> created{};
  std::array<bool, kNumArtifacts> downloaded{};
  std::vector<KnownCredential> known_credentials;
  std::string current_user;
  state::AgentState knowledge;
  bool operator==(const AttackerContext&) const = default;
};

struct StepResult {
  std::vector<Fact> facts;
  double reward = 0.0;
  bool done = false;
  int step_index = 0;  // steps taken so far, this one included
  std::optional<SuccessPath> success;
};

std::optional<SuccessPath> check_success(const SimHost& host, const AttackerContext& attacker);

/// One episode of the privilege-escalation POMDP.
class Env {
 public:
  Env() = default;
  Env(std::uint64_t seed, const EnvConfig& cfg) { reset(seed, cfg); }

  void reset(std::uint64_t seed, const EnvConfig& cfg);
  /// Starts an episode on a prepared host.
  void reset(SimHost host, int max_steps);

  /// Applies `a`. Unmet preconditions produce an ActionFailed fact, never an
  /// exception. Throws std::logic_error when called after the episode ended.
  StepResult step(Action a);

  const SimHost& host() const { return host_; }
  const AttackerContext& attacker() const { return attacker_; }
  int steps() const { return steps_; }
  int max_steps() const { return max_steps_; }
  bool done() const { return done_; }
  std::optional<SuccessPath> success() const { return success_; }

 private:
  SimHost host_;
  AttackerContext attacker_;
  int steps_ = 0;
  int max_steps_ = 1000;
  bool done_ = false;
  std::optional<SuccessPath> success_;
};

}  // namespace privesc::winsim
