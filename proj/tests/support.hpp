#pragma once

#include <vector>

#include "privesc/core/rng.hpp"
#include "privesc/winsim/env.hpp"
#include "privesc/winsim/host.hpp"

namespace privesc::testing {

inline winsim::EnvConfig fixed_env(winsim::Vuln v) {
  winsim::EnvConfig c;
  c.mode = winsim::VulnMode::Fixed;
  c.vulns = {v};
  return c;
}

inline winsim::EnvConfig multi_env(std::vector<winsim::Vuln> vs) {
  winsim::EnvConfig c;
  c.mode = winsim::VulnMode::Multi;
  c.vulns = std::move(vs);
  return c;
}

struct Replay {
  int steps = 0;
  double reward = 0.0;
  bool done = false;
  int rewarded_steps = 0;
};

inline Replay replay(winsim::Env& env, const std::vector<winsim::Action>& actions) {
  Replay r;
  for (auto a : actions) {
    if (env.done()) break;
    const auto res = env.step(a);
    ++r.steps;
    r.reward += res.reward;
    if (res.reward != 0.0) ++r.rewarded_steps;
    r.done = res.done;
  }
  return r;
}

}  // namespace privesc::testing
