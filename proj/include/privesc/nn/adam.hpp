#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace privesc::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam step (descent on `grad`). Moments are sized on
/// first use; a later size change throws.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& st, const AdamConfig& cfg);

}  // namespace privesc::nn
