#include "privesc/nn/functional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace privesc::nn {

void softmax(std::span<const double> logits, std::span<double> out) {
  if (logits.empty() || out.size() != logits.size()) throw std::invalid_argument("softmax: size mismatch");
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
}

double log_softmax_at(std::span<const double> logits, int i) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - m);
  return logits[static_cast<std::size_t>(i)] - m - std::log(sum);
}

double huber(double pred, double target, double delta) {
  const double e = pred - target;
  const double a = std::abs(e);
  return a <= delta ? 0.5 * e * e : delta * (a - 0.5 * delta);
}

double huber_grad(double pred, double target, double delta) {
  const double e = pred - target;
  return std::clamp(e, -delta, delta);
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace privesc::nn
