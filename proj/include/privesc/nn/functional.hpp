#pragma once

#include <span>

namespace privesc::nn {

inline constexpr double kHuberDelta = 1.0;

/// Max-shifted softmax; `out` may alias `logits`.
void softmax(std::span<const double> logits, std::span<double> out);

/// log softmax(logits)[i], computed stably.
double log_softmax_at(std::span<const double> logits, int i);

/// 0.5 e^2 for |e| <= delta, delta (|e| - delta/2) otherwise; e = pred - target.
double huber(double pred, double target, double delta = kHuberDelta);

/// d huber / d pred.
double huber_grad(double pred, double target, double delta = kHuberDelta);

/// -sum p log p, with 0 log 0 = 0.
double entropy(std::span<const double> p);

}  // namespace privesc::nn
