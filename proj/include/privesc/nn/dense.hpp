#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privesc/core/rng.hpp"
#include "privesc/nn/params.hpp"

namespace privesc::nn {

enum class Activation : std::uint8_t { Identity, Relu, Tanh };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view s);

/// y = act(W x + b) with W stored out x in. All batched calls take row-major
/// inputs with one sample per row.
struct DenseLayer {
  TensorRef w;
  TensorRef b;
  int in = 0;
  int out = 0;
  Activation act = Activation::Identity;

  static DenseLayer create(ParamStore& ps, std::string_view name, int in, int out, Activation act);

  /// Glorot-uniform weights, zero bias.
  void init(ParamStore& ps, Rng& rng) const;

  std::size_t param_count() const { return w.size() + b.size(); }

  void forward(const ParamStore& ps, std::span<const double> x, int n, std::span<double> y) const;
  std::vector<double> forward(const ParamStore& ps, std::span<const double> x) const;

  /// Backpropagates through n rows. `y` is the forward output; `dy` holds
  /// dL/dy and is overwritten with dL/d(pre-activation). Parameter gradients
  /// are accumulated into `grad` (same layout as the store). When `dx` is
  /// non-empty it receives dL/dx (overwritten).
  void backward(const ParamStore& ps, std::span<const double> x, std::span<const double> y,
                std::span<double> dy, int n, std::span<double> grad, std::span<double> dx) const;
};

/// Stack of dense layers with per-layer activation buffers.
struct Mlp {
  std::vector<DenseLayer> layers;

  struct Cache {
    int n = 0;
    std::vector<std::vector<double>> acts;  // output of each layer
    std::vector<double> dbuf_a;
    std::vector<double> dbuf_b;
  };

  static Mlp create(ParamStore& ps, std::string_view name, std::span<const int> sizes,
                    std::span<const Activation> acts);
  void init(ParamStore& ps, Rng& rng) const;
  int in() const { return layers.front().in; }
  int out() const { return layers.back().out; }
  std::size_t param_count() const;

  /// Returns a view of the final layer's outputs (n x out) inside `cache`.
  std::span<const double> forward(const ParamStore& ps, std::span<const double> x, int n, Cache& cache) const;

  /// `dout` is dL/d(output), n x out. Accumulates parameter gradients and, if
  /// `dx` is non-empty, writes dL/dx (n x in).
  void backward(const ParamStore& ps, std::span<const double> x, Cache& cache, std::span<const double> dout,
                std::span<double> grad, std::span<double> dx) const;
};

}  // namespace privesc::nn
