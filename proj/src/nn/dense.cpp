#include "privesc/nn/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace privesc::nn {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
  }
  return "?";
}

Activation parse_activation(std::string_view s) {
  if (s == "identity") return Activation::Identity;
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  throw std::invalid_argument("unknown activation: " + std::string(s));
}

DenseLayer DenseLayer::create(ParamStore& ps, std::string_view name, int in, int out, Activation act) {
  DenseLayer l;
  l.w = ps.add(std::string(name) + ".w", out, in);
  l.b = ps.add(std::string(name) + ".b", 1, out);
  l.in = in;
  l.out = out;
  l.act = act;
  return l;
}

void DenseLayer::init(ParamStore& ps, Rng& rng) const {
  const double a = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-a, a);
  for (double& v : ps.view(w)) v = dist(rng);
  std::fill(ps.view(b).begin(), ps.view(b).end(), 0.0);
}

void DenseLayer::forward(const ParamStore& ps, std::span<const double> x, int n, std::span<double> y) const {
  if (x.size() < static_cast<std::size_t>(n) * in || y.size() < static_cast<std::size_t>(n) * out) {
    throw std::invalid_argument("dense forward: shape mismatch");
  }
  const double* W = ps.view(w).data();
  const double* B = ps.view(b).data();
  for (int r = 0; r < n; ++r) {
    const double* xr = x.data() + static_cast<std::size_t>(r) * in;
    double* yr = y.data() + static_cast<std::size_t>(r) * out;
    for (int o = 0; o < out; ++o) {
      const double* wo = W + static_cast<std::size_t>(o) * in;
      double s = B[o];
      for (int i = 0; i < in; ++i) s += wo[i] * xr[i];
      switch (act) {
        case Activation::Identity: break;
        case Activation::Relu: s = s > 0.0 ? s : 0.0; break;
        case Activation::Tanh: s = std::tanh(s); break;
      }
      yr[o] = s;
    }
  }
}

std::vector<double> DenseLayer::forward(const ParamStore& ps, std::span<const double> x) const {
  if (static_cast<int>(x.size()) != in) throw std::invalid_argument("dense forward: input length mismatch");
  std::vector<double> y(static_cast<std::size_t>(out));
  forward(ps, x, 1, y);
  return y;
}

void DenseLayer::backward(const ParamStore& ps, std::span<const double> x, std::span<const double> y,
                          std::span<double> dy, int n, std::span<double> grad, std::span<double> dx) const {
  const double* W = ps.view(w).data();
  double* gW = grad.data() + w.offset;
  double* gB = grad.data() + b.offset;
  for (int r = 0; r < n; ++r) {
    const double* yr = y.data() + static_cast<std::size_t>(r) * out;
    double* dz = dy.data() + static_cast<std::size_t>(r) * out;
    for (int o = 0; o < out; ++o) {
      switch (act) {
        case Activation::Identity: break;
        case Activation::Relu: dz[o] = yr[o] > 0.0 ? dz[o] : 0.0; break;
        case Activation::Tanh: dz[o] *= 1.0 - yr[o] * yr[o]; break;
      }
    }
    const double* xr = x.data() + static_cast<std::size_t>(r) * in;
    for (int o = 0; o < out; ++o) {
      const double g = dz[o];
      if (g == 0.0) continue;
      gB[o] += g;
      double* gwo = gW + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) gwo[i] += g * xr[i];
    }
    if (!dx.empty()) {
      double* dxr = dx.data() + static_cast<std::size_t>(r) * in;
      std::fill(dxr, dxr + in, 0.0);
      for (int o = 0; o < out; ++o) {
        const double g = dz[o];
        if (g == 0.0) continue;
        const double* wo = W + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) dxr[i] += g * wo[i];
      }
    }
  }
}

Mlp Mlp::create(ParamStore& ps, std::string_view name, std::span<const int> sizes, std::span<const Activation> acts) {
  if (sizes.size() < 2 || acts.size() != sizes.size() - 1) throw std::invalid_argument("mlp: bad layer spec");
  Mlp m;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    m.layers.push_back(DenseLayer::create(ps, std::string(name) + "." + std::to_string(i), sizes[i], sizes[i + 1], acts[i]));
  }
  return m;
}

void Mlp::init(ParamStore& ps, Rng& rng) const {
  for (const auto& l : layers) l.init(ps, rng);
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.param_count();
  return n;
}

std::span<const double> Mlp::forward(const ParamStore& ps, std::span<const double> x, int n, Cache& cache) const {
  cache.n = n;
  cache.acts.resize(layers.size());
  std::span<const double> cur = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto& buf = cache.acts[i];
    buf.resize(static_cast<std::size_t>(n) * layers[i].out);
    layers[i].forward(ps, cur, n, buf);
    cur = buf;
  }
  return cur;
}

void Mlp::backward(const ParamStore& ps, std::span<const double> x, Cache& cache, std::span<const double> dout,
                   std::span<double> grad, std::span<double> dx) const {
  const int n = cache.n;
  cache.dbuf_a.assign(dout.begin(), dout.end());
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& l = layers[k];
    std::span<const double> input = k == 0 ? x : std::span<const double>(cache.acts[k - 1]);
    std::span<double> dinput;
    if (k > 0) {
      cache.dbuf_b.resize(static_cast<std::size_t>(n) * l.in);
      dinput = cache.dbuf_b;
    } else {
      dinput = dx;
    }
    l.backward(ps, input, cache.acts[k], cache.dbuf_a, n, grad, dinput);
    if (k > 0) std::swap(cache.dbuf_a, cache.dbuf_b);
  }
}

}  // namespace privesc::nn
