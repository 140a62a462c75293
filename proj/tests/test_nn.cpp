#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "privesc/core/rng.hpp"
#include "privesc/nn/adam.hpp"
#include "privesc/nn/checkpoint.hpp"
#include "privesc/nn/dense.hpp"
#include "privesc/nn/functional.hpp"

using namespace privesc;
using namespace privesc::nn;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

double act_ref(Activation a, double z) {
  switch (a) {
    case Activation::Relu: return z > 0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
    default: return z;
  }
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("privesc_test_" + name);
}

}  // namespace

TEST_CASE("identity layer with unit weights passes input through") {
  ParamStore ps;
  DenseLayer l = DenseLayer::create(ps, "l", 3, 3, Activation::Identity);
  auto w = ps.view(l.w);
  for (int i = 0; i < 3; ++i) w[i * 3 + i] = 1.0;
  const std::vector<double> x = {0.5, -2.0, 3.0};
  CHECK(l.forward(ps, x) == x);
}

TEST_CASE("relu clamps negatives") {
  ParamStore ps;
  DenseLayer l = DenseLayer::create(ps, "l", 2, 2, Activation::Relu);
  auto w = ps.view(l.w);
  w[0] = 1.0;
  w[3] = 1.0;
  const auto y = l.forward(ps, std::vector<double>{-1.0, 2.0});
  CHECK(y == std::vector<double>{0.0, 2.0});
}

TEST_CASE("dense forward matches a naive matrix product") {
  Rng rng(1);
  for (auto act : {Activation::Identity, Activation::Relu, Activation::Tanh}) {
    ParamStore ps;
    DenseLayer l = DenseLayer::create(ps, "l", 7, 5, act);
    l.init(ps, rng);
    auto b = ps.view(l.b);
    for (double& x : b) x = uniform01(rng) - 0.5;
    const int n = 4;
    const auto x = random_vec(rng, static_cast<std::size_t>(n) * 7);
    std::vector<double> y(static_cast<std::size_t>(n) * 5);
    l.forward(ps, x, n, y);
    const auto w = ps.view(l.w);
    for (int r = 0; r < n; ++r) {
      for (int o = 0; o < 5; ++o) {
        double z = b[o];
        for (int i = 0; i < 7; ++i) z += w[o * 7 + i] * x[r * 7 + i];
        CHECK(std::abs(y[r * 5 + o] - act_ref(act, z)) < 1e-12);
      }
    }
  }
}

TEST_CASE("glorot init stays within bounds with zero bias") {
  ParamStore ps;
  DenseLayer l = DenseLayer::create(ps, "l", 11, 32, Activation::Relu);
  Rng rng(2);
  l.init(ps, rng);
  const double a = std::sqrt(6.0 / (11 + 32));
  for (double x : ps.view(l.w)) CHECK(std::abs(x) <= a);
  for (double x : ps.view(l.b)) CHECK(x == 0.0);
  CHECK(l.param_count() == 384);
}

TEST_CASE("mlp gradients match central differences") {
  Rng rng(3);
  for (auto act : {Activation::Relu, Activation::Tanh, Activation::Identity}) {
    ParamStore ps;
    const int sizes[] = {6, 9, 4};
    const Activation acts[] = {act, Activation::Identity};
    Mlp m = Mlp::create(ps, "m", sizes, acts);
    m.init(ps, rng);
    for (double& p : ps.data()) p += 0.05 * (uniform01(rng) - 0.5);
    const int n = 3;
    const auto x = random_vec(rng, n * 6);
    const auto c = random_vec(rng, n * 4);
    auto loss = [&] {
      Mlp::Cache cache;
      const auto y = m.forward(ps, x, n, cache);
      double s = 0;
      for (std::size_t i = 0; i < y.size(); ++i) s += c[i] * y[i] + 0.5 * y[i] * y[i];
      return s;
    };
    Mlp::Cache cache;
    const auto y = m.forward(ps, x, n, cache);
    std::vector<double> dout(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) dout[i] = c[i] + y[i];
    std::vector<double> grad(ps.count(), 0.0), dx(x.size());
    m.backward(ps, x, cache, dout, grad, dx);
    const double h = 1e-5;
    for (std::size_t i = 0; i < ps.count(); ++i) {
      const double o = ps.data()[i];
      ps.data()[i] = o + h;
      const double lp = loss();
      ps.data()[i] = o - h;
      const double lm = loss();
      ps.data()[i] = o;
      const double fd = (lp - lm) / (2 * h);
      CHECK(std::abs(fd - grad[i]) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("softmax") {
  std::vector<double> p(2);
  softmax(std::vector<double>{0.0, 0.0}, p);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const auto z = random_vec(rng, 38, 20.0);
    std::vector<double> a(38), b(38);
    softmax(z, a);
    auto zs = z;
    for (double& v : zs) v += 123.456;
    softmax(zs, b);
    double sum = 0;
    for (int i = 0; i < 38; ++i) {
      sum += a[i];
      CHECK(std::abs(a[i] - b[i]) < 1e-12);
      CHECK(std::abs(std::log(a[i]) - log_softmax_at(z, i)) < 1e-9 * std::max(1.0, std::abs(log_softmax_at(z, i))));
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  std::vector<double> big = {1000.0, 0.0};
  softmax(big, p);
  CHECK(std::isfinite(p[1]));
}

TEST_CASE("huber loss") {
  CHECK(huber(0.5, 0.0) == doctest::Approx(0.125));
  CHECK(huber(2.0, 0.0, 1.0) == doctest::Approx(1.5));
  CHECK(huber(-2.0, 0.0, 1.0) == doctest::Approx(1.5));
  CHECK(huber_grad(1.0 - 1e-12, 0.0) == doctest::Approx(huber_grad(1.0 + 1e-12, 0.0)));
  CHECK(huber_grad(-1.0 - 1e-12, 0.0) == doctest::Approx(huber_grad(-1.0 + 1e-12, 0.0)));
  CHECK(huber_grad(3.0, 0.0) == 1.0);
  CHECK(huber_grad(0.3, 0.0) == doctest::Approx(0.3));
}

TEST_CASE("entropy") {
  CHECK(entropy(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("adam first step has size lr") {
  for (double g : {1e-3, 0.5, -7.0}) {
    std::vector<double> p = {1.0};
    AdamState st;
    adam_step(p, std::vector<double>{g}, st, AdamConfig{});
    const double step = std::abs(p[0] - 1.0);
    CHECK(step == doctest::Approx(1e-3).epsilon(0.01));
    CHECK((g > 0 ? p[0] < 1.0 : p[0] > 1.0));
  }
}

TEST_CASE("adam with zero gradients leaves parameters alone") {
  std::vector<double> p = {0.3, -0.2, 5.0};
  const auto orig = p;
  AdamState st;
  for (int i = 0; i < 100; ++i) adam_step(p, std::vector<double>(3, 0.0), st, AdamConfig{});
  CHECK(p == orig);
  CHECK_THROWS(adam_step(p, std::vector<double>(2, 0.0), st, AdamConfig{}));
}

TEST_CASE("adam is deterministic") {
  auto run = [] {
    Rng rng(5);
    std::vector<double> p = random_vec(rng, 50);
    AdamState st;
    for (int i = 0; i < 100; ++i) adam_step(p, random_vec(rng, 50), st, AdamConfig{});
    return p;
  };
  CHECK(run() == run());
}

TEST_CASE("checkpoint round trip is exact") {
  Rng rng(6);
  ParamStore ps;
  const int sizes[] = {11, 32, 16};
  const Activation acts[] = {Activation::Relu, Activation::Identity};
  Mlp m = Mlp::create(ps, "enc", sizes, acts);
  m.init(ps, rng);
  const auto path = temp_path("roundtrip.pvn");
  save_checkpoint(path, ps, {{"note", "x"}, {"episode", 5}});
  const Checkpoint ck = load_checkpoint(path);
  CHECK(ck.params == ps);
  CHECK(ck.meta["episode"] == 5);
  ParamStore dst;
  Mlp::create(dst, "enc", sizes, acts);
  assign_params(dst, ck.params);
  CHECK(dst == ps);
  ParamStore wrong;
  wrong.add("enc.0.w", 3, 3);
  CHECK_THROWS_AS(assign_params(wrong, ck.params), CheckpointError);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt checkpoints are rejected") {
  ParamStore ps;
  ps.add("t", 2, 2);
  const auto path = temp_path("corrupt.pvn");
  save_checkpoint(path, ps, {});
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 3);
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOTACKPT and some bytes";
  }
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
}
