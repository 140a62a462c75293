#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "privesc/net/policy_value_net.hpp"

using namespace privesc;
using namespace privesc::net;
using state::EncodedState;

namespace {

double trit(Rng& rng) { return static_cast<double>(uniform_int(rng, -1, 1)); }

RowBlock random_block(Rng& rng, int rows, int cols) {
  RowBlock b(rows, cols);
  for (double& x : b.data) x = trit(rng);
  return b;
}

EncodedState random_state(Rng& rng, int services, int autoruns, int tasks) {
  EncodedState e;
  for (double& x : e.general) x = trit(rng);
  e.services = random_block(rng, services, state::kServiceAttrs);
  for (int i = 0; i < services; ++i) e.dlls.push_back(random_block(rng, uniform_int(rng, 0, 4), state::kDllAttrs));
  e.autoruns = random_block(rng, autoruns, state::kAutoRunAttrs);
  e.tasks = random_block(rng, tasks, state::kTaskAttrs);
  return e;
}

RowBlock permute_rows(const RowBlock& b, const std::vector<int>& perm) {
  RowBlock out(0, b.cols);
  for (int i : perm) out.push_row(b.row(i));
  return out;
}

std::vector<int> shuffled(Rng& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

void check_same(const NetOutput& a, const NetOutput& b) {
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  for (int i = 0; i < winsim::kNumActions; ++i) CHECK(a.policy[i] == doctest::Approx(b.policy[i]).epsilon(1e-12));
}

void jitter(PolicyValueNet& n, std::uint64_t seed) {
  Rng rng(seed);
  for (double& x : n.params().data()) x += 0.05 * (uniform01(rng) - 0.5);
}

}  // namespace

TEST_CASE("default network fits the parameter budget") {
  PolicyValueNet n;
  CHECK(n.param_count() == 17159);
  CHECK(n.param_count() < static_cast<std::size_t>(kParamBudget));
  CHECK(n.config().trunk_width() == 91);
}

TEST_CASE("network config validation and serialization") {
  NetConfig c;
  c.embed = 0;
  CHECK_THROWS(c.validate());
  NetConfig d;
  d.head_hidden = 48;
  d.activation = nn::Activation::Tanh;
  CHECK(net_config_from_json(to_json(d)) == d);
}

TEST_CASE("all-unknown input gives a normalized policy") {
  PolicyValueNet n;
  n.init(1);
  EncodedState e;
  e.services = RowBlock(1, state::kServiceAttrs);
  e.dlls = {RowBlock(0, state::kDllAttrs)};
  e.autoruns = RowBlock(1, state::kAutoRunAttrs);
  e.tasks = RowBlock(1, state::kTaskAttrs);
  const auto out = n.forward(e);
  double sum = 0;
  for (double p : out.policy) {
    CHECK(std::isfinite(p));
    CHECK(p > 0.0);
    sum += p;
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK(out.selected_service == 0);
  CHECK(std::isfinite(out.value));
}

TEST_CASE("outputs are invariant under entity permutations") {
  PolicyValueNet n;
  n.init(2);
  jitter(n, 3);
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const EncodedState e = random_state(rng, uniform_int(rng, 1, 12), uniform_int(rng, 1, 6), uniform_int(rng, 1, 6));
    const auto base = n.forward(e);
    EncodedState p = e;
    const auto sp = shuffled(rng, e.services.rows);
    p.services = permute_rows(e.services, sp);
    for (std::size_t i = 0; i < sp.size(); ++i) {
      p.dlls[i] = permute_rows(e.dlls[sp[i]], shuffled(rng, e.dlls[sp[i]].rows));
    }
    p.autoruns = permute_rows(e.autoruns, shuffled(rng, e.autoruns.rows));
    p.tasks = permute_rows(e.tasks, shuffled(rng, e.tasks.rows));
    const auto out = n.forward(p);
    check_same(base, out);
    CHECK(sp[out.selected_service] == base.selected_service);
  }
}

TEST_CASE("duplicating a service row keeps the value") {
  PolicyValueNet n;
  n.init(5);
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    EncodedState e = random_state(rng, 4, 3, 3);
    const auto base = n.forward(e);
    const int k = uniform_int(rng, 0, 3);
    e.services.push_row(std::vector<double>(e.services.row(k).begin(), e.services.row(k).end()));
    e.dlls.push_back(e.dlls[k]);
    check_same(base, n.forward(e));
  }
}

TEST_CASE("tied rows route the gradient to one row") {
  PolicyValueNet n;
  n.init(7);
  jitter(n, 8);
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const EncodedState e = random_state(rng, 3, 2, 2);
    EncodedState dup = e;
    dup.autoruns.push_row(std::vector<double>(e.autoruns.row(0).begin(), e.autoruns.row(0).end()));
    dup.tasks.push_row(std::vector<double>(e.tasks.row(1).begin(), e.tasks.row(1).end()));
    NetWorkspace ws1, ws2;
    const auto o1 = n.forward(e, ws1);
    const auto o2 = n.forward(dup, ws2);
    check_same(o1, o2);
    std::vector<double> dl(winsim::kNumActions);
    for (double& x : dl) x = uniform01(rng) - 0.5;
    std::vector<double> g1(n.param_count(), 0.0), g2(n.param_count(), 0.0);
    n.backward(e, ws1, o1, 0.7, dl, g1);
    n.backward(dup, ws2, o2, 0.7, dl, g2);
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-12));
  }
}

TEST_CASE("non-selected service rows do not influence the output locally") {
  PolicyValueNet n;
  n.init(10);
  jitter(n, 11);
  Rng rng(12);
  int tested = 0;
  for (int t = 0; t < 100; ++t) {
    const EncodedState e = random_state(rng, 5, 2, 2);
    const auto base = n.forward(e);
    const int other = (base.selected_service + 1) % 5;
    EncodedState p = e;
    p.services.row(other)[0] += 1e-6;
    const auto out = n.forward(p);
    if (out.selected_service != base.selected_service) continue;
    ++tested;
    CHECK(out.value == base.value);
    CHECK(out.policy == base.policy);
  }
  CHECK(tested > 50);
}

TEST_CASE("full graph gradients match central differences") {
  PolicyValueNet n;
  n.init(13);
  jitter(n, 14);
  Rng rng(15);
  const EncodedState e = random_state(rng, 4, 3, 2);
  std::vector<double> c(winsim::kNumActions);
  for (double& x : c) x = uniform01(rng) - 0.5;
  const double a = 0.9;
  auto loss = [&] {
    const auto o = n.forward(e);
    double s = a * o.value;
    for (int i = 0; i < winsim::kNumActions; ++i) s += c[i] * o.logits[i];
    return s;
  };
  NetWorkspace ws;
  const auto out = n.forward(e, ws);
  std::vector<double> g(n.param_count(), 0.0);
  n.backward(e, ws, out, a, c, g);
  auto& d = n.params().data();
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double o = d[i];
    d[i] = o + h;
    const double lp = loss();
    d[i] = o - h;
    const double lm = loss();
    d[i] = o;
    const double fd = (lp - lm) / (2 * h);
    const double err = std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-3});
    worst = std::max(worst, err);
  }
  MESSAGE("worst relative error " << worst);
  CHECK(worst < 1e-4);
}

TEST_CASE("corner inputs stay finite through forward and backward") {
  PolicyValueNet n;
  n.init(16);
  Rng rng(17);
  NetWorkspace ws;
  std::vector<double> g(n.param_count(), 0.0);
  std::vector<double> dl(winsim::kNumActions, 0.01);
  for (int t = 0; t < 10000; ++t) {
    const EncodedState e =
        random_state(rng, uniform_int(rng, 1, 6), uniform_int(rng, 1, 3), uniform_int(rng, 1, 3));
    const auto o = n.forward(e, ws);
    REQUIRE(std::isfinite(o.value));
    REQUIRE(std::all_of(o.policy.begin(), o.policy.end(), [](double p) { return std::isfinite(p); }));
    n.backward(e, ws, o, 1.0, dl, g);
  }
  CHECK(std::all_of(g.begin(), g.end(), [](double x) { return std::isfinite(x); }));
}

TEST_CASE("action selection") {
  NetOutput o;
  o.policy.fill(0.0);
  o.policy[0] = 1.0;
  Rng rng(18);
  for (int i = 0; i < 1000; ++i) CHECK(sample_action(o, rng) == winsim::Action::CreateExe);
  o.policy.fill(1.0 / winsim::kNumActions);
  CHECK(greedy_action(o) == winsim::Action::CreateExe);
  o.policy[20] = 0.5;
  CHECK(greedy_action(o) == winsim::action_at(20));
}

TEST_CASE("sampling frequencies match the policy within three sigma") {
  NetOutput o;
  Rng prng(19);
  double total = 0;
  for (double& p : o.policy) total += (p = uniform01(prng) + 0.01);
  for (double& p : o.policy) p /= total;
  const int n = 100000;
  std::array<int, winsim::kNumActions> counts{};
  Rng rng(20);
  for (int i = 0; i < n; ++i) ++counts[winsim::index(sample_action(o, rng))];
  for (int i = 0; i < winsim::kNumActions; ++i) {
    const double sd = std::sqrt(n * o.policy[i] * (1 - o.policy[i]));
    CHECK(std::abs(counts[i] - n * o.policy[i]) <= 3 * sd);
  }
}
