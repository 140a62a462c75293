#include <benchmark/benchmark.h>

#include "privesc/bench/evaluate.hpp"

using namespace privesc;

namespace {

std::vector<bench::EvalTask> tasks(int samples) {
  bench::EvalOptions opt;
  opt.samples = samples;
  return bench::plan_single_vuln(opt);
}

template <class Runner>
void run_expert(benchmark::State& st, Runner run) {
  const auto plan = tasks(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto logs = run(plan, bench::PolicyKind::Expert, nullptr, false);
    benchmark::DoNotOptimize(logs.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(plan.size()));
}

void BM_ExpertSerial(benchmark::State& st) { run_expert(st, bench::run_tasks_serial); }
void BM_ExpertParallel(benchmark::State& st) { run_expert(st, bench::run_tasks_parallel); }

template <class Runner>
void run_network(benchmark::State& st, Runner run) {
  net::PolicyValueNet net;
  net.init(1);
  const auto plan = tasks(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto logs = run(plan, bench::PolicyKind::StochasticRL, &net, false);
    benchmark::DoNotOptimize(logs.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(plan.size()));
}

void BM_NetworkSerial(benchmark::State& st) { run_network(st, bench::run_tasks_serial); }
void BM_NetworkParallel(benchmark::State& st) { run_network(st, bench::run_tasks_parallel); }

}  // namespace

BENCHMARK(BM_ExpertSerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExpertParallel)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NetworkSerial)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NetworkParallel)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
