#include <benchmark/benchmark.h>

#include "qdyn/instance.hpp"
#include "qdyn/qrs_design.hpp"
#include "qdyn/rescaling.hpp"

using namespace qdyn;

namespace {

const InstanceSpec& nh3bf3() {
  static const InstanceSpec inst = load_instance(shipped_instance_path("nh3bf3"));
  return inst;
}

std::vector<const PseudoIonParams*> species() {
  std::vector<const PseudoIonParams*> s;
  for (const auto& c : nh3bf3().census) s.push_back(&c.params);
  return s;
}

void BM_LocalSums(benchmark::State& st) {
  Exec e = st.range(0) ? Exec::Parallel : Exec::Serial;
  auto sp = species();
  for (auto _ : st) {
    double coulomb = 0.0;
    benchmark::DoNotOptimize(local_sums(sp, nh3bf3().electron, &coulomb, e));
  }
}

void BM_NonlocalSums(benchmark::State& st) {
  Exec e = st.range(0) ? Exec::Parallel : Exec::Serial;
  auto sp = species();
  for (auto _ : st) benchmark::DoNotOptimize(nonlocal_sums(sp, nh3bf3().electron, e));
}

void BM_SuccessProbability(benchmark::State& st) {
  Exec e = st.range(0) ? Exec::Parallel : Exec::Serial;
  const auto& b = nh3bf3().electron;
  PointFn target = [](const Eigen::Vector3d& k) { return 1.0 / k.norm(); };
  PointFn reference = [](const Eigen::Vector3d& k) { return 1.0 / k.lpNorm<Eigen::Infinity>(); };
  for (auto _ : st)
    benchmark::DoNotOptimize(success_probability(target, reference, b.p_max, b.b, true, DominationMode::Report, e));
}

}  // namespace

BENCHMARK(BM_LocalSums)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NonlocalSums)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SuccessProbability)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
