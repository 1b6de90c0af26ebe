// Serial versus OpenMP timings for the data-parallel kernels.  Every
// benchmark runs the same deterministic workload in both modes; the
// reductions are blocked, so the results are bitwise identical and only
// the wall time differs.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "itp/bm_pipeline.hpp"
#include "itp/chars_states.hpp"
#include "itp/measures.hpp"
#include "itp/par.hpp"
#include "itp/rng.hpp"
#include "itp/tensor_core.hpp"

using namespace itp;

namespace {

par::Mode arg_mode(const benchmark::State& state) {
  return state.range(0) == 0 ? par::Mode::Serial : par::Mode::OpenMP;
}

const measures::ProductMeasure& gauss() {
  static const auto mu =
      measures::ProductMeasure::iid(measures::Measure1D::gaussian(1.0));
  return mu;
}

void BM_PhaseSum(benchmark::State& state) {
  par::mode() = arg_mode(state);
  const std::int64_t n = 1 << 18;
  for (auto _ : state) {
    const auto s = par::blocked_sum(n, [](std::int64_t i) {
      return std::polar(1.0, 6.28318 * rng::uniform01(5, 0, i));
    });
    benchmark::DoNotOptimize(s);
  }
}

void BM_SampleMatrix(benchmark::State& state) {
  par::mode() = arg_mode(state);
  for (auto _ : state) {
    const auto m = measures::sample_matrix(gauss(), 64, 4096, 17);
    benchmark::DoNotOptimize(m.data());
  }
}

void BM_TailResiduals(benchmark::State& state) {
  par::mode() = arg_mode(state);
  const chars::ProductState s{gauss()};
  const auto f = bm::choose_f(s, 128);
  for (auto _ : state) {
    const auto rows = bm::verify_tail(f, s, 2, 10, 128);
    benchmark::DoNotOptimize(rows.data());
  }
}

void BM_CharSweep(benchmark::State& state) {
  par::mode() = arg_mode(state);
  const auto f = tensor::StabSeq::constant_level(2);
  const tensor::TensorElem a = tensor::TensorElem::make(
      {{tensor::TailSpec::power(f, 1), {}, {1.0, 0.0}},
       {tensor::TailSpec::power(f, 2), {}, {-1.0, 0.0}}});
  std::vector<chars::Character> cs;
  for (int i = 1; i <= 256; ++i)
    cs.push_back(chars::Character::make(chars::PointSeq::in_plateau(), i / 256.0, f));
  for (auto _ : state) {
    benchmark::DoNotOptimize(chars::char_sup_lower(a, cs));
  }
}

BENCHMARK(BM_PhaseSum)->Arg(0)->Arg(1)->ArgNames({"omp"});
BENCHMARK(BM_SampleMatrix)->Arg(0)->Arg(1)->ArgNames({"omp"});
BENCHMARK(BM_TailResiduals)->Arg(0)->Arg(1)->ArgNames({"omp"});
BENCHMARK(BM_CharSweep)->Arg(0)->Arg(1)->ArgNames({"omp"});

}  // namespace

BENCHMARK_MAIN();
