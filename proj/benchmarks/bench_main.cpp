#include <benchmark/benchmark.h>

#include "lmipole/analysis.hpp"
#include "lmipole/random.hpp"
#include "lmipole/serialize.hpp"
#include "lmipole/synthesis.hpp"

using namespace lmipole;

namespace {

DataMatrices reference_data(const SystemModel& sys) {
  ExcitationConfig cfg;
  return build_data_matrices(simulate_rollout(sys, cfg, default_initial_state(cfg, sys.n())), sys.B1);
}

Matrix stable_matrix(Eigen::Index n) {
  Rng rng(11);
  Matrix a = rng.uniform_matrix(n, n, -1.0, 1.0);
  double top = -1e300;
  for (const auto& l : numerics::eig_general(a)) top = std::max(top, l.real());
  return a - (top + 0.5) * Matrix::Identity(n, n);
}

void BM_DesignData(benchmark::State& state) {
  const SystemModel sys = io::reference_plant();
  const DataMatrices dm = reference_data(sys);
  const SynthesisSpec spec = spec_from_model(sys, LmiRegion::conic_alpha(2.0), DesignMode::kMixedOptGamma);
  for (auto _ : state) benchmark::DoNotOptimize(design(spec, dm).gamma);
}
BENCHMARK(BM_DesignData)->Unit(benchmark::kMillisecond);

void BM_DesignModel(benchmark::State& state) {
  const SystemModel sys = io::reference_plant();
  const SynthesisSpec spec = spec_from_model(sys, LmiRegion::conic_alpha(2.0), DesignMode::kMixedOptGamma);
  for (auto _ : state) benchmark::DoNotOptimize(design(spec, sys).gamma);
}
BENCHMARK(BM_DesignModel)->Unit(benchmark::kMillisecond);

void BM_SolveMixedData(benchmark::State& state) {
  const SystemModel sys = io::reference_plant();
  const SynthesisSpec spec = spec_from_model(sys, LmiRegion::conic_alpha(2.0), DesignMode::kMixedOptGamma);
  const AssembledProgram prog = assemble_mixed_data(reference_data(sys), spec);
  for (auto _ : state) benchmark::DoNotOptimize(sdp::solve(prog.problem).objective_value);
}
BENCHMARK(BM_SolveMixedData)->Unit(benchmark::kMillisecond);

void BM_HinfNorm(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix a = stable_matrix(n);
  Rng rng(3);
  const Matrix b = rng.uniform_matrix(n, 2, -1.0, 1.0);
  const Matrix c = rng.uniform_matrix(2, n, -1.0, 1.0);
  const Matrix d = Matrix::Zero(2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::hinf_norm(a, b, c, d));
}
BENCHMARK(BM_HinfNorm)->Arg(3)->Arg(10)->Arg(30);

void BM_Lyapunov(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix a = stable_matrix(n);
  const Matrix q = Matrix::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(numerics::lyapunov_solve(a, q)(0, 0));
}
BENCHMARK(BM_Lyapunov)->Arg(3)->Arg(10)->Arg(30)->Arg(100);

void BM_Rollout(benchmark::State& state) {
  const SystemModel sys = io::reference_plant();
  ExcitationConfig cfg;
  cfg.T = static_cast<int>(state.range(0));
  const Vector x0 = default_initial_state(cfg, 3);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_rollout(sys, cfg, x0).states(0, 0));
}
BENCHMARK(BM_Rollout)->Arg(15)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
