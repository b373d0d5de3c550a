#include <benchmark/benchmark.h>

#include "rotor/cv_protocol.hpp"
#include "rotor/decoder.hpp"
#include "rotor/discrete_protocol.hpp"
#include "rotor/fock_engine.hpp"
#include "rotor/nocomm_baseline.hpp"
#include "rotor/noise_model.hpp"
#include "rotor/qudit_oracle.hpp"

using namespace rotor;

static void BM_DiscreteProtocol(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const ProtocolParams p{d, d, d / 2, 2, 0.0};
  const NoiseParams n{0.01, 0.01, 16.0};
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(p, n).f_avg);
}
BENCHMARK(BM_DiscreteProtocol)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_OptimalMc(benchmark::State& state) {
  const ProtocolParams p{16, 16, 2, 2, 0.0};
  const NoiseParams n{0.01, 0.01, 49.0};
  for (auto _ : state) benchmark::DoNotOptimize(optimal_mc(p, n).m_c);
}
BENCHMARK(BM_OptimalMc)->Unit(benchmark::kMillisecond);

static void BM_NoCommOptimum(benchmark::State& state) {
  const ProtocolParams p{16, 16, 2, 2, 0.0};
  const NoiseParams n{0.01, 0.01, 49.0};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_strategy_and_mc(p, n).f_avg);
}
BENCHMARK(BM_NoCommOptimum)->Unit(benchmark::kMillisecond);

static void BM_QuditOracle(benchmark::State& state) {
  const ProtocolParams p{8, 8, 4, 2, 0.0};
  const auto deph = dephasing_probs(0.05, 8);
  const auto loss = loss_probs(0.05, 1.0, 3, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_protocol(p, deph, loss).p_abort);
}
BENCHMARK(BM_QuditOracle)->Unit(benchmark::kMillisecond);

namespace {
TwoModeDensity bench_density(int cutoff) {
  const FockSpace space{cutoff};
  const PrimitiveSpec spec{PrimitiveSpec::Kind::coherent, {3.0, 0.0}, {0.0, 0.0}};
  const auto prim = primitive_state(spec, space);
  return TwoModeDensity::pure(space, prepare_entangled(space, prim.ket, 8, EntangledVariant::ancilla_equivalent, 1e-2).ket);
}
}  // namespace

static void BM_LossChannel(benchmark::State& state) {
  const auto rho = bench_density(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(loss_apply(rho, 0.05).state.rho(0, 0));
}
BENCHMARK(BM_LossChannel)->Arg(32)->Arg(40)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_DephasingChannel(benchmark::State& state) {
  const auto rho = bench_density(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dephasing_apply(rho, 0.05).rho(0, 0));
}
BENCHMARK(BM_DephasingChannel)->Arg(32)->Arg(40)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_Decoder(benchmark::State& state) {
  const auto rho = bench_density(32);
  const auto basis = PeggBarnettBasis::for_cutoff(32, 8);
  for (auto _ : state) benchmark::DoNotOptimize(decode_two_mode(rho, basis)(0, 0));
}
BENCHMARK(BM_Decoder)->Unit(benchmark::kMillisecond);

static void BM_CvPoint(benchmark::State& state) {
  CvRunConfig c;
  c.noise = {0.01, 0.01, 0.0};
  c.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_cv(c).f_avg);
}
BENCHMARK(BM_CvPoint)->Unit(benchmark::kSecond)->Iterations(1);
BENCHMARK_MAIN();
