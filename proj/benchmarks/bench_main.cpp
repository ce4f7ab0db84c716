#include <benchmark/benchmark.h>

#include <map>

#include "hawkesnet/abm.hpp"
#include "hawkesnet/ensemble_em.hpp"
#include "hawkesnet/expkf.hpp"
#include "hawkesnet/fixtures.hpp"
#include "hawkesnet/log.hpp"
#include "hawkesnet/mm.hpp"
#include "hawkesnet/model.hpp"
#include "hawkesnet/particle.hpp"

namespace {

using namespace hawkesnet;

const CountSeries& nine_node(std::size_t K) {
  static const CountSeries full = simulate_hawkes(fixtures::nine_node_truth(3), 20000, 1).counts;
  static std::map<std::size_t, CountSeries> cache;
  auto it = cache.find(K);
  if (it == cache.end()) it = cache.emplace(K, full.head(K)).first;
  return it->second;
}

void BM_IntensityPath(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const HawkesParams p = fixtures::nine_node_truth(3);
  const CountSeries& c = nine_node(K);
  for (auto _ : state) benchmark::DoNotOptimize(intensity_path(p, c));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(K));
}
BENCHMARK(BM_IntensityPath)->Arg(2000)->Arg(20000);

void BM_MmStepFixed(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const CountSeries& c = nine_node(K);
  MmConfig config;
  config.gamma = fixtures::kNineNodeGamma;
  const MmStepOptions opt = resolve_step_options(config, c);
  const HawkesParams p0 = mm_default_init(c, config);
  for (auto _ : state) benchmark::DoNotOptimize(mm_step_fixed(p0, c, opt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(K));
}
BENCHMARK(BM_MmStepFixed)->Arg(2000)->Arg(20000);

void BM_ExpkfFilter(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const CountSeries& c = nine_node(K);
  ExpkfConfig config;
  config.gamma = fixtures::kNineNodeGamma;
  config.trajectory_stride = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_filter(c, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(K));
}
BENCHMARK(BM_ExpkfFilter)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ParticleFilter(benchmark::State& state) {
  const StateSpaceSpec spec = fixtures::lgcp_truth();
  const StateSpaceSimulation sim = simulate_state_space(spec, 1000, Vector::Constant(1, 1.5), 2);
  const Matrix g = g_paths(spec, sim.counts);
  ParticleOptions opt;
  opt.particles = static_cast<std::size_t>(state.range(0));
  opt.seed = 3;
  const TransitionModel tr = make_transition(spec);
  const ObservationLogLik obs = make_observation(spec, sim.counts, g);
  const GaussianPrior prior = default_initial_prior(spec);
  for (auto _ : state) benchmark::DoNotOptimize(particle_filter(tr, prior, obs, 1000, opt));
}
BENCHMARK(BM_ParticleFilter)->Arg(400)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BackwardSimulate(benchmark::State& state) {
  const StateSpaceSpec spec = fixtures::lgcp_truth();
  const StateSpaceSimulation sim = simulate_state_space(spec, 500, Vector::Constant(1, 1.5), 4);
  const Matrix g = g_paths(spec, sim.counts);
  ParticleOptions opt;
  opt.particles = 400;
  opt.seed = 5;
  const TransitionModel tr = make_transition(spec);
  const ParticleCloud cloud =
      particle_filter(tr, default_initial_prior(spec), make_observation(spec, sim.counts, g), 500, opt);
  for (auto _ : state) benchmark::DoNotOptimize(backward_simulate(cloud, tr, 100, 6));
}
BENCHMARK(BM_BackwardSimulate)->Unit(benchmark::kMillisecond);

void BM_AbmStep(benchmark::State& state) {
  AbmConfig config = fixtures::abm_case(1, 7);
  AbmState s = abm_initial_state(config);
  for (int i = 0; i < 200; ++i) abm_step(s, config);
  for (auto _ : state) benchmark::DoNotOptimize(abm_step(s, config));
}
BENCHMARK(BM_AbmStep);

}  // namespace

int main(int argc, char** argv) {
  hawkesnet::set_log_level(hawkesnet::LogLevel::error);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
