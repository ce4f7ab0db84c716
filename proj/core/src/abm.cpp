#include "hawkesnet/abm.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "hawkesnet/rng.hpp"

namespace hawkesnet {

namespace {

using Eigen::Index;

constexpr std::uint64_t kAbmStream = 0xAB;

}  // namespace

void AbmConfig::validate() const {
  const Index m = A0.size();
  if (m < 1) throw std::invalid_argument("ABM needs at least one node");
  if (W.rows() != m || W.cols() != m) throw std::invalid_argument("W must be m x m");
  if (omega.size() != m || eta.size() != m || Gamma.size() != m) {
    throw std::invalid_argument("omega, eta and Gamma need one entry per node");
  }
  if (B0.size() != 0 && B0.size() != m) throw std::invalid_argument("B0 needs one entry per node");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!W.allFinite() || (W.array() < 0.0).any()) throw std::invalid_argument("W must be finite and non-negative");
  for (Index s = 0; s < m; ++s) {
    const std::string at = "[" + std::to_string(s) + "]";
    if (!(A0(s) > 0.0)) throw std::invalid_argument("A0" + at + " must be positive");
    if (!(omega(s) > 0.0 && omega(s) * dt < 1.0)) throw std::invalid_argument("omega" + at + " must satisfy 0 < omega dt < 1");
    if (!(eta(s) >= 0.0 && eta(s) <= 1.0)) throw std::invalid_argument("eta" + at + " must lie in [0, 1]");
    if (!(Gamma(s) >= 0.0)) throw std::invalid_argument("Gamma" + at + " must be non-negative");
    if (B0.size() == m && !(B0(s) >= 0.0)) throw std::invalid_argument("B0" + at + " must be non-negative");
  }
}

std::int64_t AbmState::population() const { return std::accumulate(agents.begin(), agents.end(), std::int64_t{0}); }

AbmState abm_initial_state(const AbmConfig& config) {
  config.validate();
  const std::size_t m = config.nodes();
  AbmState s;
  s.B = config.B0.size() == 0 ? Vector::Zero(static_cast<Index>(m)) : config.B0;
  s.agents.assign(m, 0);
  s.created.assign(m, 0);
  return s;
}

Vector abm_attractiveness(const AbmConfig& config, const AbmState& state) { return config.A0 + state.B; }

Vector abm_move_probabilities(const AbmConfig& config, const Vector& attractiveness, std::size_t node) {
  const Index m = config.W.rows();
  const Index s = static_cast<Index>(node);
  Vector p = Vector::Zero(m);
  double total = 0.0;
  for (Index j = 0; j < m; ++j) {
    if (config.W(s, j) > 0.0) {
      p(j) = attractiveness(j);
      total += p(j);
    }
  }
  if (total > 0.0) {
    p /= total;
  } else {
    p.setZero();
    p(s) = 1.0;
  }
  return p;
}

Vector abm_update_B(const AbmConfig& config, const Vector& B, const Vector& events) {
  const Index m = B.size();
  Vector out(m);
  for (Index s = 0; s < m; ++s) {
    double neighbours = 0.0;
    double drive = 0.0;
    for (Index j = 0; j < m; ++j) {
      if (config.W(s, j) > 0.0) {
        neighbours += B(j);
        drive += config.W(s, j) * events(j);
      }
    }
    const double mixed = (1.0 - config.eta(s)) * B(s) + config.eta(s) * neighbours;
    out(s) = mixed * (1.0 - config.omega(s) * config.dt) + drive;
  }
  return out;
}

std::vector<std::int64_t> abm_step(AbmState& state, const AbmConfig& config) {
  const std::size_t m = config.nodes();
  CounterRng rng(config.seed, {kAbmStream, static_cast<std::uint64_t>(state.step)});
  const Vector A = abm_attractiveness(config, state);
  std::vector<std::int64_t> events(m, 0);
  std::vector<std::int64_t> survivors(m, 0);
  for (std::size_t s = 0; s < m; ++s) {
    const double mean = A(static_cast<Index>(s)) * config.dt;
    for (std::int64_t a = 0; a < state.agents[s]; ++a) {
      const std::int64_t n = rng.poisson(mean);
      if (n > 0) {
        events[s] += n;
      } else {
        ++survivors[s];
      }
    }
  }
  std::vector<std::int64_t> moved(m, 0);
  for (std::size_t s = 0; s < m; ++s) {
    if (survivors[s] == 0) continue;
    const Vector p = abm_move_probabilities(config, A, s);
    for (std::int64_t a = 0; a < survivors[s]; ++a) {
      const double u = rng.uniform();
      double cumulative = 0.0;
      std::size_t target = s;
      for (std::size_t j = 0; j < m; ++j) {
        if (p(static_cast<Index>(j)) <= 0.0) continue;
        cumulative += p(static_cast<Index>(j));
        target = j;
        if (u < cumulative) break;
      }
      ++moved[target];
    }
  }
  Vector e(static_cast<Index>(m));
  for (std::size_t s = 0; s < m; ++s) e(static_cast<Index>(s)) = static_cast<double>(events[s]);
  state.B = abm_update_B(config, state.B, e);
  for (std::size_t s = 0; s < m; ++s) {
    state.created[s] = rng.poisson(config.Gamma(static_cast<Index>(s)) * config.dt);
    state.agents[s] = moved[s] + state.created[s];
  }
  ++state.step;
  return events;
}

AbmSimulation simulate_abm(const AbmConfig& config, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("ABM simulation needs at least one step");
  AbmState state = abm_initial_state(config);
  const Index m = static_cast<Index>(config.nodes());
  AbmSimulation out;
  CountMatrix counts(static_cast<Index>(steps), m);
  out.created.resize(static_cast<Index>(steps), m);
  out.population.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::vector<std::int64_t> e = abm_step(state, config);
    for (Index s = 0; s < m; ++s) {
      counts(static_cast<Index>(k), s) = e[static_cast<std::size_t>(s)];
      out.created(static_cast<Index>(k), s) = state.created[static_cast<std::size_t>(s)];
    }
    out.population.push_back(state.population());
  }
  out.counts = CountSeries::from_counts(counts, config.dt);
  return out;
}

}  // namespace hawkesnet
