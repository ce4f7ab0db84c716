#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hawkesnet/types.hpp"

namespace hawkesnet {

/// Agent-based event simulator. Node s' is a neighbour of s (s' ~ s) when
/// W(s, s') > 0; events at s' excite s through W(s, s').
struct AbmConfig {
  Matrix W;
  Vector A0;
  Vector omega;
  Vector eta;
  Vector Gamma;
  double dt = 0.05;
  std::uint64_t seed = 0;
  /// Initial dynamic component; zero when empty.
  Vector B0;

  [[nodiscard]] std::size_t nodes() const { return static_cast<std::size_t>(A0.size()); }
  void validate() const;
};

struct AbmState {
  Vector B;
  /// Agents per node (agents are exchangeable, so counts suffice).
  std::vector<std::int64_t> agents;
  std::size_t step = 0;
  /// Agents created at the end of the last step, per node.
  std::vector<std::int64_t> created;

  [[nodiscard]] std::int64_t population() const;
};

[[nodiscard]] AbmState abm_initial_state(const AbmConfig& config);

/// Attractiveness A = A0 + B.
[[nodiscard]] Vector abm_attractiveness(const AbmConfig& config, const AbmState& state);

/// Probabilities of moving from `node` to each of its neighbours (zero
/// elsewhere); an isolated node keeps its agents.
[[nodiscard]] Vector abm_move_probabilities(const AbmConfig& config, const Vector& attractiveness, std::size_t node);

/// B(t + dt) from B(t) and this step's events.
[[nodiscard]] Vector abm_update_B(const AbmConfig& config, const Vector& B, const Vector& events);

/// One step: per-agent event draws at A(t), removal of agents with events,
/// movement of the others, B update with this step's events, then creation
/// of new agents. Returns the step's event counts.
std::vector<std::int64_t> abm_step(AbmState& state, const AbmConfig& config);

struct AbmSimulation {
  CountSeries counts;
  /// Agents alive after each step.
  std::vector<std::int64_t> population;
  /// Agents created per step and node.
  CountMatrix created;
};

[[nodiscard]] AbmSimulation simulate_abm(const AbmConfig& config, std::size_t steps);

}  // namespace hawkesnet
