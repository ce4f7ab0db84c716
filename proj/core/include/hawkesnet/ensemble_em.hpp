#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hawkesnet/optimize.hpp"
#include "hawkesnet/particle.hpp"
#include "hawkesnet/state_space.hpp"
#include "hawkesnet/types.hpp"

namespace hawkesnet {

/// Search boxes for the numerically updated observation parameters.
struct ObservationBounds {
  double alpha_max = 1e6;
  double A_min = 0.0;
  double A_max = 1e6;
  double B_min = 0.0;
  double B_max = 1e6;

  void validate() const;
};

struct EmConfig {
  std::size_t particles = 400;
  /// Backward paths per iteration; defaults to particles / 4.
  std::optional<std::size_t> smoothing_paths;
  std::size_t max_iters = 16;
  /// Stop when ||theta' - theta|| / ||theta|| falls below tol.
  double tol = 1e-5;
  double resample_threshold = 0.5;
  std::uint64_t seed = 0;
  /// Fixed x_0 distribution; defaults to N(mu, eps dt) from the current iterate.
  std::optional<GaussianPrior> initial_prior;
  NelderMeadOptions optimizer{.max_evals = 400, .restarts = 3};
  ObservationBounds bounds;

  void validate() const;
  [[nodiscard]] std::size_t paths() const;
};

/// Monte Carlo estimate of the expected complete-data log-likelihood with
/// exact log-densities, split into its x_0, transition and count parts.
struct QValue {
  double initial = 0.0;
  double transition = 0.0;
  double counts = 0.0;

  /// Transition plus count parts; the initial term is reported only.
  [[nodiscard]] double total() const { return transition + counts; }
};

struct EmIteration {
  Vector params;
  /// Q at the iterate and at its update, on the same smoothed ensemble.
  double q_before = 0.0;
  double q_after = 0.0;
  double relative_change = 0.0;
  std::optional<double> relative_error;
  std::size_t resamples = 0;
  double log_evidence = 0.0;
};

struct EmResult {
  StateSpaceSpec spec;
  std::vector<EmIteration> trace;
  bool converged = false;
  std::optional<double> initial_relative_error;
  /// Paths from the last E-step with intensities under the final parameters.
  SmoothedPaths smoothed;
  std::vector<Matrix> smoothed_intensity;
  /// Per-step ensemble variances of the intensity (averaged over nodes).
  Vector filtered_intensity_variance;
  Vector smoothed_intensity_variance;
};

[[nodiscard]] TransitionModel make_transition(const StateSpaceSpec& spec);
[[nodiscard]] GaussianPrior default_initial_prior(const StateSpaceSpec& spec);

/// Poisson log-pmf of the count row t - 1 for each particle at time t.
[[nodiscard]] ObservationLogLik make_observation(const StateSpaceSpec& spec, const CountSeries& counts,
                                                 const Matrix& g);

[[nodiscard]] QValue eval_Q(const StateSpaceSpec& spec, const SmoothedPaths& smoothed,
                            const CountSeries& counts, const GaussianPrior& prior);

/// Closed-form update of mu, omega1, eps (and eta) by box-constrained
/// least squares on the smoothed transitions. A node keeps its current
/// values if the update would lower its transition term.
[[nodiscard]] StateSpaceSpec mstep_dynamics(const StateSpaceSpec& spec, const SmoothedPaths& smoothed);

/// Numerical update of alpha, omega2 (and A, B) maximizing the count term.
/// Network nodes are optimized independently. The current values are kept
/// when the optimizer does not improve on them.
[[nodiscard]] StateSpaceSpec mstep_observation(const StateSpaceSpec& spec, const SmoothedPaths& smoothed,
                                               const CountSeries& counts,
                                               const NelderMeadOptions& options = {},
                                               const ObservationBounds& bounds = {});

/// K x m intensity along each smoothed path.
[[nodiscard]] std::vector<Matrix> intensity_paths(const StateSpaceSpec& spec, const SmoothedPaths& smoothed,
                                                  const CountSeries& counts);

/// Minimizes ||X b - y||^2 over lower <= b <= upper from the normal
/// equations G = X'X, h = X'y, yy = y'y by enumerating active sets.
/// Returns the minimizer; `ssr` receives the residual sum of squares.
[[nodiscard]] Vector box_least_squares(const Matrix& G, const Vector& h, double yy, const Vector& lower,
                                       const Vector& upper, double* ssr = nullptr);

[[nodiscard]] double relative_error(const StateSpaceSpec& estimate, const StateSpaceSpec& truth);

[[nodiscard]] EmResult em_fit(const CountSeries& counts, const StateSpaceSpec& init, const EmConfig& config,
                              const std::optional<StateSpaceSpec>& truth = std::nullopt);

}  // namespace hawkesnet
