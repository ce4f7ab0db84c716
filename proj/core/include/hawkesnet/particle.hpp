#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "hawkesnet/types.hpp"

namespace hawkesnet {

/// Gaussian random-walk-type transition x_t = mean(x_{t-1}) + sd .* z.
struct TransitionModel {
  std::size_t dim = 1;
  /// Maps an N x d block of previous states to their N x d means.
  std::function<void(const Matrix& previous, Matrix& mean)> mean;
  Vector noise_sd;
};

/// Writes log p(y_t | x_t) for each particle row; t runs from 1 to K.
using ObservationLogLik = std::function<void(std::size_t t, const Matrix& states, Vector& loglik)>;

struct GaussianPrior {
  Vector mean;
  Vector sd;
};

struct ParticleOptions {
  std::size_t particles = 400;
  /// Resample when ESS < threshold * particles.
  double resample_threshold = 0.5;
  std::uint64_t seed = 0;
};

/// Weighted filtering clouds for t = 0..K (t = 0 is the prior draw).
struct ParticleCloud {
  std::vector<Matrix> states;
  /// (K + 1) x N normalized weights paired with `states`.
  Matrix weights;
  Vector ess;
  /// Steps whose cloud was resampled before propagation.
  std::vector<std::size_t> resampled;
  double log_evidence = 0.0;

  [[nodiscard]] std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
  [[nodiscard]] std::size_t particles() const {
    return states.empty() ? 0 : static_cast<std::size_t>(states.front().rows());
  }
};

/// Sampled trajectories, each (K + 1) x d.
struct SmoothedPaths {
  std::vector<Matrix> paths;
  /// Backward steps where every backward weight vanished and the filtering
  /// weights were used instead.
  std::size_t degenerate_steps = 0;

  [[nodiscard]] std::size_t size() const { return paths.size(); }
};

[[nodiscard]] double effective_sample_size(const Vector& weights);

/// Systematic resampling: one uniform offset u, points (u + n) / N.
/// Returns ancestor indices in non-decreasing order.
[[nodiscard]] std::vector<std::size_t> systematic_resample(const Vector& weights, double u);

/// Writes normalized weights and returns the log of the unnormalized sum.
/// Throws DomainError when no weight is finite.
double normalize_log_weights(const Vector& log_weights, Vector& weights);

/// Bootstrap particle filter. Resampling happens at the start of a step
/// when the previous cloud's ESS falls below the threshold; weights are
/// uniform afterwards.
[[nodiscard]] ParticleCloud particle_filter(const TransitionModel& transition, const GaussianPrior& prior,
                                            const ObservationLogLik& observe, std::size_t steps,
                                            const ParticleOptions& options);

/// Backward simulation smoother drawing `paths` trajectories from a
/// filtering cloud. Paths run in parallel with independent streams.
[[nodiscard]] SmoothedPaths backward_simulate(const ParticleCloud& cloud, const TransitionModel& transition,
                                              std::size_t paths, std::uint64_t seed);

/// Per-step ensemble variance of the state averaged over its dimensions,
/// for weighted clouds and for equally weighted paths.
[[nodiscard]] Vector cloud_variance(const ParticleCloud& cloud);
[[nodiscard]] Vector path_variance(const SmoothedPaths& smoothed);

}  // namespace hawkesnet
