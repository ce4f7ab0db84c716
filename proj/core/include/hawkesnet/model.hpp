#pragma once

#include <cstddef>
#include <cstdint>

#include "hawkesnet/types.hpp"

namespace hawkesnet {

/// K x m conditional intensities; row k is the intensity for bin k.
using IntensityPath = Matrix;

/// Recursive intensity. Row 0 of each segment equals mu; row k + 1 is
/// mu + (row k - mu) * gamma + alpha * counts(k). Per-pair decay is handled
/// with one decayed accumulator per (receiver, source) pair.
[[nodiscard]] IntensityPath intensity_path(const HawkesParams& params, const CountSeries& counts);

/// Direct summation of the decayed history for the intensity of bin k
/// (k == K gives the one-step-ahead forecast). O(K) per call.
[[nodiscard]] Vector closed_form_intensity(const HawkesParams& params, const CountSeries& counts,
                                           std::size_t k);

/// Poisson negative log-likelihood sum(lam dt - n log(lam dt)) with the
/// log(n!) constant dropped. Throws DomainError when lam dt <= 0 at a bin
/// with a positive count.
[[nodiscard]] double nll(const HawkesParams& params, const CountSeries& counts);
[[nodiscard]] Vector nll_per_node(const HawkesParams& params, const CountSeries& counts);
[[nodiscard]] Vector nll_per_node(const IntensityPath& lam, const CountSeries& counts);

/// Same as nll but including the log(n!) terms.
[[nodiscard]] double full_nll(const HawkesParams& params, const CountSeries& counts);

struct Simulation {
  CountSeries counts;
  IntensityPath intensity;
};

/// Alternates the intensity recursion with Poisson(lam dt) draws.
[[nodiscard]] Simulation simulate_hawkes(const HawkesParams& params, std::size_t steps,
                                         std::uint64_t seed, double dt = 1.0);

struct PowerIterationOptions {
  std::size_t max_iters = 200000;
  double tol = 1e-13;
};

/// Spectral radius of dt * diag(1 - gamma)^-1 * alpha, by power iteration
/// on the shifted matrix (M + I) from the normalized all-ones vector. For
/// per-pair decay the row maximum of gamma is used, which over-estimates
/// the radius.
[[nodiscard]] double stability_margin(const HawkesParams& params, double dt = 1.0,
                                      const PowerIterationOptions& options = {});

/// Stationary mean intensity (diag(1 - gamma) - alpha dt)^-1 diag(1 - gamma) mu.
[[nodiscard]] Vector stationary_mean(const HawkesParams& params, double dt = 1.0);

}  // namespace hawkesnet
