#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hawkesnet/types.hpp"

namespace hawkesnet {

/// Decayed source histories for a fixed decay vector (one rate per source).
/// R(k, j) = sum_{l<k} g^(k-l-1) n(l, j) and
/// T(k, j) = sum_{l<k} (k-l-1) g^(k-l-1) n(l, j), restarted at each segment.
struct MmAccumulators {
  Matrix R;
  Matrix T;
  /// Counts of sources that excite at least two later bins of their segment.
  Vector interior;
  /// Counts in the last exciting bin of each segment (one later bin).
  Vector last;
  /// Exact column sums of R.
  Vector r_total;
};

[[nodiscard]] MmAccumulators mm_precompute(const CountSeries& counts, const Vector& source_gamma);

enum class MmMode { fixed_decay, full_decay };

/// Quadratic root used by the full-decay update. `conventional` is
/// (-B + sqrt(B^2 + 4AC)) / (2A); `verbatim` is -B + sqrt(B^2 + 4AC) / (2A),
/// which can go negative.
enum class RootForm { conventional, verbatim };

/// Equation solved for gamma under a beta prior. `quartic` is
/// -D x^4 + (D + E) x^2 + (c - d - E) x - a = 0; `stationary` is the cubic
/// D x^3 - (D + E + c + d - 2) x + (E + c - 1) = 0 obtained by differentiating
/// the regularized surrogate.
enum class BetaSolver { quartic, stationary };

/// Gamma prior on mu. Unset fields follow the default rule
/// a = 0.5 * mean_count * K, b = K * dt.
struct GammaPrior {
  std::optional<double> a;
  std::optional<double> b;
};

/// Beta prior on each gamma. Unset fields default to c = 2.5 K, d = 10.25 K.
struct BetaPrior {
  std::optional<double> c;
  std::optional<double> d;
};

struct MmConfig {
  MmMode mode = MmMode::fixed_decay;
  double gamma = 0.15;
  std::optional<GammaPrior> gamma_prior;
  std::optional<BetaPrior> beta_prior;
  std::size_t max_iters = 500;
  double tol = 1e-6;
  std::optional<HawkesParams> init;
  /// Replace the small-gamma denominator with dt * sum_k R(k, j).
  bool exact_denominator = false;
  RootForm root_form = RootForm::conventional;
  BetaSolver beta_solver = BetaSolver::quartic;
  /// Constant term of the quartic; defaults to the node's gamma-prior a, else 1.
  std::optional<double> quartic_a;
  bool keep_snapshots = false;

  void validate() const;
};

/// Per-node constants resolved from an MmConfig and the data.
struct MmStepOptions {
  bool exact_denominator = false;
  RootForm root_form = RootForm::conventional;
  BetaSolver beta_solver = BetaSolver::quartic;
  std::optional<Vector> prior_a;
  std::optional<Vector> prior_b;
  std::optional<double> beta_c;
  std::optional<double> beta_d;
  Vector quartic_a;
};

[[nodiscard]] MmStepOptions resolve_step_options(const MmConfig& config, const CountSeries& counts);

[[nodiscard]] HawkesParams mm_step_fixed(const HawkesParams& params, const CountSeries& counts,
                                         const MmStepOptions& options = {});
[[nodiscard]] HawkesParams mm_step_full(const HawkesParams& params, const CountSeries& counts,
                                        const MmStepOptions& options = {});

/// (mu_weighted + a - 1) / (exposure + b) where mu_weighted is
/// sum_k mu n_k / lam_k and exposure is K dt. Non-positive results are
/// clamped to the smallest positive normal double with a warning.
[[nodiscard]] double regularized_mu_update(double mu_weighted, double exposure, double a, double b);

/// Root in (0, 1) of -D x^4 + (D + E) x^2 + (c - d - E) x - a. Among several
/// roots the one maximizing the regularized surrogate
/// -(D/2)(1 + x)^2 + (E + c - 1) log x + (d - 1) log(1 - x) is returned;
/// with no root, the better of {1e-6, 1 - 1e-6} is returned with a warning.
[[nodiscard]] double solve_gamma_quartic(double D, double E, double c, double d, double a);

/// Same selection rule applied to the stationary cubic of the surrogate.
[[nodiscard]] double solve_gamma_stationary(double D, double E, double c, double d);

/// All real roots in (0, 1) of the polynomial sum_p coeffs[p] x^p.
[[nodiscard]] std::vector<double> unit_interval_roots(const std::vector<double>& coeffs);

/// Jensen surrogate of the fixed-decay negative log-likelihood at theta,
/// built around `current`. Equals nll(current) when theta == current.
[[nodiscard]] double mm_surrogate_fixed(const HawkesParams& theta, const HawkesParams& current,
                                        const CountSeries& counts);

/// Negative log prior implied by the resolved options (0 without priors).
[[nodiscard]] double mm_penalty(const HawkesParams& params, const MmStepOptions& options);

/// Objective (negative log-likelihood plus negative log prior) and plain
/// negative log-likelihood after each iteration, preceded by the values at
/// the starting point.
struct MmTrace {
  double initial_objective = 0.0;
  double initial_nll = 0.0;
  std::vector<double> objective;
  std::vector<double> nll;
  std::vector<HawkesParams> snapshots;
  bool converged = false;
  std::size_t iterations = 0;
  /// Iterations whose objective rose, and the largest relative rise.
  std::size_t increases = 0;
  double max_increase = 0.0;
};

struct MmResult {
  HawkesParams params;
  MmTrace trace;
};

/// Default starting point: mu = max(half the node mean / dt, 1e-3),
/// alpha = 0.1, gamma from the config.
[[nodiscard]] HawkesParams mm_default_init(const CountSeries& counts, const MmConfig& config);

[[nodiscard]] MmResult mm_fit(const CountSeries& counts, const MmConfig& config);

}  // namespace hawkesnet
