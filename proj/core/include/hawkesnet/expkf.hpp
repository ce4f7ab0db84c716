#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hawkesnet/types.hpp"

namespace hawkesnet {

/// Filter state for the log-parameters of a scalar-decay Hawkes model.
/// Block i of theta is (log mu_i, log alpha_i1, ..., log alpha_im) and has
/// its own (m + 1) x (m + 1) covariance; cross-node covariances are not
/// represented.
struct FilterState {
  Vector theta;
  std::vector<Matrix> P;
  /// Decayed source counts through the previous bin.
  Vector S;
  std::size_t k = 0;
  double gamma = 0.15;
  /// Node updates whose covariance step was skipped (indefinite precision).
  std::size_t skipped_updates = 0;

  [[nodiscard]] std::size_t nodes() const { return S.size() > 0 ? static_cast<std::size_t>(S.size()) : 0; }
  [[nodiscard]] auto block(std::size_t i) const {
    const auto n = static_cast<Eigen::Index>(nodes() + 1);
    return theta.segment(static_cast<Eigen::Index>(i) * n, n);
  }
  [[nodiscard]] auto block(std::size_t i) {
    const auto n = static_cast<Eigen::Index>(nodes() + 1);
    return theta.segment(static_cast<Eigen::Index>(i) * n, n);
  }

  /// Exponentiated mean as Hawkes parameters.
  [[nodiscard]] HawkesParams params() const;
};

struct ExpkfConfig {
  double gamma = 0.15;
  double p0_scale = 1e-4;
  double q_scale = 1e-5;
  /// Initial mean; defaults to log(max(half node mean / dt, 1e-3)) for the
  /// baselines and log(0.1) for the excitations.
  std::optional<Vector> theta0;
  /// Record the mean every `trajectory_stride` steps (0 disables it).
  std::size_t trajectory_stride = 1;
  /// Process node blocks in parallel.
  bool parallel_nodes = true;

  void validate() const;
};

[[nodiscard]] FilterState expkf_init(const CountSeries& counts, const ExpkfConfig& config);

/// Random-walk prediction: adds q_scale to the diagonal of every block.
[[nodiscard]] FilterState predict(FilterState state, double q_scale);

/// S <- gamma * S + counts.
[[nodiscard]] Vector update_S(const Vector& S, const Vector& counts, double gamma);

/// Intensity of node i at the state's mean.
[[nodiscard]] double state_intensity(const FilterState& state, std::size_t i);

/// Nonzero block of d log(lambda_i) / d theta: the shares
/// (mu, S_1 alpha_i1, ..., S_m alpha_im) / lambda_i.
[[nodiscard]] Vector grad_log_intensity(const FilterState& state, std::size_t i);

/// Poisson update of one node block. `P` is the predicted covariance and is
/// overwritten with the posterior; returns false when the posterior
/// precision is indefinite and the covariance was left unchanged.
bool expkf_block_update(Eigen::Ref<Vector> theta, Matrix& P, const Vector& g, double count,
                        double rate);

/// Updates every node block with the counts of one bin. S must hold the
/// decayed counts through the previous bin; it is not advanced here.
[[nodiscard]] FilterState expkf_update(FilterState state, const Eigen::Ref<const Vector>& counts,
                                       double dt, bool parallel = true);

struct ExpkfResult {
  FilterState state;
  /// Recorded steps and the mean after each of them.
  std::vector<std::size_t> steps;
  std::vector<Vector> trajectory;
  /// K x m one-step-ahead predictive log-probabilities (full Poisson pmf).
  Matrix pred_loglik;

  [[nodiscard]] double average_pred_loglik() const;
};

/// Per bin: predict, score the bin under the previous estimate, update,
/// then advance S. S is reset to zero at segment starts.
[[nodiscard]] ExpkfResult run_filter(const CountSeries& counts, const ExpkfConfig& config);

struct DecayProfile {
  double best_gamma = 0.0;
  std::vector<double> grid;
  std::vector<double> avg_pred_loglik;
};

/// Runs the filter for each grid value (in parallel) and returns the decay
/// with the largest average predictive log-likelihood; ties go to the
/// smaller decay.
[[nodiscard]] DecayProfile profile_decay(const CountSeries& counts, const std::vector<double>& grid,
                                         const ExpkfConfig& config);

}  // namespace hawkesnet
