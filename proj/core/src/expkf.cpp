#include "hawkesnet/expkf.hpp"

#include <cmath>
#include <sstream>

#include "hawkesnet/log.hpp"
#include "hawkesnet/parallel.hpp"

namespace hawkesnet {

namespace {

using Eigen::Index;

constexpr double kPivotFloor = 1e-12;

void symmetrize(Matrix& P) { P = 0.5 * (P + P.transpose()).eval(); }

bool dense_update(Matrix& P, const Matrix& prior, const Vector& g, double count, double c) {
  Eigen::LLT<Matrix> prior_llt(prior);
  if (prior_llt.info() != Eigen::Success) return false;
  const Index n = prior.rows();
  Matrix precision = prior_llt.solve(Matrix::Identity(n, n));
  precision.noalias() += count * g * g.transpose();
  precision.diagonal() += c * g;
  symmetrize(precision);
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) return false;
  P = llt.solve(Matrix::Identity(n, n));
  return true;
}

}  // namespace

HawkesParams FilterState::params() const {
  const std::size_t m = nodes();
  const Index mm = static_cast<Index>(m);
  HawkesParams p;
  p.mu.resize(mm);
  p.alpha.resize(mm, mm);
  for (std::size_t i = 0; i < m; ++i) {
    const Vector b = block(i).array().exp();
    p.mu(static_cast<Index>(i)) = b(0);
    p.alpha.row(static_cast<Index>(i)) = b.tail(mm).transpose();
  }
  p.gamma = DecaySpec::scalar(gamma, m);
  return p;
}

void ExpkfConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(p0_scale > 0.0)) throw std::invalid_argument("p0 must be positive");
  if (!(q_scale >= 0.0)) throw std::invalid_argument("q must be non-negative");
  if (theta0 && !theta0->allFinite()) throw std::invalid_argument("initial mean must be finite");
}

FilterState expkf_init(const CountSeries& counts, const ExpkfConfig& config) {
  config.validate();
  const std::size_t m = counts.nodes();
  const Index mm = static_cast<Index>(m);
  const Index n = mm + 1;
  FilterState s;
  s.gamma = config.gamma;
  s.S = Vector::Zero(mm);
  if (config.theta0) {
    if (config.theta0->size() != mm * n) {
      throw std::invalid_argument("initial mean must have m(m+1) entries");
    }
    s.theta = *config.theta0;
  } else {
    s.theta.resize(mm * n);
    const Vector mean = counts.mean_counts();
    for (Index i = 0; i < mm; ++i) {
      s.theta(i * n) = std::log(std::max(0.5 * mean(i) / counts.dt, 1e-3));
      s.theta.segment(i * n + 1, mm).setConstant(std::log(0.1));
    }
  }
  s.P.assign(m, Matrix::Identity(n, n) * config.p0_scale);
  return s;
}

FilterState predict(FilterState state, double q_scale) {
  if (q_scale != 0.0) {
    for (Matrix& block : state.P) block.diagonal().array() += q_scale;
  }
  return state;
}

Vector update_S(const Vector& S, const Vector& counts, double gamma) { return gamma * S + counts; }

double state_intensity(const FilterState& state, std::size_t i) {
  const auto b = state.block(i);
  const Index m = static_cast<Index>(state.nodes());
  return std::exp(b(0)) + state.S.dot(b.tail(m).array().exp().matrix());
}

Vector grad_log_intensity(const FilterState& state, std::size_t i) {
  const auto b = state.block(i);
  if (!b.allFinite()) throw std::invalid_argument("non-finite filter mean");
  const Index m = static_cast<Index>(state.nodes());
  Vector g(m + 1);
  g(0) = std::exp(b(0));
  g.tail(m) = state.S.cwiseProduct(b.tail(m).array().exp().matrix());
  return g / g.sum();
}

bool expkf_block_update(Eigen::Ref<Vector> theta, Matrix& P, const Vector& g, double count,
                        double rate) {
  const double c = rate - count;
  const Matrix prior = P;
  bool ok = true;
  if (count != 0.0) {
    const Vector Pg = P * g;
    const double pivot = 1.0 + count * g.dot(Pg);
    if (pivot <= kPivotFloor) {
      ok = false;
    } else {
      P.noalias() -= (count / pivot) * Pg * Pg.transpose();
    }
  }
  if (ok && c != 0.0) {
    for (Index a = 0; a < g.size(); ++a) {
      const double coef = c * g(a);
      if (coef == 0.0) continue;
      const double pivot = 1.0 + coef * P(a, a);
      if (pivot <= kPivotFloor) {
        ok = false;
        break;
      }
      const Vector col = P.col(a);
      P.noalias() -= (coef / pivot) * col * col.transpose();
    }
  }
  bool updated = true;
  if (!ok) {
    P = prior;
    updated = dense_update(P, prior, g, count, c);
    if (!updated) P = prior;
  }
  symmetrize(P);
  theta.noalias() += P * g * (count - rate);
  return updated;
}

FilterState expkf_update(FilterState state, const Eigen::Ref<const Vector>& counts, double dt,
                         bool parallel) {
  const std::size_t m = state.nodes();
  if (static_cast<std::size_t>(counts.size()) != m) throw std::invalid_argument("count vector length must match node count");
  std::vector<char> skipped(m, 0);
  auto body = [&](std::size_t i) {
    const Vector g = grad_log_intensity(state, i);
    const double rate = state_intensity(state, i) * dt;
    if (!expkf_block_update(state.block(i), state.P[i], g, counts(static_cast<Index>(i)), rate)) {
      skipped[i] = 1;
    }
  };
  if (parallel) {
    parallel_for(m, body);
  } else {
    for (std::size_t i = 0; i < m; ++i) body(i);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (skipped[i]) {
      ++state.skipped_updates;
      log_debug("covariance update skipped for node " + std::to_string(i) + " at step " + std::to_string(state.k));
    }
  }
  ++state.k;
  return state;
}

double ExpkfResult::average_pred_loglik() const {
  if (pred_loglik.rows() == 0) return 0.0;
  return pred_loglik.sum() / static_cast<double>(pred_loglik.rows());
}

ExpkfResult run_filter(const CountSeries& counts, const ExpkfConfig& config) {
  counts.validate();
  ExpkfResult out;
  out.state = expkf_init(counts, config);
  const Index K = counts.counts.rows();
  const Index m = counts.counts.cols();
  const double dt = counts.dt;
  out.pred_loglik.resize(K, m);
  const std::vector<char> starts = counts.segment_start_mask();
  Vector row(m);
  for (Index k = 0; k < K; ++k) {
    if (starts[static_cast<std::size_t>(k)]) out.state.S.setZero();
    row = counts.counts.row(k).cast<double>().transpose();
    out.state = predict(std::move(out.state), config.q_scale);
    for (Index i = 0; i < m; ++i) {
      const double rate = state_intensity(out.state, static_cast<std::size_t>(i)) * dt;
      out.pred_loglik(k, i) = row(i) * std::log(rate) - rate - std::lgamma(row(i) + 1.0);
    }
    out.state = expkf_update(std::move(out.state), row, dt, config.parallel_nodes);
    out.state.S = update_S(out.state.S, row, out.state.gamma);
    if (config.trajectory_stride > 0 &&
        (static_cast<std::size_t>(k) % config.trajectory_stride == 0 || k == K - 1)) {
      out.steps.push_back(static_cast<std::size_t>(k));
      out.trajectory.push_back(out.state.theta);
    }
  }
  if (out.state.skipped_updates > 0) {
    std::ostringstream msg;
    msg << "ExPKF skipped " << out.state.skipped_updates
        << " covariance update(s) with an indefinite posterior precision";
    log_warn(msg.str());
  }
  return out;
}

DecayProfile profile_decay(const CountSeries& counts, const std::vector<double>& grid,
                           const ExpkfConfig& config) {
  if (grid.empty()) throw std::invalid_argument("decay grid is empty");
  for (double g : grid) {
    if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("decay grid values must lie in (0, 1)");
  }
  DecayProfile out;
  out.grid = grid;
  out.avg_pred_loglik.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t r) {
    ExpkfConfig c = config;
    c.gamma = grid[r];
    c.trajectory_stride = 0;
    c.parallel_nodes = false;
    out.avg_pred_loglik[r] = run_filter(counts, c).average_pred_loglik();
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < grid.size(); ++r) {
    const double a = out.avg_pred_loglik[r];
    const double b = out.avg_pred_loglik[best];
    if (a > b || (a == b && grid[r] < grid[best])) best = r;
  }
  out.best_gamma = grid[best];
  return out;
}

}  // namespace hawkesnet
