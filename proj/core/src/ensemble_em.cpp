#include "hawkesnet/ensemble_em.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hawkesnet/log.hpp"
#include "hawkesnet/metrics.hpp"
#include "hawkesnet/parallel.hpp"
#include "hawkesnet/rng.hpp"

namespace hawkesnet {

namespace {

using Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEdge = 1e-9;
constexpr double kFloor = 1e-12;

double safe_exp(double v) { return std::exp(std::clamp(v, -700.0, 700.0)); }

double log_pmf(double n, double mean, double lgamma_n) { return n * std::log(mean) - mean - lgamma_n; }

// Regression of one node's transitions on v = [x_i, s_i, 1, y] with
// s_i the sum of the other nodes' states: M = sum v v'.
using Moments = Eigen::Matrix4d;

struct DynamicsFit {
  double mu;
  double omega1;
  double eta;
  double ssr;
};

double ssr_at(const Moments& M, const Eigen::Vector3d& a) {
  Eigen::Vector4d w;
  w << -a, 1.0;
  return std::max(w.dot(M * w), 0.0);
}

Eigen::Vector3d coefficients(double beta, double eta, double mu) {
  return {beta * (1.0 - eta), beta * eta, (1.0 - beta) * mu};
}

// Free variables b enter the coefficients as a = a0 + A b.
Vector solve_affine(const Moments& M, const Eigen::Vector3d& a0, const Matrix& A, const Vector& lower,
                    const Vector& upper, double* ssr) {
  Eigen::Vector4d w0;
  w0 << -a0, 1.0;
  Matrix W = Matrix::Zero(4, A.cols());
  W.topRows(3) = -A;
  Matrix G = W.transpose() * M * W;
  const Vector h = -W.transpose() * M * w0;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(G, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() > 1e-12 * top)) {
    log_warn("transition regression is rank deficient; adding a 1e-10 ridge");
    G.diagonal().array() += 1e-10 * std::max(top, 1.0);
  }
  const double yy = w0.dot(M * w0);
  return box_least_squares(G, h, yy, lower, upper, ssr);
}

DynamicsFit fit_node_dynamics(const StateSpaceSpec& spec, std::size_t node, const Moments& M) {
  const Index i = static_cast<Index>(node);
  const bool network = spec.kind == ModelKind::lgcp_network;
  const bool free_mu = spec.estimate.mu;
  const bool free_omega = spec.estimate.omega1;
  const bool free_eta = network && spec.estimate.eta;
  const double dt = spec.dt;
  double mu = spec.mu(i);
  double beta = 1.0 - spec.omega1(i) * dt;
  double eta = spec.eta(i);
  const double beta_lo = kEdge;
  const double beta_hi = 1.0 - kEdge;

  if (free_mu && free_omega && free_eta) {
    Vector lo(3), hi(3);
    lo << 0.0, 0.0, kFloor;
    hi << 1.0, 1.0, kInf;
    double ssr = 0.0;
    const Vector b = solve_affine(M, Eigen::Vector3d::Zero(), Matrix::Identity(3, 3), lo, hi, &ssr);
    const double sum = b(0) + b(1);
    if (sum > 0.0) eta = std::min(b(1) / sum, beta_hi);
    beta = std::clamp(sum, beta_lo, beta_hi);
    mu = std::max(b(2), kFloor) / (1.0 - beta);
  } else if (free_mu && free_omega) {
    Matrix A = Matrix::Zero(3, 2);
    A(0, 0) = 1.0 - eta;
    A(1, 0) = eta;
    A(2, 1) = 1.0;
    Vector lo(2), hi(2);
    lo << beta_lo, kFloor;
    hi << beta_hi, kInf;
    const Vector b = solve_affine(M, Eigen::Vector3d::Zero(), A, lo, hi, nullptr);
    beta = b(0);
    mu = b(1) / (1.0 - beta);
  } else if (free_mu && free_eta) {
    Matrix A = Matrix::Zero(3, 2);
    A(0, 0) = -beta;
    A(1, 0) = beta;
    A(2, 1) = 1.0;
    Vector lo(2), hi(2);
    lo << 0.0, kFloor;
    hi << beta_hi, kInf;
    const Vector b = solve_affine(M, Eigen::Vector3d(beta, 0.0, 0.0), A, lo, hi, nullptr);
    eta = b(0);
    mu = b(1) / (1.0 - beta);
  } else if (free_mu) {
    Matrix A = Matrix::Zero(3, 1);
    A(2, 0) = 1.0;
    Vector lo = Vector::Constant(1, kFloor), hi = Vector::Constant(1, kInf);
    const Vector b = solve_affine(M, Eigen::Vector3d(beta * (1.0 - eta), beta * eta, 0.0), A, lo, hi, nullptr);
    mu = b(0) / (1.0 - beta);
  } else if (free_omega && free_eta) {
    Matrix A(3, 2);
    A << 1.0, 0.0, 0.0, 1.0, -mu, -mu;
    Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
    const Vector b = solve_affine(M, Eigen::Vector3d(0.0, 0.0, mu), A, lo, hi, nullptr);
    const double sum = b(0) + b(1);
    if (sum > 0.0) eta = std::min(b(1) / sum, beta_hi);
    beta = std::clamp(sum, beta_lo, beta_hi);
  } else if (free_omega) {
    Matrix A(3, 1);
    A << 1.0 - eta, eta, -mu;
    Vector lo = Vector::Constant(1, beta_lo), hi = Vector::Constant(1, beta_hi);
    beta = solve_affine(M, Eigen::Vector3d(0.0, 0.0, mu), A, lo, hi, nullptr)(0);
  } else if (free_eta) {
    Matrix A(3, 1);
    A << -beta, beta, 0.0;
    Vector lo = Vector::Zero(1), hi = Vector::Constant(1, beta_hi);
    eta = solve_affine(M, Eigen::Vector3d(beta, 0.0, (1.0 - beta) * mu), A, lo, hi, nullptr)(0);
  }
  const double ssr = ssr_at(M, coefficients(beta, eta, mu));
  return {free_mu ? mu : spec.mu(i), free_omega ? (1.0 - beta) / dt : spec.omega1(i), free_eta ? eta : spec.eta(i),
          ssr};
}

double transition_score(double ssr, double epsilon, double observations, double dt) {
  return -observations * std::log(epsilon) - ssr / (2.0 * epsilon * epsilon * dt);
}

// Count part of Q for one node as a function of its observation parameters.
class NodeCountObjective {
 public:
  NodeCountObjective(const StateSpaceSpec& spec, std::size_t node, const SmoothedPaths& smoothed,
                     const CountSeries& counts)
      : spec_(spec), node_(static_cast<Index>(node)), counts_(counts) {
    const Index K = counts.counts.rows();
    paths_ = static_cast<Index>(smoothed.size());
    starts_ = counts.segment_start_mask();
    n_.resize(K);
    for (Index r = 0; r < K; ++r) n_(r) = static_cast<double>(counts.counts(r, node_));
    if (spec.kind == ModelKind::lgcp_logistic) {
      E_.resize(paths_, K);
      for (Index l = 0; l < paths_; ++l) {
        for (Index r = 0; r < K; ++r) E_(l, r) = safe_exp(smoothed.paths[static_cast<std::size_t>(l)](r + 1, node_));
      }
    } else {
      E_sum_ = Vector::Zero(K);
      for (Index r = 0; r < K; ++r) {
        if (n_(r) > 0.0) positive_.push_back(r);
      }
      E_.resize(paths_, static_cast<Index>(positive_.size()));
      for (Index l = 0; l < paths_; ++l) {
        const Matrix& p = smoothed.paths[static_cast<std::size_t>(l)];
        for (Index r = 0; r < K; ++r) E_sum_(r) += safe_exp(p(r + 1, node_));
        for (std::size_t q = 0; q < positive_.size(); ++q) {
          E_(l, static_cast<Index>(q)) = safe_exp(p(positive_[q] + 1, node_));
        }
      }
    }
  }

  // Mean over paths of sum_r n log(lambda) - lambda dt (constants dropped).
  [[nodiscard]] double value(const Eigen::RowVectorXd& alpha_row, double omega2, double A, double B) const {
    const Index K = n_.size();
    Vector drive = counts_.counts.cast<double>() * alpha_row.transpose();
    Vector g(K);
    const double keep = 1.0 - omega2 * spec_.dt;
    for (Index r = 0; r < K; ++r) {
      g(r) = (r == 0 || starts_[static_cast<std::size_t>(r)]) ? 0.0 : keep * g(r - 1) + drive(r - 1);
    }
    const double dt = spec_.dt;
    double total = 0.0;
    if (spec_.kind == ModelKind::lgcp_logistic) {
      for (Index l = 0; l < paths_; ++l) {
        for (Index r = 0; r < K; ++r) {
          const double lam = A / (1.0 + B * safe_exp(-(E_(l, r) + g(r))));
          total += (n_(r) > 0.0 ? n_(r) * std::log(lam) : 0.0) - lam * dt;
        }
      }
      return total / static_cast<double>(paths_);
    }
    for (std::size_t q = 0; q < positive_.size(); ++q) {
      const Index r = positive_[q];
      double s = 0.0;
      for (Index l = 0; l < paths_; ++l) s += std::log(E_(l, static_cast<Index>(q)) + g(r));
      total += n_(r) * s;
    }
    total -= dt * (E_sum_.sum() + static_cast<double>(paths_) * g.sum());
    return total / static_cast<double>(paths_);
  }

 private:
  const StateSpaceSpec& spec_;
  Index node_;
  const CountSeries& counts_;
  Index paths_ = 0;
  std::vector<char> starts_;
  Vector n_;
  Matrix E_;
  Vector E_sum_;
  std::vector<Index> positive_;
};

struct ObservationUpdate {
  Eigen::RowVectorXd alpha;
  double omega2;
  double A;
  double B;
};

ObservationUpdate update_node_observation(const StateSpaceSpec& spec, std::size_t node,
                                          const SmoothedPaths& smoothed, const CountSeries& counts,
                                          const NelderMeadOptions& options, const ObservationBounds& bounds) {
  const Index i = static_cast<Index>(node);
  const Index m = spec.mu.size();
  const bool logistic = spec.kind == ModelKind::lgcp_logistic;
  ObservationUpdate current{spec.alpha.row(i), spec.omega2(i), spec.A, spec.B};
  const bool free_A = logistic && spec.estimate.A;
  const bool free_B = logistic && spec.estimate.B;
  const Index free = (spec.estimate.alpha ? m : 0) + (spec.estimate.omega2 ? 1 : 0) + (free_A ? 1 : 0) +
                     (free_B ? 1 : 0);
  if (free == 0) return current;

  const NodeCountObjective objective(spec, node, smoothed, counts);
  Vector x0(free), lower(free), upper(free);
  Index k = 0;
  if (spec.estimate.alpha) {
    for (Index j = 0; j < m; ++j, ++k) {
      x0(k) = std::clamp(current.alpha(j), 1e-6, bounds.alpha_max * (1.0 - 1e-9));
      lower(k) = 0.0;
      upper(k) = bounds.alpha_max;
    }
  }
  if (spec.estimate.omega2) {
    x0(k) = current.omega2;
    lower(k) = 0.0;
    upper(k++) = 1.0 / spec.dt;
  }
  auto inside = [](double v, double lo, double hi) {
    const double margin = 1e-6 * (hi - lo);
    return std::clamp(v, lo + margin, hi - margin);
  };
  if (free_A) {
    x0(k) = inside(current.A, bounds.A_min, bounds.A_max);
    lower(k) = bounds.A_min;
    upper(k++) = bounds.A_max;
  }
  if (free_B) {
    x0(k) = inside(current.B, bounds.B_min, bounds.B_max);
    lower(k) = bounds.B_min;
    upper(k++) = bounds.B_max;
  }
  auto unpack = [&](const Vector& x) {
    ObservationUpdate u = current;
    Index p = 0;
    if (spec.estimate.alpha) {
      u.alpha = x.segment(0, m).transpose();
      p = m;
    }
    if (spec.estimate.omega2) u.omega2 = x(p++);
    if (free_A) u.A = x(p++);
    if (free_B) u.B = x(p++);
    return u;
  };
  auto f = [&](const Vector& x) {
    const ObservationUpdate u = unpack(x);
    return -objective.value(u.alpha, u.omega2, u.A, u.B);
  };
  const MinimizeResult result = nelder_mead(f, x0, lower, upper, options);
  const double incumbent = objective.value(current.alpha, current.omega2, current.A, current.B);
  if (-result.value > incumbent) return unpack(result.x);
  return current;
}

Matrix transition_means(const StateSpaceSpec& spec, const Matrix& previous) {
  const Index m = spec.mu.size();
  const double dt = spec.dt;
  Matrix mixed = previous;
  if (spec.kind == ModelKind::lgcp_network) {
    const Vector total = previous.rowwise().sum();
    for (Index i = 0; i < m; ++i) {
      mixed.col(i) = (1.0 - spec.eta(i)) * previous.col(i) + spec.eta(i) * (total - previous.col(i));
    }
  }
  Matrix out(previous.rows(), m);
  for (Index i = 0; i < m; ++i) {
    out.col(i) = mixed.col(i) * (1.0 - spec.omega1(i) * dt);
    out.col(i).array() += spec.omega1(i) * spec.mu(i) * dt;
  }
  return out;
}

}  // namespace

void ObservationBounds::validate() const {
  if (!(alpha_max > 0.0)) throw std::invalid_argument("alpha bound must be positive");
  if (!(A_min >= 0.0 && A_max > A_min)) throw std::invalid_argument("A bounds must satisfy 0 <= min < max");
  if (!(B_min >= 0.0 && B_max > B_min)) throw std::invalid_argument("B bounds must satisfy 0 <= min < max");
}

void EmConfig::validate() const {
  if (particles < 2) throw std::invalid_argument("ensemble EM needs at least two particles");
  if (paths() < 1) throw std::invalid_argument("smoothing path count must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  if (!(tol >= 0.0)) throw std::invalid_argument("tol must be non-negative");
  if (paths() > particles) throw std::invalid_argument("smoothing paths cannot exceed particles");
  if (!(resample_threshold > 0.0 && resample_threshold <= 1.0)) {
    throw std::invalid_argument("resample threshold must lie in (0, 1]");
  }
  bounds.validate();
}

std::size_t EmConfig::paths() const { return smoothing_paths ? *smoothing_paths : std::max<std::size_t>(1, particles / 4); }

TransitionModel make_transition(const StateSpaceSpec& spec) {
  TransitionModel t;
  t.dim = spec.nodes();
  t.noise_sd = spec.epsilon * std::sqrt(spec.dt);
  t.mean = [spec](const Matrix& previous, Matrix& mean) { mean = transition_means(spec, previous); };
  return t;
}

GaussianPrior default_initial_prior(const StateSpaceSpec& spec) {
  return {spec.mu, (spec.epsilon * spec.dt).array().sqrt().matrix()};
}

ObservationLogLik make_observation(const StateSpaceSpec& spec, const CountSeries& counts, const Matrix& g) {
  const Index m = spec.mu.size();
  if (counts.counts.cols() != m || g.rows() != counts.counts.rows() || g.cols() != m) {
    throw std::invalid_argument("counts and excitation paths do not match the model");
  }
  return [spec, &counts, g, m](std::size_t t, const Matrix& states, Vector& loglik) {
    constexpr Index chunk = 512;
    const Index r = static_cast<Index>(t) - 1;
    const Index rows = states.rows();
    const std::size_t chunks = static_cast<std::size_t>((rows + chunk - 1) / chunk);
    parallel_for(chunks, [&](std::size_t c) {
      const Index end = std::min<Index>(rows, (static_cast<Index>(c) + 1) * chunk);
      for (Index p = static_cast<Index>(c) * chunk; p < end; ++p) {
        double total = 0.0;
        for (Index i = 0; i < m; ++i) {
          const double n = static_cast<double>(counts.counts(r, i));
          const double mean = link(spec, static_cast<std::size_t>(i), states(p, i), g(r, i)) * spec.dt;
          total += n > 0.0 ? log_pmf(n, mean, std::lgamma(n + 1.0)) : -mean;
        }
        loglik(p) = total;
      }
    });
  };
}

QValue eval_Q(const StateSpaceSpec& spec, const SmoothedPaths& smoothed, const CountSeries& counts,
              const GaussianPrior& prior) {
  spec.validate();
  if (smoothed.paths.empty()) throw std::invalid_argument("no smoothed paths");
  const Index K = counts.counts.rows();
  const Index m = spec.mu.size();
  if (smoothed.paths.front().rows() != K + 1 || smoothed.paths.front().cols() != m) {
    throw std::invalid_argument("smoothed paths do not match the counts");
  }
  const Matrix g = g_paths(spec, counts);
  Matrix lg(K, m);
  for (Index r = 0; r < K; ++r) {
    for (Index i = 0; i < m; ++i) lg(r, i) = std::lgamma(static_cast<double>(counts.counts(r, i)) + 1.0);
  }
  const Vector var = (spec.epsilon.array().square() * spec.dt).matrix();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  QValue q;
  for (const Matrix& path : smoothed.paths) {
    for (Index i = 0; i < m; ++i) {
      const double sd = prior.sd(i);
      if (sd > 0.0) {
        const double z = (path(0, i) - prior.mean(i)) / sd;
        q.initial += -0.5 * log2pi - std::log(sd) - 0.5 * z * z;
      }
    }
    const Matrix means = transition_means(spec, path.topRows(K));
    for (Index r = 0; r < K; ++r) {
      for (Index i = 0; i < m; ++i) {
        const double resid = path(r + 1, i) - means(r, i);
        q.transition += -0.5 * (log2pi + std::log(var(i))) - 0.5 * resid * resid / var(i);
        const double mean = link(spec, static_cast<std::size_t>(i), path(r + 1, i), g(r, i)) * spec.dt;
        const auto n = static_cast<double>(counts.counts(r, i));
        if (!(mean > 0.0) && n > 0.0) {
          throw DomainError("intensity is not positive at row " + std::to_string(r) + ", node " + std::to_string(i));
        }
        q.counts += n > 0.0 ? log_pmf(n, mean, lg(r, i)) : -mean;
      }
    }
  }
  const double n = static_cast<double>(smoothed.size());
  q.initial /= n;
  q.transition /= n;
  q.counts /= n;
  return q;
}

Vector box_least_squares(const Matrix& G, const Vector& h, double yy, const Vector& lower, const Vector& upper,
                         double* ssr) {
  const Index p = h.size();
  if (G.rows() != p || G.cols() != p || lower.size() != p || upper.size() != p) {
    throw std::invalid_argument("box least squares dimensions do not match");
  }
  if (p > 12) throw std::invalid_argument("box least squares supports at most 12 variables");
  Vector best;
  double best_ssr = kInf;
  std::size_t combos = 1;
  for (Index k = 0; k < p; ++k) combos *= 3;
  Vector b(p);
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    std::vector<Index> free_idx;
    bool usable = true;
    for (Index k = 0; k < p; ++k, c /= 3) {
      const std::size_t state = c % 3;
      if (state == 0) {
        free_idx.push_back(k);
      } else {
        const double bound = state == 1 ? lower(k) : upper(k);
        if (!std::isfinite(bound)) usable = false;
        b(k) = bound;
      }
    }
    if (!usable) continue;
    if (!free_idx.empty()) {
      const Index f = static_cast<Index>(free_idx.size());
      Matrix Gf(f, f);
      Vector rhs(f);
      for (Index a = 0; a < f; ++a) {
        rhs(a) = h(free_idx[static_cast<std::size_t>(a)]);
        for (Index k = 0; k < p; ++k) {
          if (std::find(free_idx.begin(), free_idx.end(), k) == free_idx.end()) {
            rhs(a) -= G(free_idx[static_cast<std::size_t>(a)], k) * b(k);
          }
        }
        for (Index e = 0; e < f; ++e) Gf(a, e) = G(free_idx[static_cast<std::size_t>(a)], free_idx[static_cast<std::size_t>(e)]);
      }
      const Eigen::LDLT<Matrix> ldlt(Gf);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
      const Vector sol = ldlt.solve(rhs);
      if (!sol.allFinite()) continue;
      bool feasible = true;
      for (Index a = 0; a < f; ++a) {
        const Index k = free_idx[static_cast<std::size_t>(a)];
        if (sol(a) < lower(k) || sol(a) > upper(k)) feasible = false;
        b(k) = sol(a);
      }
      if (!feasible) continue;
    }
    const double value = yy - 2.0 * h.dot(b) + b.dot(G * b);
    if (value < best_ssr) {
      best_ssr = value;
      best = b;
    }
  }
  if (best.size() == 0) throw DomainError("box least squares found no feasible solution");
  if (ssr) *ssr = std::max(best_ssr, 0.0);
  return best;
}

StateSpaceSpec mstep_dynamics(const StateSpaceSpec& spec, const SmoothedPaths& smoothed) {
  spec.validate();
  if (smoothed.paths.empty()) throw std::invalid_argument("no smoothed paths");
  const Index m = spec.mu.size();
  const Index K = smoothed.paths.front().rows() - 1;
  std::vector<Moments> moments(static_cast<std::size_t>(m), Moments::Zero());
  for (const Matrix& path : smoothed.paths) {
    const Vector total = path.rowwise().sum();
    for (Index i = 0; i < m; ++i) {
      Moments& M = moments[static_cast<std::size_t>(i)];
      for (Index t = 1; t <= K; ++t) {
        const Eigen::Vector4d v(path(t - 1, i), total(t - 1) - path(t - 1, i), 1.0, path(t, i));
        M.noalias() += v * v.transpose();
      }
    }
  }
  const double observations = static_cast<double>(smoothed.size()) * static_cast<double>(K);
  StateSpaceSpec out = spec;
  for (Index i = 0; i < m; ++i) {
    const Moments& M = moments[static_cast<std::size_t>(i)];
    const DynamicsFit fit = fit_node_dynamics(spec, static_cast<std::size_t>(i), M);
    const double eps = spec.estimate.epsilon ? std::sqrt(std::max(fit.ssr / (observations * spec.dt), kFloor))
                                             : spec.epsilon(i);
    const double old_ssr = ssr_at(M, coefficients(1.0 - spec.omega1(i) * spec.dt, spec.eta(i), spec.mu(i)));
    const double before = transition_score(old_ssr, spec.epsilon(i), observations, spec.dt);
    const double after = transition_score(fit.ssr, eps, observations, spec.dt);
    if (!(after >= before)) continue;
    out.mu(i) = fit.mu;
    out.omega1(i) = fit.omega1;
    out.eta(i) = fit.eta;
    out.epsilon(i) = eps;
  }
  return out;
}

StateSpaceSpec mstep_observation(const StateSpaceSpec& spec, const SmoothedPaths& smoothed, const CountSeries& counts,
                                 const NelderMeadOptions& options, const ObservationBounds& bounds) {
  spec.validate();
  bounds.validate();
  if (smoothed.paths.empty()) throw std::invalid_argument("no smoothed paths");
  const std::size_t m = spec.nodes();
  std::vector<ObservationUpdate> updates(m);
  parallel_for(m, [&](std::size_t i) { updates[i] = update_node_observation(spec, i, smoothed, counts, options, bounds); });
  StateSpaceSpec out = spec;
  for (std::size_t i = 0; i < m; ++i) {
    const Index ii = static_cast<Index>(i);
    out.alpha.row(ii) = updates[i].alpha;
    out.omega2(ii) = updates[i].omega2;
  }
  if (spec.kind == ModelKind::lgcp_logistic) {
    out.A = updates[0].A;
    out.B = updates[0].B;
  }
  return out;
}

std::vector<Matrix> intensity_paths(const StateSpaceSpec& spec, const SmoothedPaths& smoothed,
                                    const CountSeries& counts) {
  const Matrix g = g_paths(spec, counts);
  const Index K = g.rows();
  const Index m = g.cols();
  std::vector<Matrix> out;
  out.reserve(smoothed.size());
  for (const Matrix& path : smoothed.paths) {
    Matrix lam(K, m);
    for (Index r = 0; r < K; ++r) {
      for (Index i = 0; i < m; ++i) lam(r, i) = link(spec, static_cast<std::size_t>(i), path(r + 1, i), g(r, i));
    }
    out.push_back(std::move(lam));
  }
  return out;
}

double relative_error(const StateSpaceSpec& estimate, const StateSpaceSpec& truth) {
  return relative_error(estimate.parameter_vector(), truth.parameter_vector());
}

EmResult em_fit(const CountSeries& counts, const StateSpaceSpec& init, const EmConfig& config,
                const std::optional<StateSpaceSpec>& truth) {
  config.validate();
  counts.validate();
  init.validate();
  if (counts.nodes() != init.nodes()) throw std::invalid_argument("counts do not match the model's node count");
  if (std::abs(counts.dt - init.dt) > 1e-12 * std::max(1.0, init.dt)) {
    throw std::invalid_argument("counts dt differs from the model dt");
  }
  const std::size_t K = counts.steps();
  const double bytes = 16.0 * static_cast<double>(K + 1) * static_cast<double>(config.particles) *
                       static_cast<double>(init.nodes());
  if (bytes > 1073741824.0) {
    log_warn("filtering history needs about " + std::to_string(static_cast<long long>(bytes / 1048576.0)) + " MiB");
  }
  EmResult result;
  StateSpaceSpec spec = init;
  if (truth) result.initial_relative_error = relative_error(spec, *truth);

  ParticleCloud cloud;
  for (std::size_t it = 0; it < config.max_iters; ++it) {
    const std::uint64_t filter_seed = mix64(config.seed + 0x9e3779b97f4a7c15ULL * (2 * it + 1));
    const std::uint64_t smooth_seed = mix64(config.seed + 0x9e3779b97f4a7c15ULL * (2 * it + 2));
    const GaussianPrior prior = config.initial_prior ? *config.initial_prior : default_initial_prior(spec);
    const Matrix g = g_paths(spec, counts);
    const TransitionModel transition = make_transition(spec);
    ParticleOptions popt;
    popt.particles = config.particles;
    popt.resample_threshold = config.resample_threshold;
    popt.seed = filter_seed;
    cloud = particle_filter(transition, prior, make_observation(spec, counts, g), K, popt);
    result.smoothed = backward_simulate(cloud, transition, config.paths(), smooth_seed);

    StateSpaceSpec dynamics;
    StateSpaceSpec observation;
    if (max_threads() > 1) {
      auto dyn = std::async(std::launch::async, [&] { return mstep_dynamics(spec, result.smoothed); });
      observation = mstep_observation(spec, result.smoothed, counts, config.optimizer, config.bounds);
      dynamics = dyn.get();
    } else {
      dynamics = mstep_dynamics(spec, result.smoothed);
      observation = mstep_observation(spec, result.smoothed, counts, config.optimizer, config.bounds);
    }
    StateSpaceSpec next = spec;
    next.mu = dynamics.mu;
    next.omega1 = dynamics.omega1;
    next.epsilon = dynamics.epsilon;
    next.eta = dynamics.eta;
    next.alpha = observation.alpha;
    next.omega2 = observation.omega2;
    next.A = observation.A;
    next.B = observation.B;

    EmIteration record;
    record.q_before = eval_Q(spec, result.smoothed, counts, prior).total();
    record.q_after = eval_Q(next, result.smoothed, counts, prior).total();
    record.resamples = cloud.resampled.size();
    record.log_evidence = cloud.log_evidence;
    const Vector before = spec.parameter_vector();
    record.params = next.parameter_vector();
    record.relative_change = (record.params - before).norm() / before.norm();
    if (truth) record.relative_error = relative_error(next, *truth);
    if (record.q_after < record.q_before - 1e-9 * std::abs(record.q_before)) {
      std::ostringstream msg;
      msg << "EM iteration " << it + 1 << " lowered Q from " << record.q_before << " to " << record.q_after;
      log_warn(msg.str());
    }
    {
      std::ostringstream msg;
      msg << "EM iteration " << it + 1 << ": Q " << record.q_after << ", change " << record.relative_change;
      if (record.relative_error) msg << ", relative error " << *record.relative_error;
      log_info(msg.str());
    }
    spec = next;
    result.trace.push_back(std::move(record));
    if (result.trace.back().relative_change < config.tol) {
      result.converged = true;
      break;
    }
  }
  if (result.smoothed.degenerate_steps > 0) {
    log_warn("backward smoothing fell back to filtering weights on " +
             std::to_string(result.smoothed.degenerate_steps) + " steps");
  }
  result.spec = spec;
  result.smoothed_intensity = intensity_paths(spec, result.smoothed, counts);

  const Index Ki = static_cast<Index>(K);
  const Index m = spec.mu.size();
  const Matrix g = g_paths(spec, counts);
  result.filtered_intensity_variance = Vector::Zero(Ki);
  result.smoothed_intensity_variance = Vector::Zero(Ki);
  const double paths = static_cast<double>(result.smoothed_intensity.size());
  for (Index r = 0; r < Ki; ++r) {
    const Matrix& x = cloud.states[static_cast<std::size_t>(r) + 1];
    const Vector w = cloud.weights.row(r + 1).transpose();
    double filtered = 0.0;
    double smoothed = 0.0;
    for (Index i = 0; i < m; ++i) {
      double mean = 0.0, sq = 0.0;
      for (Index p = 0; p < x.rows(); ++p) {
        const double lam = link(spec, static_cast<std::size_t>(i), x(p, i), g(r, i));
        mean += w(p) * lam;
        sq += w(p) * lam * lam;
      }
      filtered += std::max(sq - mean * mean, 0.0);
      mean = 0.0;
      sq = 0.0;
      for (const Matrix& lam : result.smoothed_intensity) {
        mean += lam(r, i);
        sq += lam(r, i) * lam(r, i);
      }
      mean /= paths;
      smoothed += std::max(sq / paths - mean * mean, 0.0);
    }
    result.filtered_intensity_variance(r) = filtered / static_cast<double>(m);
    result.smoothed_intensity_variance(r) = smoothed / static_cast<double>(m);
  }
  if (!result.converged) log_info("ensemble EM stopped at max_iters");
  return result;
}

}  // namespace hawkesnet
