#include "hawkesnet/mm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hawkesnet/log.hpp"
#include "hawkesnet/model.hpp"
#include "hawkesnet/parallel.hpp"

namespace hawkesnet {

namespace {

using Eigen::Index;

constexpr double kGammaFloor = 1e-6;

struct SourceCounts {
  Vector interior;
  Vector last;
};

SourceCounts source_counts(const CountSeries& counts) {
  const Index m = counts.counts.cols();
  SourceCounts out{Vector::Zero(m), Vector::Zero(m)};
  for (auto [begin, end] : counts.segments()) {
    if (end - begin < 2) continue;
    for (std::size_t k = begin; k + 2 < end; ++k) {
      out.interior += counts.counts.row(static_cast<Index>(k)).cast<double>().transpose();
    }
    out.last += counts.counts.row(static_cast<Index>(end - 2)).cast<double>().transpose();
  }
  return out;
}

struct NodeStats {
  double weighted = 0.0;  // sum_k n_k / lam_k
  Vector c;               // sum_k n_k R(k, j) / lam_k
  Vector e;               // sum_k n_k T(k, j) / lam_k
  Vector r_total;         // sum_k R(k, j)
};

NodeStats node_stats(const HawkesParams& p, const CountSeries& counts, std::size_t i, bool need_t) {
  const Index m = static_cast<Index>(p.nodes());
  const Index ii = static_cast<Index>(i);
  const Vector g = p.gamma.pairs().row(ii).transpose();
  const Vector a = p.alpha.row(ii).transpose();
  const double mu = p.mu(ii);
  NodeStats s{0.0, Vector::Zero(m), Vector::Zero(m), Vector::Zero(m)};
  Vector R(m), T(m);
  for (auto [begin, end] : counts.segments()) {
    R.setZero();
    T.setZero();
    for (std::size_t k = begin; k < end; ++k) {
      const Index kk = static_cast<Index>(k);
      s.r_total += R;
      const auto n = counts.counts(kk, ii);
      if (n > 0) {
        const double lam = mu + a.dot(R);
        if (!(lam > 0.0)) {
          std::ostringstream msg;
          msg << "non-positive intensity " << lam << " at bin " << k << ", node " << i
              << " with count " << n;
          throw DomainError(msg.str());
        }
        const double w = static_cast<double>(n) / lam;
        s.weighted += w;
        s.c += w * R;
        if (need_t) s.e += w * T;
      }
      const Vector events = counts.counts.row(kk).cast<double>().transpose();
      if (need_t) T = g.cwiseProduct(T + R);
      R = g.cwiseProduct(R) + events;
    }
  }
  return s;
}

double mu_update(const HawkesParams& p, const NodeStats& s, const CountSeries& counts,
                 const MmStepOptions& o, Index i) {
  const double exposure = static_cast<double>(counts.steps()) * counts.dt;
  const double weighted = p.mu(i) * s.weighted;
  if (o.prior_a && o.prior_b) return regularized_mu_update(weighted, exposure, (*o.prior_a)(i), (*o.prior_b)(i));
  return weighted / exposure;
}

void warn_silent(std::size_t i, const std::vector<Index>& silent) {
  if (silent.empty()) return;
  std::ostringstream msg;
  msg << "node " << i << ": excitation from silent source(s)";
  for (Index j : silent) msg << ' ' << j;
  msg << " set to zero";
  log_warn(msg.str());
}

double surrogate_gamma(double x, double D, double E, double c, double d) {
  return -0.5 * D * (1.0 + x) * (1.0 + x) + (E + c - 1.0) * std::log(x) + (d - 1.0) * std::log1p(-x);
}

double pick_root(const std::vector<double>& roots, double D, double E, double c, double d,
                 const char* what) {
  if (roots.empty()) {
    const double lo = kGammaFloor;
    const double hi = 1.0 - kGammaFloor;
    const double pick = surrogate_gamma(lo, D, E, c, d) >= surrogate_gamma(hi, D, E, c, d) ? lo : hi;
    std::ostringstream msg;
    msg << what << " has no root in (0, 1); using boundary value " << pick;
    log_warn(msg.str());
    return pick;
  }
  double best = roots.front();
  double best_value = surrogate_gamma(best, D, E, c, d);
  for (double r : roots) {
    const double v = surrogate_gamma(r, D, E, c, d);
    if (v > best_value) {
      best = r;
      best_value = v;
    }
  }
  return best;
}

double horner(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

double horner_derivative(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (std::size_t p = coeffs.size(); p-- > 1;) v = v * x + static_cast<double>(p) * coeffs[p];
  return v;
}

}  // namespace

MmAccumulators mm_precompute(const CountSeries& counts, const Vector& source_gamma) {
  const Index K = counts.counts.rows();
  const Index m = counts.counts.cols();
  if (source_gamma.size() != m) throw std::invalid_argument("decay vector length must match node count");
  MmAccumulators out;
  out.R = Matrix::Zero(K, m);
  out.T = Matrix::Zero(K, m);
  Vector R(m), T(m);
  for (auto [begin, end] : counts.segments()) {
    R.setZero();
    T.setZero();
    for (std::size_t k = begin; k < end; ++k) {
      const Index kk = static_cast<Index>(k);
      out.R.row(kk) = R.transpose();
      out.T.row(kk) = T.transpose();
      T = source_gamma.cwiseProduct(T + R);
      R = source_gamma.cwiseProduct(R) + counts.counts.row(kk).cast<double>().transpose();
    }
  }
  const SourceCounts sc = source_counts(counts);
  out.interior = sc.interior;
  out.last = sc.last;
  out.r_total = out.R.colwise().sum().transpose();
  return out;
}

void MmConfig::validate() const {
  if (mode == MmMode::fixed_decay && !(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("fixed decay gamma must lie in (0, 1)");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  auto positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  if (gamma_prior) {
    positive(gamma_prior->a, "gamma prior a");
    positive(gamma_prior->b, "gamma prior b");
  }
  if (beta_prior) {
    positive(beta_prior->c, "beta prior c");
    positive(beta_prior->d, "beta prior d");
  }
  if (init) init->validate();
}

MmStepOptions resolve_step_options(const MmConfig& config, const CountSeries& counts) {
  MmStepOptions o;
  o.exact_denominator = config.exact_denominator;
  o.root_form = config.root_form;
  o.beta_solver = config.beta_solver;
  const Index m = counts.counts.cols();
  const double K = static_cast<double>(counts.steps());
  if (config.gamma_prior) {
    const Vector mean = counts.mean_counts();
    o.prior_a = config.gamma_prior->a ? Vector::Constant(m, *config.gamma_prior->a)
                                      : Vector(0.5 * mean * K);
    o.prior_b = Vector::Constant(m, config.gamma_prior->b.value_or(K * counts.dt));
  }
  if (config.beta_prior) {
    o.beta_c = config.beta_prior->c.value_or(2.5 * K);
    o.beta_d = config.beta_prior->d.value_or(10.25 * K);
  }
  if (config.quartic_a) {
    o.quartic_a = Vector::Constant(m, *config.quartic_a);
  } else if (o.prior_a) {
    o.quartic_a = *o.prior_a;
  } else {
    o.quartic_a = Vector::Ones(m);
  }
  return o;
}

double regularized_mu_update(double mu_weighted, double exposure, double a, double b) {
  const double value = (mu_weighted + a - 1.0) / (exposure + b);
  if (value > 0.0) return value;
  log_warn("regularized baseline update is non-positive; clamped to the smallest positive value");
  return std::numeric_limits<double>::min();
}

HawkesParams mm_step_fixed(const HawkesParams& params, const CountSeries& counts,
                           const MmStepOptions& options) {
  params.validate_finite();
  if (params.nodes() != counts.nodes()) throw std::invalid_argument("parameter and count node counts differ");
  const SourceCounts sc = source_counts(counts);
  const Index m = static_cast<Index>(params.nodes());
  HawkesParams next = params;
  parallel_for(params.nodes(), [&](std::size_t node) {
    const Index i = static_cast<Index>(node);
    const NodeStats s = node_stats(params, counts, node, false);
    next.mu(i) = mu_update(params, s, counts, options, i);
    std::vector<Index> silent;
    for (Index j = 0; j < m; ++j) {
      const double g = params.gamma.pairs()(i, j);
      const double denom = counts.dt * (options.exact_denominator
                                            ? s.r_total(j)
                                            : (1.0 + g) * sc.interior(j) + sc.last(j));
      if (!(denom > 0.0)) {
        if (params.alpha(i, j) != 0.0) silent.push_back(j);
        next.alpha(i, j) = 0.0;
        continue;
      }
      next.alpha(i, j) = params.alpha(i, j) * s.c(j) / denom;
    }
    warn_silent(node, silent);
  });
  return next;
}

namespace {

struct PairRoots {
  double alpha;
  double gamma;
};

double quadratic_root(double A, double B, double C, RootForm form) {
  const double disc = std::sqrt(B * B + 4.0 * A * C);
  if (form == RootForm::verbatim) return -B + disc / (2.0 * A);
  if (!(C > 0.0)) return 0.0;
  return 2.0 * C / (B + disc);
}

}  // namespace

HawkesParams mm_step_full(const HawkesParams& params, const CountSeries& counts,
                          const MmStepOptions& options) {
  params.validate_finite();
  if (params.nodes() != counts.nodes()) throw std::invalid_argument("parameter and count node counts differ");
  const SourceCounts sc = source_counts(counts);
  const Index m = static_cast<Index>(params.nodes());
  const double dt = counts.dt;
  HawkesParams next = params;
  Matrix gamma_next = params.gamma.pairs();
  parallel_for(params.nodes(), [&](std::size_t node) {
    const Index i = static_cast<Index>(node);
    const NodeStats s = node_stats(params, counts, node, true);
    next.mu(i) = mu_update(params, s, counts, options, i);
    std::vector<Index> silent;
    for (Index j = 0; j < m; ++j) {
      const double a0 = params.alpha(i, j);
      const double g0 = params.gamma.pairs()(i, j);
      if (a0 == 0.0) continue;
      if (!(sc.interior(j) > 0.0)) {
        silent.push_back(j);
        continue;
      }
      const double A = dt * sc.interior(j) * (1.0 + g0) / a0;
      const double B = dt * sc.last(j);
      const double C = a0 * s.c(j);
      const double D = dt * sc.interior(j) * a0 / (1.0 + g0);
      const double E = a0 * s.e(j);
      next.alpha(i, j) = quadratic_root(A, B, C, options.root_form);
      double g;
      if (options.beta_c && options.beta_d) {
        g = options.beta_solver == BetaSolver::quartic
                ? solve_gamma_quartic(D, E, *options.beta_c, *options.beta_d, options.quartic_a(i))
                : solve_gamma_stationary(D, E, *options.beta_c, *options.beta_d);
      } else {
        g = quadratic_root(D, D, E, options.root_form);
      }
      if (options.root_form == RootForm::conventional) g = std::clamp(g, kGammaFloor, 1.0 - kGammaFloor);
      gamma_next(i, j) = g;
    }
    if (!silent.empty()) {
      std::ostringstream msg;
      msg << "node " << node << ": parameters for silent source(s)";
      for (Index j : silent) msg << ' ' << j;
      msg << " frozen";
      log_warn(msg.str());
    }
  });
  next.gamma = DecaySpec::per_pair(gamma_next);
  return next;
}

std::vector<double> unit_interval_roots(const std::vector<double>& coeffs) {
  std::vector<double> roots;
  if (coeffs.empty()) return roots;
  constexpr int kGrid = 4096;
  double scale = 1.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  auto polish = [&](double lo, double hi) {
    double flo = horner(coeffs, lo);
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = horner(coeffs, mid);
      if (fm == 0.0) return mid;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
      const double d = horner_derivative(coeffs, x);
      if (d == 0.0) break;
      const double cand = x - horner(coeffs, x) / d;
      if (!(cand > 0.0 && cand < 1.0) || std::abs(horner(coeffs, cand)) >= std::abs(horner(coeffs, x))) break;
      x = cand;
    }
    return x;
  };
  double prev_x = 0.0;
  double prev_f = horner(coeffs, prev_x);
  for (int g = 1; g <= kGrid; ++g) {
    const double x = static_cast<double>(g) / kGrid;
    const double f = horner(coeffs, x);
    if (g < kGrid && f == 0.0) {
      roots.push_back(x);
    } else if (prev_f != 0.0 && f != 0.0 && ((prev_f < 0.0) != (f < 0.0))) {
      const double r = polish(prev_x, x);
      if (r > 0.0 && r < 1.0 && std::abs(horner(coeffs, r)) < 1e-10 * scale) roots.push_back(r);
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

double solve_gamma_quartic(double D, double E, double c, double d, double a) {
  if (!(D > 0.0)) throw DomainError("quartic leading coefficient D must be positive");
  const std::vector<double> coeffs{-a, c - d - E, D + E, 0.0, -D};
  return pick_root(unit_interval_roots(coeffs), D, E, c, d, "decay quartic");
}

double solve_gamma_stationary(double D, double E, double c, double d) {
  if (!(D > 0.0)) throw DomainError("decay equation coefficient D must be positive");
  const std::vector<double> coeffs{E + c - 1.0, -(D + E + c + d - 2.0), 0.0, D};
  return pick_root(unit_interval_roots(coeffs), D, E, c, d, "decay stationarity equation");
}

double mm_surrogate_fixed(const HawkesParams& theta, const HawkesParams& current,
                          const CountSeries& counts) {
  const IntensityPath lam = intensity_path(theta, counts);
  const Index m = static_cast<Index>(current.nodes());
  const double dt = counts.dt;
  double total = lam.sum() * dt;
  for (Index i = 0; i < m; ++i) {
    const MmAccumulators acc = mm_precompute(counts, current.gamma.pairs().row(i).transpose());
    for (Index k = 0; k < counts.counts.rows(); ++k) {
      const auto n = counts.counts(k, i);
      if (n == 0) continue;
      const double lam_n = current.mu(i) + current.alpha.row(i).dot(acc.R.row(k));
      double bound = 0.0;
      if (current.mu(i) > 0.0) {
        bound += current.mu(i) / lam_n * std::log(lam_n * dt * theta.mu(i) / current.mu(i));
      }
      for (Index j = 0; j < m; ++j) {
        const double share = current.alpha(i, j) * acc.R(k, j) / lam_n;
        if (share == 0.0) continue;
        bound += share * std::log(lam_n * dt * theta.alpha(i, j) / current.alpha(i, j));
      }
      total -= static_cast<double>(n) * bound;
    }
  }
  return total;
}

double mm_penalty(const HawkesParams& params, const MmStepOptions& options) {
  double total = 0.0;
  if (options.prior_a && options.prior_b) {
    for (Index i = 0; i < params.mu.size(); ++i) {
      total -= ((*options.prior_a)(i)-1.0) * std::log(params.mu(i)) - (*options.prior_b)(i)*params.mu(i);
    }
  }
  if (options.beta_c && options.beta_d) {
    const Matrix& g = params.gamma.pairs();
    total -= ((*options.beta_c - 1.0) * g.array().log() +
              (*options.beta_d - 1.0) * (1.0 - g.array()).log()).sum();
  }
  return total;
}

HawkesParams mm_default_init(const CountSeries& counts, const MmConfig& config) {
  const Index m = counts.counts.cols();
  HawkesParams p;
  p.mu = (0.5 * counts.mean_counts() / counts.dt).cwiseMax(1e-3);
  p.alpha = Matrix::Constant(m, m, 0.1);
  p.gamma = config.mode == MmMode::fixed_decay
                ? DecaySpec::scalar(config.gamma, static_cast<std::size_t>(m))
                : DecaySpec::per_pair(Matrix::Constant(m, m, config.gamma));
  return p;
}

MmResult mm_fit(const CountSeries& counts, const MmConfig& config) {
  config.validate();
  counts.validate();
  MmResult out;
  out.params = config.init ? *config.init : mm_default_init(counts, config);
  if (out.params.nodes() != counts.nodes()) throw std::invalid_argument("initial parameters do not match node count");
  if (config.mode == MmMode::full_decay) out.params.gamma = DecaySpec::per_pair(out.params.gamma.pairs());
  const MmStepOptions options = resolve_step_options(config, counts);
  const bool strict = config.mode == MmMode::fixed_decay && config.exact_denominator;

  auto objective = [&](const HawkesParams& p, double& likelihood) {
    likelihood = nll(p, counts);
    return likelihood + mm_penalty(p, options);
  };
  double lik = 0.0;
  double previous = objective(out.params, lik);
  out.trace.initial_objective = previous;
  out.trace.initial_nll = lik;
  for (std::size_t it = 0; it < config.max_iters; ++it) {
    out.params = config.mode == MmMode::fixed_decay ? mm_step_fixed(out.params, counts, options)
                                                    : mm_step_full(out.params, counts, options);
    const double value = objective(out.params, lik);
    out.trace.objective.push_back(value);
    out.trace.nll.push_back(lik);
    if (config.keep_snapshots) out.trace.snapshots.push_back(out.params);
    out.trace.iterations = it + 1;
    const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
    const double rise = (value - previous) / scale;
    if (rise > 0.0) {
      ++out.trace.increases;
      out.trace.max_increase = std::max(out.trace.max_increase, rise);
      if (strict && rise > 1e-6) {
        std::ostringstream msg;
        msg << "MM objective increased by " << rise << " (relative) at iteration " << it + 1
            << " in exact fixed-decay mode";
        throw DomainError(msg.str());
      }
    }
    if (std::abs(value - previous) <= config.tol * scale) {
      out.trace.converged = true;
      previous = value;
      break;
    }
    previous = value;
  }
  if (out.trace.increases > 0) {
    std::ostringstream msg;
    msg << "MM objective rose in " << out.trace.increases << " iteration(s); largest relative rise "
        << out.trace.max_increase;
    log_warn(msg.str());
  }
  if (!out.trace.converged) log_warn("MM did not reach tolerance within max_iters");
  return out;
}

}  // namespace hawkesnet
