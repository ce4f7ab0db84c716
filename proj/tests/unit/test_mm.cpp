#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hawkesnet/fixtures.hpp"
#include "hawkesnet/model.hpp"
#include "hawkesnet/mm.hpp"
#include "hawkesnet/parallel.hpp"
#include "support/random_instances.hpp"

namespace hawkesnet {
namespace {

using testing::random_counts;
using testing::random_params;

CountSeries column(std::initializer_list<std::int64_t> values) {
  CountMatrix c(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index k = 0;
  for (auto v : values) c(k++, 0) = v;
  return CountSeries::from_counts(c);
}

HawkesParams fixed_params(const Vector& mu, const Matrix& alpha, double gamma) {
  return HawkesParams{mu, alpha, DecaySpec::scalar(gamma, static_cast<std::size_t>(mu.size()))};
}

TEST(Precompute, ZeroCountsGiveZeroAccumulators) {
  const CountSeries counts = CountSeries::from_counts(CountMatrix::Zero(10, 3));
  const MmAccumulators acc = mm_precompute(counts, Vector::Constant(3, 0.4));
  EXPECT_EQ(acc.R.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(acc.T.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(acc.interior.sum() + acc.last.sum(), 0.0);
}

TEST(Precompute, MemorylessDecayShiftsCounts) {
  std::mt19937_64 gen(4);
  const CountSeries counts = random_counts(gen, 20, 2);
  const MmAccumulators acc = mm_precompute(counts, Vector::Zero(2));
  EXPECT_EQ(acc.R.row(0).sum(), 0.0);
  for (int k = 1; k < 20; ++k) {
    EXPECT_EQ(acc.R.row(k), counts.counts.row(k - 1).cast<double>());
  }
}

TEST(Precompute, HandRecursion) {
  // Counts of bins 1..4 are (1, 0, 2, 0); bin 0 is empty.
  const MmAccumulators acc = mm_precompute(column({1, 0, 2, 0, 5}), Vector::Constant(1, 0.5));
  EXPECT_DOUBLE_EQ(acc.R(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(acc.R(2, 0), 0.5);
  EXPECT_DOUBLE_EQ(acc.R(3, 0), 2.25);
  EXPECT_DOUBLE_EQ(acc.R(4, 0), 1.125);
}

TEST(Precompute, MatchesLiteralDoubleSums) {
  std::mt19937_64 gen(12);
  const int K = 200;
  const CountSeries counts = random_counts(gen, K, 3);
  const Vector g(Eigen::Vector3d(0.2, 0.5, 0.8));
  const MmAccumulators acc = mm_precompute(counts, g);
  for (int k = 0; k < K; k += 7) {
    for (int j = 0; j < 3; ++j) {
      double r = 0.0, t = 0.0;
      for (int l = 0; l < k; ++l) {
        const double w = std::pow(g(j), k - l - 1) * static_cast<double>(counts.counts(l, j));
        r += w;
        t += (k - l - 1) * w;
      }
      EXPECT_NEAR(acc.R(k, j), r, 1e-12 * std::max(1.0, r));
      EXPECT_NEAR(acc.T(k, j), t, 1e-11 * std::max(1.0, t));
    }
  }
  double interior = 0.0;
  for (int k = 0; k + 3 <= K - 1; ++k) interior += static_cast<double>(counts.counts(k, 0));
  EXPECT_DOUBLE_EQ(acc.interior(0), interior);
  EXPECT_DOUBLE_EQ(acc.last(0), static_cast<double>(counts.counts(K - 2, 0)));
}

TEST(StepFixed, EmptyDataCollapsesRates) {
  const CountSeries counts = CountSeries::from_counts(CountMatrix::Zero(50, 2));
  const HawkesParams p = fixed_params(Vector::Ones(2), Matrix::Constant(2, 2, 0.1), 0.2);
  const HawkesParams next = mm_step_fixed(p, counts);
  EXPECT_EQ(next.mu, Vector::Zero(2));
  EXPECT_EQ(next.alpha, Matrix::Zero(2, 2));
}

TEST(StepFixed, PoissonBaselineIsSampleMean) {
  HawkesParams truth = fixed_params(Vector::Constant(1, 3.0), Matrix::Zero(1, 1), 0.2);
  const Simulation sim = simulate_hawkes(truth, 20000, 8);
  const HawkesParams next = mm_step_fixed(truth, sim.counts);
  const double mean = sim.counts.mean_counts()(0);
  EXPECT_NEAR(next.mu(0), mean, 3.0 * std::sqrt(3.0 / 20000.0));
  EXPECT_NEAR(next.mu(0), mean, 1e-12);
}

TEST(StepFixed, KeepsFeasibility) {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 20; ++rep) {
    const CountSeries counts = random_counts(gen, 60, 3);
    HawkesParams p = random_params(gen, 3);
    p.gamma = DecaySpec::scalar(0.3, 3);
    for (int it = 0; it < 5; ++it) p = mm_step_fixed(p, counts);
    EXPECT_GT(p.mu.minCoeff(), 0.0);
    EXPECT_GE(p.alpha.minCoeff(), 0.0);
  }
}

TEST(StepFixed, ExactDenominatorIsMajorizationMinimization) {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 10; ++rep) {
    const CountSeries counts = random_counts(gen, 80, 3);
    HawkesParams p = random_params(gen, 3);
    p.gamma = DecaySpec::scalar(0.4, 3);
    MmStepOptions opt;
    opt.exact_denominator = true;
    double previous = nll(p, counts);
    for (int it = 0; it < 30; ++it) {
      p = mm_step_fixed(p, counts, opt);
      const double value = nll(p, counts);
      EXPECT_LE(value, previous + 1e-10 * std::abs(previous));
      previous = value;
    }
  }
}

TEST(StepFixed, SurrogateTouchesNll) {
  std::mt19937_64 gen(41);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 1 + rep % 4;
    const CountSeries counts = random_counts(gen, 40, m);
    HawkesParams p = random_params(gen, m);
    p.gamma = DecaySpec::scalar(0.25, static_cast<std::size_t>(m));
    const double value = nll(p, counts);
    EXPECT_NEAR(mm_surrogate_fixed(p, p, counts), value, 1e-10 * std::abs(value));
  }
}

TEST(StepFixed, SurrogateMajorizesNll) {
  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const CountSeries counts = random_counts(gen, 40, 3);
  HawkesParams p = random_params(gen, 3);
  p.gamma = DecaySpec::scalar(0.25, 3);
  for (int rep = 0; rep < 20; ++rep) {
    HawkesParams q = p;
    for (int i = 0; i < 3; ++i) {
      q.mu(i) *= u(gen);
      for (int j = 0; j < 3; ++j) q.alpha(i, j) *= u(gen);
    }
    EXPECT_GE(mm_surrogate_fixed(q, p, counts), nll(q, counts) - 1e-9);
  }
}

TEST(StepFixed, IndependentOfThreadCount) {
  const HawkesParams truth = fixtures::nine_node_truth(3);
  const Simulation sim = simulate_hawkes(truth, 2000, 4);
  set_max_threads(1);
  const HawkesParams a = mm_step_fixed(truth, sim.counts);
  set_max_threads(4);
  const HawkesParams b = mm_step_fixed(truth, sim.counts);
  set_max_threads(0);
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_EQ(a.alpha, b.alpha);
}

TEST(StepFixed, SegmentsResetHistory) {
  CountMatrix c(6, 1);
  c << 2, 1, 0, 3, 1, 0;
  CountSeries counts = CountSeries::from_counts(c);
  counts.segment_starts = {0, 3};
  const HawkesParams p = fixed_params(Vector::Ones(1), Matrix::Constant(1, 1, 0.3), 0.2);
  const MmAccumulators acc = mm_precompute(counts, Vector::Constant(1, 0.2));
  EXPECT_EQ(acc.R(3, 0), 0.0);
  EXPECT_DOUBLE_EQ(acc.interior(0), 2.0 + 3.0);
  EXPECT_DOUBLE_EQ(acc.last(0), 1.0 + 1.0);
  EXPECT_NO_THROW((void)mm_step_fixed(p, counts));
}

TEST(RegularizedMu, EmptyDataIsPriorMode) {
  EXPECT_DOUBLE_EQ(regularized_mu_update(0.0, 100.0, 5.0, 20.0), 4.0 / 120.0);
}

TEST(RegularizedMu, FlatPriorEqualsUnregularized) {
  std::mt19937_64 gen(52);
  const CountSeries counts = random_counts(gen, 100, 3);
  HawkesParams p = random_params(gen, 3);
  p.gamma = DecaySpec::scalar(0.2, 3);
  MmStepOptions flat;
  flat.prior_a = Vector::Ones(3);
  flat.prior_b = Vector::Zero(3);
  const HawkesParams a = mm_step_fixed(p, counts);
  const HawkesParams b = mm_step_fixed(p, counts, flat);
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_EQ(a.alpha, b.alpha);
}

TEST(RegularizedMu, DefaultRuleUsesHalfMean) {
  CountMatrix c = CountMatrix::Constant(10, 2, 4);
  const CountSeries counts = CountSeries::from_counts(c);
  MmConfig cfg;
  cfg.gamma_prior = GammaPrior{};
  const MmStepOptions o = resolve_step_options(cfg, counts);
  ASSERT_TRUE(o.prior_a && o.prior_b);
  EXPECT_DOUBLE_EQ((*o.prior_a)(0), 0.5 * 4.0 * 10.0);
  EXPECT_DOUBLE_EQ((*o.prior_b)(1), 10.0);
}

TEST(RegularizedMu, ClampsNonPositive) {
  EXPECT_GT(regularized_mu_update(0.0, 10.0, 0.5, 1.0), 0.0);
}

TEST(StepFull, NoAttributedEventsGivesZeroAlpha) {
  // A single source count in the last exciting bin: B > 0 but nothing is
  // attributed when the receiver is silent afterwards.
  CountMatrix c(4, 2);
  c << 0, 0, 1, 0, 0, 0, 0, 0;
  const CountSeries counts = CountSeries::from_counts(c);
  HawkesParams p;
  p.mu = Vector::Ones(2);
  p.alpha = Matrix::Constant(2, 2, 0.2);
  p.gamma = DecaySpec::per_pair(Matrix::Constant(2, 2, 0.3));
  const HawkesParams next = mm_step_full(p, counts);
  EXPECT_EQ(next.alpha(1, 0), 0.0);
}

TEST(StepFull, RawGammaRootIsZeroWithoutDelayedMass) {
  CountMatrix c(6, 1);
  c << 1, 1, 0, 0, 0, 0;
  const CountSeries counts = CountSeries::from_counts(c);
  HawkesParams p;
  p.mu = Vector::Ones(1);
  p.alpha = Matrix::Constant(1, 1, 0.5);
  p.gamma = DecaySpec::per_pair(Matrix::Constant(1, 1, 0.3));
  // Only bin 1 follows an event with zero lag, so E = 0 and the raw root is
  // zero; the step floors it inside (0, 1).
  const HawkesParams next = mm_step_full(p, counts);
  EXPECT_DOUBLE_EQ(next.gamma(0, 0), 1e-6);
}

struct SurrogateCoefficients {
  double A, B, C, D, E;
};

// Literal O(K^2) evaluation of the full-decay coefficients for pair (i, j).
SurrogateCoefficients literal_coefficients(const HawkesParams& p, const CountSeries& c, int i, int j) {
  const int K = static_cast<int>(c.steps());
  const int m = static_cast<int>(c.nodes());
  SurrogateCoefficients out{};
  double interior = 0.0;
  for (int l = 0; l <= K - 3; ++l) interior += static_cast<double>(c.counts(l, j));
  const double a = p.alpha(i, j);
  const double g = p.gamma(i, j);
  out.A = interior * (1 + g) / a;
  out.B = static_cast<double>(c.counts(K - 2, j));
  out.D = interior * a / (1 + g);
  for (int k = 0; k < K; ++k) {
    double lam = p.mu(i);
    for (int s = 0; s < m; ++s)
      for (int l = 0; l < k; ++l)
        lam += p.alpha(i, s) * std::pow(p.gamma(i, s), k - l - 1) * static_cast<double>(c.counts(l, s));
    for (int l = 0; l < k; ++l) {
      const double phi = a * std::pow(g, k - l - 1) * static_cast<double>(c.counts(l, j));
      const double share = static_cast<double>(c.counts(k, i)) * phi / lam;
      out.C += share;
      out.E += (k - l - 1) * share;
    }
  }
  return out;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0) == (f(lo) > 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(StepFull, MatchesSurrogateStationarityOracle) {
  HawkesParams truth;
  truth.mu = Vector(Eigen::Vector2d(1.0, 0.8));
  truth.alpha = Matrix(2, 2);
  truth.alpha << 0.3, 0.1, 0.2, 0.25;
  truth.gamma = DecaySpec::per_pair(Matrix::Constant(2, 2, 0.3));
  const Simulation sim = simulate_hawkes(truth, 200, 77);
  HawkesParams start = truth;
  start.alpha.setConstant(0.15);
  start.gamma = DecaySpec::per_pair(Matrix::Constant(2, 2, 0.2));
  const HawkesParams next = mm_step_full(start, sim.counts);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const SurrogateCoefficients s = literal_coefficients(start, sim.counts, i, j);
      const double alpha = bisect([&](double x) { return s.A * x + s.B - s.C / x; }, 1e-12, 100.0);
      const double gamma = bisect([&](double x) { return s.D * (1 + x) - s.E / x; }, 1e-12, 100.0);
      EXPECT_NEAR(next.alpha(i, j), alpha, 1e-8);
      EXPECT_NEAR(next.gamma(i, j), gamma, 1e-8);
    }
  }
}

TEST(StepFull, VerbatimRootGoesNegativeConventionalStaysPositive) {
  const HawkesParams truth = fixtures::nine_node_truth(1);
  const Simulation sim = simulate_hawkes(truth, 2000, 6);
  HawkesParams start = truth;
  start.alpha.setConstant(0.1);
  start.gamma = DecaySpec::per_pair(Matrix::Constant(9, 9, 0.15));
  MmStepOptions verbatim;
  verbatim.root_form = RootForm::verbatim;
  const HawkesParams conventional = mm_step_full(start, sim.counts);
  const HawkesParams literal = mm_step_full(start, sim.counts, verbatim);
  EXPECT_GE(conventional.alpha.minCoeff(), 0.0);
  EXPECT_GT(conventional.gamma.pairs().minCoeff(), 0.0);
  EXPECT_LT(literal.alpha.minCoeff(), 0.0);
}

std::vector<double> companion_roots(const std::vector<double>& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  Matrix C = Matrix::Zero(n, n);
  for (int r = 1; r < n; ++r) C(r, r - 1) = 1.0;
  for (int r = 0; r < n; ++r) C(r, n - 1) = -coeffs[static_cast<std::size_t>(r)] / coeffs.back();
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(C).eigenvalues();
  std::vector<double> out;
  for (int r = 0; r < n; ++r)
    if (std::abs(ev(r).imag()) < 1e-9 && ev(r).real() > 0 && ev(r).real() < 1) out.push_back(ev(r).real());
  std::sort(out.begin(), out.end());
  return out;
}

double quartic(double x, double D, double E, double c, double d, double a) {
  return -D * x * x * x * x + (D + E) * x * x + (c - d - E) * x - a;
}

TEST(Quartic, RootsMatchCompanionOracle) {
  const std::vector<double> coeffs{-0.01, 0.0, 2.0, 0.0, -1.0};
  const std::vector<double> mine = unit_interval_roots(std::vector<double>{-0.01, -1.0, 2.0, 0.0, -1.0});
  const std::vector<double> oracle = companion_roots(std::vector<double>{-0.01, -1.0, 2.0, 0.0, -1.0});
  ASSERT_EQ(mine.size(), oracle.size());
  ASSERT_EQ(mine.size(), 2u);
  for (std::size_t r = 0; r < mine.size(); ++r) EXPECT_NEAR(mine[r], oracle[r], 1e-10);
  (void)coeffs;
}

TEST(Quartic, SolverReturnsOracleRoot) {
  // D = E = 1, c = d, a = 0.01: two roots in (0, 1).
  const double x = solve_gamma_quartic(1.0, 1.0, 3.0, 3.0, 0.01);
  const auto oracle = companion_roots({-0.01, -1.0, 2.0, 0.0, -1.0});
  EXPECT_TRUE(std::abs(x - oracle[0]) < 1e-10 || std::abs(x - oracle[1]) < 1e-10);
  EXPECT_LT(std::abs(quartic(x, 1.0, 1.0, 3.0, 3.0, 0.01)), 1e-10);
}

TEST(Quartic, NoRootForUnitCoefficientsAndTenthFallsBackToBoundary) {
  // -x^4 + 2x^2 - x - 0.1 stays negative on (0, 1); the oracle agrees.
  EXPECT_TRUE(companion_roots({-0.1, -1.0, 2.0, 0.0, -1.0}).empty());
  const double x = solve_gamma_quartic(1.0, 1.0, 3.0, 3.0, 0.1);
  EXPECT_TRUE(x == 1e-6 || x == 1.0 - 1e-6);
}

TEST(Quartic, ResidualContractOnRandomCoefficients) {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  int found = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const double D = 0.1 + u(gen), E = u(gen), c = u(gen), d = u(gen), a = 0.2 * u(gen);
    const std::vector<double> coeffs{-a, c - d - E, D + E, 0.0, -D};
    for (double r : unit_interval_roots(coeffs)) {
      ++found;
      EXPECT_LT(std::abs(quartic(r, D, E, c, d, a)), 1e-10 * std::max({1.0, D + E, std::abs(c - d - E), a}));
    }
  }
  EXPECT_GT(found, 0);
}

TEST(Quartic, RejectsNonPositiveLeadingCoefficient) {
  EXPECT_THROW((void)solve_gamma_quartic(0.0, 1.0, 1.0, 1.0, 1.0), DomainError);
}

TEST(Quartic, DefaultBetaPriorFollowsLength) {
  const CountSeries counts = CountSeries::from_counts(CountMatrix::Ones(40, 2));
  MmConfig cfg;
  cfg.beta_prior = BetaPrior{};
  const MmStepOptions o = resolve_step_options(cfg, counts);
  EXPECT_DOUBLE_EQ(*o.beta_c, 100.0);
  EXPECT_DOUBLE_EQ(*o.beta_d, 410.0);
  EXPECT_DOUBLE_EQ(o.quartic_a(0), 1.0);
}

TEST(Stationary, CubicRootIsSurrogateMaximizer) {
  const double D = 2.0, E = 1.5, c = 25.0, d = 102.5;
  const double x = solve_gamma_stationary(D, E, c, d);
  const double grad = -D * (1 + x) + (E + c - 1) / x - (d - 1) / (1 - x);
  EXPECT_NEAR(grad, 0.0, 1e-7);
  EXPECT_GT(x, 0.0);
  EXPECT_LT(x, 1.0);
}

TEST(Fit, RecoversSelfExcitationPattern) {
  const HawkesParams truth = fixtures::nine_node_truth(1);
  const Simulation sim = simulate_hawkes(truth, 20000, 2024);
  MmConfig cfg;
  cfg.gamma = fixtures::kNineNodeGamma;
  const MmResult fit = mm_fit(sim.counts, cfg);
  const double min_diag = fit.params.alpha.diagonal().minCoeff();
  Matrix off = fit.params.alpha;
  off.diagonal().setZero();
  EXPECT_LT(off.maxCoeff(), 0.1 * min_diag);
}

TEST(Fit, ExactDenominatorSeparatesSelfExcitationPattern) {
  const HawkesParams truth = fixtures::nine_node_truth(1);
  const Simulation sim = simulate_hawkes(truth, 20000, 2024);
  MmConfig cfg;
  cfg.gamma = fixtures::kNineNodeGamma;
  cfg.exact_denominator = true;
  const MmResult fit = mm_fit(sim.counts, cfg);
  Matrix off = fit.params.alpha;
  off.diagonal().setZero();
  EXPECT_LT(off.maxCoeff(), fit.params.alpha.diagonal().minCoeff());
  EXPECT_GT(fit.params.mu.minCoeff(), 0.1);
}

TEST(Fit, RegularizedShortRunRecoversDiagonal) {
  const HawkesParams truth = fixtures::nine_node_truth(1);
  const Simulation sim = simulate_hawkes(truth, 2000, 2025);
  MmConfig cfg;
  cfg.gamma = fixtures::kNineNodeGamma;
  cfg.gamma_prior = GammaPrior{};
  const MmResult fit = mm_fit(sim.counts, cfg);
  EXPECT_TRUE(fit.trace.converged);
  Matrix off = fit.params.alpha;
  off.diagonal().setZero();
  EXPECT_LT(off.maxCoeff(), fit.params.alpha.diagonal().minCoeff());
}

TEST(Fit, PermutationEquivariant) {
  const HawkesParams truth = fixtures::nine_node_truth(3);
  const Simulation sim = simulate_hawkes(truth, 1500, 12);
  const std::vector<std::size_t> perm{4, 2, 8, 0, 1, 7, 3, 6, 5};
  MmConfig cfg;
  cfg.gamma = fixtures::kNineNodeGamma;
  cfg.max_iters = 40;
  const MmResult a = mm_fit(sim.counts, cfg);
  const MmResult b = mm_fit(permute_nodes(sim.counts, perm), cfg);
  const HawkesParams pa = a.params.permuted(perm);
  EXPECT_LT((pa.alpha - b.params.alpha).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((pa.mu - b.params.mu).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Fit, TraceBoundedByMaxIters) {
  const Simulation sim = simulate_hawkes(fixtures::nine_node_truth(2), 500, 3);
  MmConfig cfg;
  cfg.max_iters = 7;
  cfg.tol = 1e-15;
  cfg.keep_snapshots = true;
  const MmResult fit = mm_fit(sim.counts, cfg);
  EXPECT_EQ(fit.trace.objective.size(), 7u);
  EXPECT_EQ(fit.trace.snapshots.size(), 7u);
  EXPECT_FALSE(fit.trace.converged);
}

TEST(Fit, SmallDecayTraceIsMonotone) {
  HawkesParams truth = fixtures::nine_node_truth(3);
  truth.gamma = DecaySpec::scalar(0.05, 9);
  const Simulation sim = simulate_hawkes(truth, 4000, 19);
  MmConfig cfg;
  cfg.gamma = 0.05;
  const MmResult fit = mm_fit(sim.counts, cfg);
  double previous = fit.trace.initial_nll;
  for (double v : fit.trace.nll) {
    EXPECT_LE(v, previous + 1e-8 * std::abs(previous));
    previous = v;
  }
}

TEST(Fit, FullModeRunsAndStaysFeasible) {
  const Simulation sim = simulate_hawkes(fixtures::nine_node_truth(2), 3000, 5);
  MmConfig cfg;
  cfg.mode = MmMode::full_decay;
  cfg.max_iters = 50;
  const MmResult fit = mm_fit(sim.counts, cfg);
  EXPECT_NO_THROW(fit.params.validate());
  EXPECT_EQ(fit.params.gamma.kind(), DecayKind::per_pair);
}

TEST(Config, RejectsInvalidValues) {
  MmConfig cfg;
  cfg.gamma = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.gamma = 0.2;
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.tol = 1e-6;
  cfg.gamma_prior = GammaPrior{-1.0, std::nullopt};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace hawkesnet
