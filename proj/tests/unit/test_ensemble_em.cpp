#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hawkesnet/ensemble_em.hpp"
#include "hawkesnet/fixtures.hpp"
#include "hawkesnet/optimize.hpp"
#include "hawkesnet/parallel.hpp"

namespace hawkesnet {
namespace {

SmoothedPaths true_paths(const StateSpaceSimulation& sim) {
  SmoothedPaths s;
  s.paths.push_back(sim.states);
  return s;
}

SmoothedPaths jittered_paths(const Matrix& base, int count, double sd, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, sd);
  SmoothedPaths s;
  for (int l = 0; l < count; ++l) {
    Matrix p = base;
    for (Eigen::Index k = 0; k < p.size(); ++k) p.data()[k] += z(gen);
    s.paths.push_back(p);
  }
  return s;
}

TEST(NelderMead, Rosenbrock) {
  auto f = [](const Vector& x) { return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2); };
  NelderMeadOptions o;
  o.max_evals = 4000;
  o.ftol = 1e-16;
  const Vector lo = Vector::Constant(2, -5.0), hi = Vector::Constant(2, 5.0);
  const MinimizeResult r = nelder_mead(f, Vector::Constant(2, -1.2), lo, hi, o);
  EXPECT_NEAR(r.x(0), 1.0, 1e-3);
  EXPECT_NEAR(r.x(1), 1.0, 2e-3);
}

TEST(NelderMead, StaysInsideBounds) {
  auto f = [](const Vector& x) { return (x.array() + 2.0).square().sum(); };
  const MinimizeResult r = nelder_mead(f, Vector::Constant(2, 1.0), Vector::Zero(2), Vector::Constant(2, 3.0));
  EXPECT_GT(r.x.minCoeff(), 0.0);
  EXPECT_LT(r.x.maxCoeff(), 1e-3);
  EXPECT_THROW((void)nelder_mead(f, Vector::Zero(2), Vector::Zero(2), Vector::Ones(2)), std::invalid_argument);
}

TEST(BoxLeastSquares, InteriorMatchesNormalEquations) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix X(50, 3);
  Vector y(50);
  for (int r = 0; r < 50; ++r) {
    for (int c = 0; c < 3; ++c) X(r, c) = z(gen);
    y(r) = X.row(r).dot(Eigen::Vector3d(0.3, -0.2, 0.5)) + 0.1 * z(gen);
  }
  const Matrix G = X.transpose() * X;
  const Vector h = X.transpose() * y;
  double ssr = 0.0;
  const Vector b = box_least_squares(G, h, y.squaredNorm(), Vector::Constant(3, -1.0), Vector::Constant(3, 1.0), &ssr);
  const Vector ls = G.ldlt().solve(h);
  EXPECT_LT((b - ls).norm(), 1e-12);
  EXPECT_NEAR(ssr, (X * b - y).squaredNorm(), 1e-10);
}

TEST(BoxLeastSquares, ActiveBoundBeatsEveryFeasibleGridPoint) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix X(40, 2);
  Vector y(40);
  for (int r = 0; r < 40; ++r) {
    X(r, 0) = z(gen);
    X(r, 1) = z(gen);
    y(r) = 2.0 * X(r, 0) - 0.5 * X(r, 1) + 0.1 * z(gen);
  }
  const Matrix G = X.transpose() * X;
  const Vector h = X.transpose() * y;
  double ssr = 0.0;
  const Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
  const Vector b = box_least_squares(G, h, y.squaredNorm(), lo, hi, &ssr);
  EXPECT_DOUBLE_EQ(b(0), 1.0);
  EXPECT_DOUBLE_EQ(b(1), 0.0);
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const Eigen::Vector2d c(i / 20.0, j / 20.0);
      EXPECT_LE(ssr, (X * c - y).squaredNorm() + 1e-9);
    }
  }
}

TEST(EvalQ, MatchesDirectDensities) {
  const StateSpaceSpec s = fixtures::network_truth();
  const StateSpaceSimulation sim = simulate_state_space(s, 40, Vector::Zero(3), 3);
  const SmoothedPaths paths = jittered_paths(sim.states, 4, 0.05, 4);
  const GaussianPrior prior = fixtures::network_initial_prior();
  const QValue q = eval_Q(s, paths, sim.counts, prior);
  const Matrix g = g_paths(s, sim.counts);
  double q0 = 0.0, qx = 0.0, qn = 0.0;
  for (const Matrix& p : paths.paths) {
    for (int i = 0; i < 3; ++i) {
      const double var = prior.sd(i) * prior.sd(i);
      q0 += -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * p(0, i) * p(0, i) / var;
    }
    for (int t = 1; t <= 40; ++t) {
      qx += transition_log_density(s, p.row(t).transpose(), p.row(t - 1).transpose());
      for (int i = 0; i < 3; ++i) {
        const double mean = link(s, i, p(t, i), g(t - 1, i)) * 0.1;
        const auto n = static_cast<double>(sim.counts.counts(t - 1, i));
        qn += std::log(std::pow(mean, n) * std::exp(-mean) / std::tgamma(n + 1.0));
      }
    }
  }
  EXPECT_NEAR(q.initial, q0 / 4.0, 1e-10);
  EXPECT_NEAR(q.transition, qx / 4.0, 1e-9);
  EXPECT_NEAR(q.counts, qn / 4.0, 1e-9);
  EXPECT_DOUBLE_EQ(q.total(), q.transition + q.counts);
}

TEST(EvalQ, SilentCountsGiveMinusExposure) {
  const StateSpaceSpec s = fixtures::lgcp_truth();
  const CountSeries c = CountSeries::from_counts(CountMatrix::Zero(20, 1), 0.1);
  const SmoothedPaths paths = jittered_paths(Matrix::Constant(21, 1, 0.4), 3, 0.3, 20);
  const QValue q = eval_Q(s, paths, c, default_initial_prior(s));
  double exposure = 0.0;
  for (const Matrix& p : paths.paths) {
    for (int t = 1; t <= 20; ++t) exposure += std::exp(p(t, 0)) * 0.1;
  }
  EXPECT_NEAR(q.counts, -exposure / 3.0, 1e-12);
}

TEST(EvalQ, TransitionTermPeaksAtResidualMatchedNoise) {
  const StateSpaceSpec truth = fixtures::lgcp_truth();
  const StateSpaceSimulation sim = simulate_state_space(truth, 500, Vector::Constant(1, 1.5), 21);
  const SmoothedPaths paths = true_paths(sim);
  StateSpaceSpec s = truth;
  s.estimate.mu = false;
  s.estimate.omega1 = false;
  const double best = mstep_dynamics(s, paths).epsilon(0);
  const GaussianPrior prior = default_initial_prior(s);
  auto qx = [&](double eps) {
    StateSpaceSpec e = s;
    e.epsilon(0) = eps;
    return eval_Q(e, paths, sim.counts, prior).transition;
  };
  const double peak = qx(best);
  for (double f : {0.5, 0.9, 0.99, 1.01, 1.1, 2.0}) EXPECT_LT(qx(best * f), peak);
}

TEST(MstepDynamics, NoiselessPathsRecoveredExactly) {
  // x_t = beta x_{t-1} + c with beta = 0.8, c = 0.3 (omega1 = 2, mu = 1.5).
  StateSpaceSpec s = StateSpaceSpec::univariate(1.0, 1.0, 1.0, 0.5, 1.5, 0.1);
  Matrix path(60, 1);
  path(0, 0) = -2.0;
  for (int t = 1; t < 60; ++t) path(t, 0) = 0.8 * path(t - 1, 0) + 0.3;
  SmoothedPaths p;
  p.paths.push_back(path);
  const StateSpaceSpec fit = mstep_dynamics(s, p);
  EXPECT_NEAR(fit.omega1(0), 2.0, 1e-10);
  EXPECT_NEAR(fit.mu(0), 1.5, 1e-10);
  EXPECT_LT(fit.epsilon(0), 1e-5);
}

TEST(MstepDynamics, ConstantPathsWarnAndStayFinite) {
  StateSpaceSpec s = StateSpaceSpec::univariate(1.0, 1.0, 1.0, 0.5, 1.5, 0.1);
  SmoothedPaths p;
  p.paths.push_back(Matrix::Constant(30, 1, 0.7));
  const StateSpaceSpec fit = mstep_dynamics(s, p);
  EXPECT_TRUE(fit.parameter_vector().allFinite());
  EXPECT_NO_THROW(fit.validate());
}

TEST(MstepFromTruthSmoothing, LgcpFixture) {
  const StateSpaceSpec truth = fixtures::lgcp_truth();
  const StateSpaceSimulation sim = simulate_state_space(truth, fixtures::kLgcpSteps,
                                                        Vector::Constant(1, fixtures::kLgcpX0), 22);
  ParticleOptions opt;
  opt.seed = 23;
  const TransitionModel tr = make_transition(truth);
  const ParticleCloud cloud = particle_filter(tr, default_initial_prior(truth),
                                              make_observation(truth, sim.counts, g_paths(truth, sim.counts)),
                                              sim.counts.steps(), opt);
  const SmoothedPaths paths = backward_simulate(cloud, tr, 100, 24);
  const StateSpaceSpec dyn = mstep_dynamics(truth, paths);
  // The baseline's sampling spread at this length (sd about 0.25) is of the
  // order of the tolerance, so it is compared with the complete-data
  // estimate from the simulated states instead of the truth.
  const StateSpaceSpec complete = mstep_dynamics(truth, true_paths(sim));
  EXPECT_NEAR(dyn.mu(0), complete.mu(0), 0.2 * complete.mu(0));
  EXPECT_NEAR(dyn.omega1(0), 0.5, 0.2 * 0.5);
  EXPECT_NEAR(dyn.epsilon(0), 2.5, 0.2 * 2.5);

  StateSpaceSpec alpha_only = truth;
  alpha_only.estimate = ParameterMask{false, false, false, false, true, false, false, false};
  alpha_only.alpha(0, 0) = 0.25;
  const StateSpaceSpec obs = mstep_observation(alpha_only, paths, sim.counts);
  EXPECT_NEAR(obs.alpha(0, 0), 0.5, 0.15 * 0.5);
  EXPECT_EQ(obs.omega2, truth.omega2);
}

TEST(MstepDynamics, RecoversOrnsteinUhlenbeckFromTruePath) {
  const StateSpaceSpec truth = fixtures::lgcp_truth();
  const StateSpaceSimulation sim = simulate_state_space(truth, 100000, Vector::Constant(1, 1.5), 6);
  StateSpaceSpec start = fixtures::lgcp_init();
  const StateSpaceSpec fit = mstep_dynamics(start, true_paths(sim));
  EXPECT_NEAR(fit.epsilon(0), 2.5, 0.03);
  EXPECT_NEAR(fit.omega1(0), 0.5, 0.1);
  EXPECT_NEAR(fit.mu(0), 1.5, 0.6);
  EXPECT_EQ(fit.alpha, start.alpha);
  EXPECT_EQ(fit.omega2, start.omega2);
}

TEST(MstepDynamics, RecoversNetworkDiffusion) {
  const StateSpaceSpec truth = fixtures::network_truth();
  const StateSpaceSimulation sim = simulate_state_space(truth, 100000, Vector::Zero(3), 7);
  StateSpaceSpec start = truth;
  start.eta.setConstant(0.4);
  start.omega1.setConstant(2.0);
  start.mu.setConstant(1.0);
  const StateSpaceSpec fit = mstep_dynamics(start, true_paths(sim));
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(fit.eta(i), 0.1, 0.02);
    EXPECT_NEAR(fit.omega1(i), 5.0, 0.2);
    EXPECT_NEAR(fit.mu(i), 0.5, 0.05);
    EXPECT_NEAR(fit.epsilon(i), 0.125, 0.002);
  }
}

TEST(MstepDynamics, FrozenFamiliesStayPutAndQxDoesNotDrop) {
  const StateSpaceSpec truth = fixtures::network_truth();
  const StateSpaceSimulation sim = simulate_state_space(truth, 2000, Vector::Zero(3), 8);
  const SmoothedPaths paths = jittered_paths(sim.states, 5, 0.02, 9);
  const GaussianPrior prior = fixtures::network_initial_prior();
  for (int mask = 0; mask < 16; ++mask) {
    StateSpaceSpec start = truth;
    start.mu.setConstant(0.8);
    start.omega1.setConstant(3.0);
    start.eta.setConstant(0.3);
    start.epsilon.setConstant(0.2);
    start.estimate.mu = (mask & 1) != 0;
    start.estimate.omega1 = (mask & 2) != 0;
    start.estimate.eta = (mask & 4) != 0;
    start.estimate.epsilon = (mask & 8) != 0;
    const StateSpaceSpec fit = mstep_dynamics(start, paths);
    if (!start.estimate.mu) EXPECT_EQ(fit.mu, start.mu);
    if (!start.estimate.omega1) EXPECT_EQ(fit.omega1, start.omega1);
    if (!start.estimate.eta) EXPECT_EQ(fit.eta, start.eta);
    if (!start.estimate.epsilon) EXPECT_EQ(fit.epsilon, start.epsilon);
    EXPECT_GE(eval_Q(fit, paths, sim.counts, prior).transition,
              eval_Q(start, paths, sim.counts, prior).transition - 1e-9);
    EXPECT_NO_THROW(fit.validate());
  }
}

TEST(MstepObservation, ImprovesCountTermAndRecoversExcitation) {
  const StateSpaceSpec truth = fixtures::lgcp_truth();
  const StateSpaceSimulation sim = simulate_state_space(truth, 20000, Vector::Constant(1, 1.5), 10);
  const SmoothedPaths paths = true_paths(sim);
  const StateSpaceSpec start = fixtures::lgcp_init();
  const StateSpaceSpec fit = mstep_observation(start, paths, sim.counts);
  const GaussianPrior prior = default_initial_prior(start);
  EXPECT_GT(eval_Q(fit, paths, sim.counts, prior).counts, eval_Q(start, paths, sim.counts, prior).counts);
  EXPECT_NEAR(fit.alpha(0, 0), 0.5, 0.1);
  EXPECT_NEAR(fit.omega2(0), 1.5, 0.5);
  EXPECT_EQ(fit.mu, start.mu);
}

TEST(MstepObservation, KeepsIncumbentWhenFrozen) {
  StateSpaceSpec s = fixtures::logistic_truth();
  s.estimate.alpha = false;
  s.estimate.omega2 = false;
  s.estimate.A = false;
  s.estimate.B = false;
  const StateSpaceSimulation sim = simulate_state_space(s, 200, Vector::Constant(1, 1.0), 11);
  const StateSpaceSpec fit = mstep_observation(s, true_paths(sim), sim.counts);
  EXPECT_EQ(fit.parameter_vector(), s.parameter_vector());
}

TEST(RelativeError, FixtureStartingPoint) {
  EXPECT_NEAR(relative_error(fixtures::lgcp_init(), fixtures::lgcp_truth()), std::sqrt(4.5 / 11.25), 1e-15);
  EXPECT_DOUBLE_EQ(relative_error(fixtures::lgcp_truth(), fixtures::lgcp_truth()), 0.0);
}

TEST(EmFit, QNeverDropsAndRunIsReproducible) {
  const StateSpaceSpec truth = fixtures::lgcp_truth();
  const StateSpaceSimulation sim = simulate_state_space(truth, 300, Vector::Constant(1, 1.5), 12);
  EmConfig cfg;
  cfg.particles = 80;
  cfg.max_iters = 4;
  cfg.seed = 13;
  cfg.optimizer.max_evals = 150;
  set_max_threads(1);
  const EmResult a = em_fit(sim.counts, fixtures::lgcp_init(), cfg, truth);
  set_max_threads(4);
  const EmResult b = em_fit(sim.counts, fixtures::lgcp_init(), cfg, truth);
  set_max_threads(0);
  ASSERT_EQ(a.trace.size(), 4u);
  for (const EmIteration& it : a.trace) EXPECT_GE(it.q_after, it.q_before - 1e-9 * std::abs(it.q_before));
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) EXPECT_EQ(a.trace[k].params, b.trace[k].params);
  EXPECT_EQ(a.smoothed_intensity.size(), 20u);
  EXPECT_EQ(a.smoothed_intensity.front().rows(), 300);
  EXPECT_EQ(a.filtered_intensity_variance.size(), 300);
}

TEST(EmFit, StopsOnSmallParameterChange) {
  const StateSpaceSpec truth = fixtures::lgcp_truth();
  const StateSpaceSimulation sim = simulate_state_space(truth, 100, Vector::Constant(1, 1.5), 14);
  EmConfig cfg;
  cfg.particles = 40;
  cfg.max_iters = 50;
  cfg.tol = 1.0;
  const EmResult r = em_fit(sim.counts, fixtures::lgcp_init(), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_FALSE(r.trace.front().relative_error.has_value());
}

TEST(EmFit, RejectsMismatchedInput) {
  const StateSpaceSpec s = fixtures::network_truth();
  const CountSeries c = CountSeries::from_counts(CountMatrix::Zero(10, 2), 0.1);
  EXPECT_THROW((void)em_fit(c, s, EmConfig{}), std::invalid_argument);
  const CountSeries wrong_dt = CountSeries::from_counts(CountMatrix::Zero(10, 3), 1.0);
  EXPECT_THROW((void)em_fit(wrong_dt, s, EmConfig{}), std::invalid_argument);
}

}  // namespace
}  // namespace hawkesnet
