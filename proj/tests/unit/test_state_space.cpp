#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hawkesnet/fixtures.hpp"
#include "hawkesnet/state_space.hpp"

namespace hawkesnet {
namespace {

CountSeries column(std::initializer_list<std::int64_t> values, double dt = 0.1) {
  CountMatrix c(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index k = 0;
  for (auto v : values) c(k++, 0) = v;
  return CountSeries::from_counts(c, dt);
}

TEST(GPaths, HandRecursion) {
  const StateSpaceSpec s = StateSpaceSpec::univariate(1.0, 0.5, 1.0, 0.5, 1.5, 0.1);
  const Matrix g = g_paths(s, column({2, 0, 1, 0}));
  EXPECT_DOUBLE_EQ(g(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(g(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(g(2, 0), 0.85);
  EXPECT_DOUBLE_EQ(g(3, 0), 0.85 * 0.85 + 0.5);
}

TEST(GPaths, ResetAtSegments) {
  const StateSpaceSpec s = StateSpaceSpec::univariate(1.0, 0.5, 1.0, 0.5, 1.5, 0.1);
  CountSeries c = column({2, 3, 1, 4});
  c.segment_starts = {0, 2};
  const Matrix g = g_paths(s, c);
  EXPECT_DOUBLE_EQ(g(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(g(3, 0), 0.5);
}

TEST(GPaths, NetworkUsesSourceCounts) {
  StateSpaceSpec s = fixtures::network_truth();
  CountMatrix c = CountMatrix::Zero(2, 3);
  c(0, 1) = 2;
  const Matrix g = g_paths(s, CountSeries::from_counts(c, 0.1));
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(g(1, i), 2.0 * s.alpha(i, 1));
}

TEST(GPaths, SingleImpulseDecaysGeometrically) {
  const StateSpaceSpec s = StateSpaceSpec::univariate(1.0, 0.5, 1.0, 0.7, 3.0, 0.1);
  const Matrix g = g_paths(s, column({1, 0, 0, 0, 0, 0}));
  for (int r = 1; r < 6; ++r) EXPECT_NEAR(g(r, 0), 0.7 * std::pow(0.7, r - 1), 1e-15);
  StateSpaceSpec none = s;
  none.alpha.setZero();
  EXPECT_EQ(g_paths(none, column({3, 1, 2})), Matrix::Zero(3, 1));
}

TEST(GPaths, NetworkInitialAlphaTwoSteps) {
  const StateSpaceSpec s = fixtures::network_init();
  CountMatrix c(3, 3);
  c << 1, 0, 2,
       0, 3, 1,
       0, 0, 0;
  const Vector g1 = g_recursion(s, Vector::Zero(3), c.row(0).cast<double>().transpose());
  const Vector g2 = g_recursion(s, g1, c.row(1).cast<double>().transpose());
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(g1(i), 0.9 * 3.0, 1e-14);
    EXPECT_NEAR(g2(i), 0.1 * 2.7 + 0.9 * 4.0, 1e-14);
  }
  const Matrix g = g_paths(s, CountSeries::from_counts(c, 0.1));
  EXPECT_NEAR(g(2, 1), g2(1), 1e-14);
}

TEST(Transition, NoiselessFixedPoint) {
  const StateSpaceSpec s = fixtures::lgcp_truth();
  const Vector x = transition(s, s.mu, Vector::Zero(1));
  EXPECT_NEAR(x(0), 1.5, 1e-15);
}

TEST(Transition, ZeroDiffusionDecouplesNodes) {
  StateSpaceSpec s = fixtures::network_truth();
  s.eta.setZero();
  const Vector x(Eigen::Vector3d(0.3, -1.0, 2.0));
  const Vector z(Eigen::Vector3d(0.1, 0.2, -0.3));
  const Vector next = transition(s, x, z);
  for (int i = 0; i < 3; ++i) {
    const StateSpaceSpec u = StateSpaceSpec::univariate(0.5, 5.0, 0.125, 1.0, 9.0, 0.1);
    EXPECT_DOUBLE_EQ(next(i), transition(u, Vector::Constant(1, x(i)), Vector::Constant(1, z(i)))(0));
  }
}

TEST(Link, SpotValues) {
  const StateSpaceSpec u = StateSpaceSpec::univariate(1.0, 0.5, 1.0, 0.5, 1.5, 0.1);
  EXPECT_DOUBLE_EQ(link(u, 0, 0.0, 0.5), 1.5);
  // exp(x) underflows to zero, leaving z = 0.
  EXPECT_DOUBLE_EQ(link(fixtures::logistic_truth(), 0, -1e6, 0.0), 2.4);
}

TEST(Link, ExponentialAndLogistic) {
  const StateSpaceSpec u = StateSpaceSpec::univariate(1.0, 0.5, 1.0, 0.5, 1.5, 0.1);
  EXPECT_DOUBLE_EQ(link(u, 0, 0.3, 0.2), std::exp(0.3) + 0.2);
  const StateSpaceSpec l = fixtures::logistic_truth();
  const double z = std::exp(0.3) + 0.2;
  EXPECT_DOUBLE_EQ(link(l, 0, 0.3, 0.2), 12.0 / (1.0 + 4.0 * std::exp(-z)));
}

TEST(Link, ExtremeStatesStayFinite) {
  const StateSpaceSpec u = StateSpaceSpec::univariate(1.0, 0.5, 1.0, 0.5, 1.5, 0.1);
  EXPECT_TRUE(std::isfinite(link(u, 0, 1e6, 0.0)));
  EXPECT_GT(link(u, 0, -1e6, 0.0), 0.0);
  const StateSpaceSpec l = fixtures::logistic_truth();
  EXPECT_DOUBLE_EQ(link(l, 0, 1e6, 0.0), 12.0);
  EXPECT_GT(link(l, 0, -1e6, 0.0), 0.0);
}

TEST(Transition, NetworkMeanByHand) {
  StateSpaceSpec s = fixtures::network_truth();
  const Vector x(Eigen::Vector3d(0.2, -0.4, 1.0));
  const Vector mean = transition_mean(s, x);
  const double keep = 1.0 - 5.0 * 0.1;
  const double drift = 5.0 * 0.5 * 0.1;
  EXPECT_DOUBLE_EQ(mean(0), (0.9 * 0.2 + 0.1 * 0.6) * keep + drift);
  EXPECT_DOUBLE_EQ(mean(1), (0.9 * -0.4 + 0.1 * 1.2) * keep + drift);
  EXPECT_DOUBLE_EQ(mean(2), (0.9 * 1.0 + 0.1 * -0.2) * keep + drift);
}

TEST(Transition, UnivariateIsOrnsteinUhlenbeckStep) {
  const StateSpaceSpec s = fixtures::lgcp_truth();
  const Vector x = Vector::Constant(1, 2.0);
  const Vector next = transition(s, x, Vector::Constant(1, 0.5));
  EXPECT_DOUBLE_EQ(next(0), 0.95 * 2.0 + 0.5 * 1.5 * 0.1 + 2.5 * std::sqrt(0.1) * 0.5);
}

TEST(Transition, LogDensityIsGaussian) {
  const StateSpaceSpec s = fixtures::lgcp_truth();
  const Vector prev = Vector::Constant(1, 0.7);
  const Vector x = Vector::Constant(1, 1.1);
  const double mean = 0.95 * 0.7 + 0.075;
  const double var = 6.25 * 0.1;
  const double expected = -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * (1.1 - mean) * (1.1 - mean) / var;
  EXPECT_NEAR(transition_log_density(s, x, prev), expected, 1e-14);
}

TEST(Spec, ParameterVectorOrder) {
  EXPECT_EQ(fixtures::lgcp_truth().parameter_vector(), (Vector(5) << 1.5, 0.5, 2.5, 0.5, 1.5).finished());
  EXPECT_EQ(fixtures::logistic_init().parameter_vector(),
            (Vector(7) << 1.0, 0.25, 0.5, 4.5, 1.0, 24.0, 8.0).finished());
  const Vector v = fixtures::network_truth().parameter_vector();
  ASSERT_EQ(v.size(), 24);
  EXPECT_DOUBLE_EQ(v(12 + 2), 2.0);
  EXPECT_DOUBLE_EQ(v(12 + 3), 2.0);
  EXPECT_DOUBLE_EQ(v(23), 9.0);
}

TEST(Spec, RejectsInvalid) {
  StateSpaceSpec s = fixtures::lgcp_truth();
  s.omega1(0) = 10.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = fixtures::lgcp_truth();
  s.eta(0) = 0.2;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = fixtures::network_truth();
  s.alpha(0, 1) = -0.1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = fixtures::logistic_truth();
  s.B = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_NO_THROW(fixtures::network_init().validate());
}

TEST(ModelKind, NamesRoundTrip) {
  for (ModelKind k : {ModelKind::lgcp_univariate, ModelKind::lgcp_logistic, ModelKind::lgcp_network}) {
    EXPECT_EQ(parse_model_kind(model_kind_name(k)), k);
  }
  EXPECT_THROW((void)parse_model_kind("hawkes"), std::invalid_argument);
}

TEST(Simulate, DeterministicAndConsistent) {
  const StateSpaceSpec s = fixtures::network_truth();
  const StateSpaceSimulation a = simulate_state_space(s, 300, Vector::Zero(3), 5);
  const StateSpaceSimulation b = simulate_state_space(s, 300, Vector::Zero(3), 5);
  EXPECT_EQ(a.counts.counts, b.counts.counts);
  EXPECT_EQ(a.states, b.states);
  const Matrix g = g_paths(s, a.counts);
  for (int r = 0; r < 300; r += 17) {
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(a.intensity(r, i), link(s, i, a.states(r + 1, i), g(r, i)));
  }
}

TEST(Simulate, StationaryStateMean) {
  // Without diffusion x is an AR(1) around mu.
  StateSpaceSpec s = StateSpaceSpec::univariate(0.8, 2.0, 0.5, 0.0, 1.0, 0.1);
  const StateSpaceSimulation sim = simulate_state_space(s, 200000, Vector::Constant(1, 0.8), 3);
  const double var = 0.25 * 0.1 / (1.0 - 0.8 * 0.8);
  const double se = std::sqrt(var / 200000.0 * (1.0 + 0.8) / (1.0 - 0.8));
  EXPECT_NEAR(sim.states.col(0).mean(), 0.8, 5.0 * se);
}

}  // namespace
}  // namespace hawkesnet
