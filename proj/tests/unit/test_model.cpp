#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hawkesnet/fixtures.hpp"
#include "hawkesnet/model.hpp"
#include "support/random_instances.hpp"

namespace hawkesnet {
namespace {

using testing::random_counts;
using testing::random_params;
using testing::scalar_params;

CountSeries column(std::initializer_list<std::int64_t> values, double dt = 1.0) {
  CountMatrix c(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index k = 0;
  for (auto v : values) c(k++, 0) = v;
  return CountSeries::from_counts(c, dt);
}

TEST(IntensityPath, NoExcitationIsBaseline) {
  std::mt19937_64 gen(1);
  CountSeries counts = random_counts(gen, 40, 3);
  HawkesParams p;
  p.mu = Vector::Constant(3, 5.0);
  p.alpha = Matrix::Zero(3, 3);
  p.gamma = DecaySpec::scalar(0.3, 3);
  const IntensityPath lam = intensity_path(p, counts);
  EXPECT_TRUE((lam.array() == 5.0).all());
}

TEST(IntensityPath, HandRecursionSingleNode) {
  // Rows hold the counts of bins 1, 2, 3; bin 0 is empty by convention.
  const auto p = scalar_params(1.0, 0.2, 0.5);
  const IntensityPath lam = intensity_path(p, column({2, 0, 7}));
  EXPECT_DOUBLE_EQ(lam(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(lam(1, 0), 1.4);
  EXPECT_DOUBLE_EQ(lam(2, 0), 1.2);
  EXPECT_DOUBLE_EQ(closed_form_intensity(p, column({2, 0, 7}), 2)(0), 1.2);
}

TEST(IntensityPath, NineNodeGroundTruthIsValid) {
  for (int truth = 1; truth <= 3; ++truth) {
    const HawkesParams p = fixtures::nine_node_truth(truth);
    EXPECT_NO_THROW(p.validate());
    EXPECT_EQ(p.nodes(), 9u);
    EXPECT_DOUBLE_EQ(p.mu(0), 5.0);
    EXPECT_DOUBLE_EQ(p.mu(8), 0.3);
    EXPECT_DOUBLE_EQ(p.gamma(0, 0), 0.175);
  }
}

TEST(IntensityPath, MatchesClosedFormOnRandomInstances) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 1 + static_cast<int>(gen() % 5);
    const int K = 1 + static_cast<int>(gen() % 50);
    const CountSeries counts = random_counts(gen, K, m);
    const HawkesParams p = random_params(gen, m, rep % 2 == 1);
    const IntensityPath lam = intensity_path(p, counts);
    for (int k = 0; k < K; ++k) {
      const Vector direct = closed_form_intensity(p, counts, static_cast<std::size_t>(k));
      for (int i = 0; i < m; ++i) {
        EXPECT_NEAR(lam(k, i), direct(i), 1e-12 * std::abs(direct(i)));
      }
    }
  }
}

TEST(IntensityPath, ClosedFormAtZeroIsBaseline) {
  std::mt19937_64 gen(3);
  const HawkesParams p = random_params(gen, 4);
  const CountSeries counts = random_counts(gen, 10, 4);
  EXPECT_EQ(closed_form_intensity(p, counts, 0), p.mu);
}

TEST(IntensityPath, BoundedBelowByBaseline) {
  std::mt19937_64 gen(11);
  const HawkesParams p = random_params(gen, 4, true);
  const IntensityPath lam = intensity_path(p, random_counts(gen, 50, 4));
  EXPECT_GE(lam.minCoeff(), p.mu.minCoeff());
}

TEST(IntensityPath, SegmentsRestartAtBaseline) {
  const auto p = scalar_params(1.0, 0.5, 0.5);
  CountSeries counts = column({3, 3, 0, 1});
  counts.segment_starts = {0, 2};
  const IntensityPath lam = intensity_path(p, counts);
  EXPECT_DOUBLE_EQ(lam(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(lam(3, 0), 1.0);
  EXPECT_DOUBLE_EQ(closed_form_intensity(p, counts, 3)(0), 1.0);
}

TEST(IntensityPath, RejectsMismatchedShapes) {
  std::mt19937_64 gen(5);
  const HawkesParams p = random_params(gen, 3);
  EXPECT_THROW((void)intensity_path(p, random_counts(gen, 5, 2)), std::invalid_argument);
  HawkesParams bad = p;
  bad.mu(0) = std::nan("");
  EXPECT_THROW((void)intensity_path(bad, random_counts(gen, 5, 3)), std::invalid_argument);
}

TEST(Nll, SingleTermHandValue) {
  const auto p = scalar_params(2.0, 0.0, 0.5);
  EXPECT_NEAR(nll(p, column({3})), 2.0 - 3.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(nll(p, column({3})), -0.0794415416798, 1e-12);
}

TEST(Nll, ZeroCountsIsTotalRate) {
  std::mt19937_64 gen(2);
  const HawkesParams p = random_params(gen, 3);
  const CountSeries counts = CountSeries::from_counts(CountMatrix::Zero(20, 3), 0.5);
  EXPECT_NEAR(nll(p, counts), intensity_path(p, counts).sum() * 0.5, 1e-12);
}

TEST(Nll, ZeroIntensityAtEventIsDomainError) {
  HawkesParams p = scalar_params(1.0, 0.0, 0.5);
  p.mu(0) = 0.0;
  try {
    (void)nll(p, column({0, 2}));
    FAIL() << "expected a domain error";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("bin 1"), std::string::npos);
  }
}

TEST(Nll, PermutationInvariant) {
  std::mt19937_64 gen(9);
  const HawkesParams p = random_params(gen, 4, true);
  const CountSeries counts = random_counts(gen, 30, 4);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  EXPECT_NEAR(nll(p, counts), nll(p.permuted(perm), permute_nodes(counts, perm)), 1e-9);
}

TEST(Nll, FullNllAddsFactorialConstant) {
  const auto p = scalar_params(2.0, 0.0, 0.5);
  EXPECT_NEAR(full_nll(p, column({3})) - nll(p, column({3})), std::log(6.0), 1e-12);
}

TEST(Nll, MinimizedNearTruthOnLongSimulation) {
  const HawkesParams truth = fixtures::nine_node_truth(1);
  const Simulation sim = simulate_hawkes(truth, 20000, 42);
  HawkesParams perturbed = truth;
  perturbed.mu *= 1.2;
  perturbed.alpha *= 1.2;
  EXPECT_LT(nll(truth, sim.counts), nll(perturbed, sim.counts));
}

TEST(Simulate, PoissonMeanMatches) {
  const auto p = scalar_params(5.0, 0.0, 0.5);
  const Simulation sim = simulate_hawkes(p, 10000, 17);
  const double mean = sim.counts.mean_counts()(0);
  EXPECT_NEAR(mean, 5.0, 3.0 * std::sqrt(5.0 / 10000.0));
}

TEST(Simulate, StationaryMeanOfSelfExcitingTruth) {
  const HawkesParams p = fixtures::nine_node_truth(1);
  const Simulation sim = simulate_hawkes(p, 200000, 5);
  const Vector expected = stationary_mean(p);
  const Vector mean = sim.counts.mean_counts();
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(mean(i), expected(i), 0.03 * expected(i)) << i;
}

TEST(Simulate, DeterministicForSeed) {
  const HawkesParams p = fixtures::nine_node_truth(3);
  const Simulation a = simulate_hawkes(p, 500, 99);
  const Simulation b = simulate_hawkes(p, 500, 99);
  const Simulation c = simulate_hawkes(p, 500, 100);
  EXPECT_EQ(a.counts.counts, b.counts.counts);
  EXPECT_EQ(a.intensity, b.intensity);
  EXPECT_NE(a.counts.counts, c.counts.counts);
}

TEST(Simulate, IntensityMatchesRecursionOnOutput) {
  const HawkesParams p = fixtures::nine_node_truth(2);
  const Simulation sim = simulate_hawkes(p, 300, 3);
  EXPECT_LT((sim.intensity - intensity_path(p, sim.counts)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Stability, ZeroMatrix) {
  HawkesParams p = scalar_params(1.0, 0.0, 0.3);
  EXPECT_EQ(stability_margin(p), 0.0);
}

TEST(Stability, ScalarCase) {
  EXPECT_NEAR(stability_margin(scalar_params(1.0, 0.4, 0.2)), 0.5, 1e-14);
}

TEST(Stability, MatchesDenseEigensolver) {
  std::mt19937_64 gen(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    HawkesParams p;
    p.mu = Vector::Ones(9);
    p.alpha = Matrix(9, 9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) p.alpha(i, j) = 0.2 * u(gen);
    p.gamma = DecaySpec::scalar(0.175, 9);
    const Matrix M = p.alpha / (1.0 - 0.175);
    const double oracle = Eigen::EigenSolver<Matrix>(M).eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_NEAR(stability_margin(p), oracle, 1e-8);
  }
}

TEST(Stability, HomogeneousInAlpha) {
  std::mt19937_64 gen(8);
  HawkesParams p = random_params(gen, 5);
  const double base = stability_margin(p);
  p.alpha *= 2.0;
  EXPECT_NEAR(stability_margin(p), 2.0 * base, 1e-10);
}

TEST(Stability, GroundTruthsAreStable) {
  for (int truth = 1; truth <= 3; ++truth) EXPECT_LT(stability_margin(fixtures::nine_node_truth(truth)), 1.0);
}

TEST(Stability, PerPairUsesRowMaximum) {
  HawkesParams p;
  p.mu = Vector::Ones(2);
  p.alpha = Matrix::Zero(2, 2);
  p.alpha(0, 0) = 0.4;
  Matrix g(2, 2);
  g << 0.2, 0.6, 0.1, 0.1;
  p.gamma = DecaySpec::per_pair(g);
  EXPECT_NEAR(stability_margin(p), 0.4 / 0.4, 1e-12);
}

}  // namespace
}  // namespace hawkesnet
