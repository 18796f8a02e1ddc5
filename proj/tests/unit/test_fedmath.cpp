#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <vector>

#include "cefl/error.hpp"
#include "cefl/fedmath.hpp"

using namespace cefl;

namespace {

ClientDataset random_dataset(std::mt19937_64& rng, int samples, int d, LossKind kind) {
  std::normal_distribution<double> n(0.0, 1.0);
  ClientDataset ds;
  ds.features.resize(samples, d);
  ds.labels.resize(samples);
  for (int r = 0; r < samples; ++r) {
    for (int c = 0; c < d; ++c) ds.features(r, c) = n(rng);
    const double z = n(rng);
    ds.labels(r) = kind == LossKind::Ridge ? z : (z >= 0 ? 1.0 : -1.0);
  }
  return ds;
}

ModelVector random_vector(std::mt19937_64& rng, int d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  ModelVector v(d);
  for (auto& x : v) x = n(rng);
  return v;
}

Eigen::VectorXd finite_difference(const ModelVector& w, const ClientDataset& ds,
                                  const LossSpec& spec) {
  Eigen::VectorXd g(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(w(j)));
    ModelVector a = w, b = w;
    a(j) += h;
    b(j) -= h;
    g(j) = (local_loss(a, ds, spec) - local_loss(b, ds, spec)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(LocalGradient, RidgeZeroLabelsAtOriginIsZero) {
  ClientDataset ds;
  ds.features = Eigen::MatrixXd::Random(4, 3);
  ds.labels = Eigen::VectorXd::Zero(4);
  EXPECT_EQ(local_gradient(ModelVector::Zero(3), ds, {LossKind::Ridge, 0.1}).norm(), 0.0);
}

TEST(LocalGradient, RidgeSingleSampleAtOrigin) {
  ClientDataset ds;
  ds.features = Eigen::RowVector3d(1.5, -2.0, 0.25);
  ds.labels = Eigen::VectorXd::Constant(1, 3.0);
  const auto g = local_gradient(ModelVector::Zero(3), ds, {LossKind::Ridge, 0.1});
  EXPECT_DOUBLE_EQ(g(0), -4.5);
  EXPECT_DOUBLE_EQ(g(1), 6.0);
  EXPECT_DOUBLE_EQ(g(2), -0.75);
}

TEST(LocalGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  for (LossKind kind : {LossKind::Ridge, LossKind::Logistic}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto ds = random_dataset(rng, 5, 4, kind);
      const auto w = random_vector(rng, 4);
      const LossSpec spec{kind, 0.1};
      const auto g = local_gradient(w, ds, spec);
      const auto fd = finite_difference(w, ds, spec);
      EXPECT_LE((g - fd).norm(), 1e-6 * std::max(1.0, g.norm()));
    }
  }
}

TEST(LocalGradient, DimensionMismatchThrows) {
  ClientDataset ds;
  ds.features = Eigen::MatrixXd::Ones(2, 3);
  ds.labels = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(local_gradient(ModelVector::Zero(2), ds, {}), InvalidInput);
}

TEST(LocalGradient, EmptyDatasetThrows) {
  ClientDataset ds;
  ds.features.resize(0, 2);
  ds.labels.resize(0);
  EXPECT_THROW(local_gradient(ModelVector::Zero(2), ds, {}), InvalidInput);
}

TEST(LocalUpdate, FixedPointAtLocalMinimizer) {
  std::mt19937_64 rng(2);
  const auto ds = random_dataset(rng, 8, 3, LossKind::Ridge);
  const std::vector<ClientDataset> one{ds};
  const auto opt = optimal_value(one, {LossKind::Ridge, 0.1});
  const auto out = local_update(opt.w_star, ds, {LossKind::Ridge, 0.1}, 0.1, 1);
  EXPECT_LE((out - opt.w_star).norm(), 1e-12);
}

TEST(LocalUpdate, OneEpochIsOneGradientStep) {
  std::mt19937_64 rng(3);
  const auto ds = random_dataset(rng, 6, 3, LossKind::Ridge);
  const auto w = random_vector(rng, 3);
  const LossSpec spec{LossKind::Ridge, 0.1};
  const ModelVector expected = w - 0.3 * local_gradient(w, ds, spec);
  EXPECT_TRUE((local_update(w, ds, spec, 0.3, 1).array() == expected.array()).all());
}

TEST(LocalUpdate, ThreeEpochsComposeBitExactly) {
  std::mt19937_64 rng(4);
  const auto ds = random_dataset(rng, 6, 3, LossKind::Ridge);
  const auto w = random_vector(rng, 3);
  const LossSpec spec{LossKind::Ridge, 0.1};
  ModelVector step = w;
  for (int e = 0; e < 3; ++e) step = local_update(step, ds, spec, 0.2, 1);
  EXPECT_TRUE((local_update(w, ds, spec, 0.2, 3).array() == step.array()).all());
}

TEST(LocalUpdate, RejectsBadArguments) {
  ClientDataset ds;
  ds.features = Eigen::MatrixXd::Ones(2, 2);
  ds.labels = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(local_update(ModelVector::Zero(2), ds, {}, 0.0, 1), InvalidInput);
  EXPECT_THROW(local_update(ModelVector::Zero(2), ds, {}, 0.1, 0), InvalidInput);
}

TEST(GlobalLoss, SingleClientEqualsLocalLoss) {
  std::mt19937_64 rng(5);
  const std::vector<ClientDataset> one{random_dataset(rng, 5, 3, LossKind::Ridge)};
  const auto w = random_vector(rng, 3);
  EXPECT_DOUBLE_EQ(global_loss(w, one, {}), local_loss(w, one[0], {}));
}

TEST(GlobalLoss, IdenticalClientsEqualEitherLocalLoss) {
  std::mt19937_64 rng(6);
  const auto ds = random_dataset(rng, 5, 3, LossKind::Ridge);
  const std::vector<ClientDataset> two{ds, ds};
  const auto w = random_vector(rng, 3);
  EXPECT_NEAR(global_loss(w, two, {}), local_loss(w, ds, {}), 1e-15);
}

TEST(GlobalLoss, MatchesPooledDataset) {
  std::mt19937_64 rng(7);
  for (LossKind kind : {LossKind::Ridge, LossKind::Logistic}) {
    const std::vector<ClientDataset> three{random_dataset(rng, 4, 3, kind),
                                           random_dataset(rng, 7, 3, kind),
                                           random_dataset(rng, 2, 3, kind)};
    const auto w = random_vector(rng, 3);
    const LossSpec spec{kind, 0.1};
    const double pooled = local_loss(w, pool(three), spec);
    EXPECT_NEAR(global_loss(w, three, spec), pooled, 1e-13 * std::abs(pooled));
    EXPECT_LE((global_gradient(w, three, spec) - local_gradient(w, pool(three), spec)).norm(),
              1e-13);
  }
}

TEST(SmoothnessConstants, OneHotIdentity) {
  const int d = 4;
  ClientDataset ds;
  ds.features = Eigen::MatrixXd::Identity(d, d);
  ds.labels = Eigen::VectorXd::Ones(d);
  const std::vector<ClientDataset> one{ds};
  const auto c = smoothness_constants(one, {LossKind::Ridge, 0.1});
  EXPECT_NEAR(c.L, 1.0 / d + 0.1, 1e-12);
  EXPECT_NEAR(c.mu, 1.0 / d + 0.1, 1e-12);
}

TEST(SmoothnessConstants, ZeroFeaturesGiveLambda) {
  ClientDataset ds;
  ds.features = Eigen::MatrixXd::Zero(3, 2);
  ds.labels = Eigen::VectorXd::Ones(3);
  const std::vector<ClientDataset> one{ds};
  const auto c = smoothness_constants(one, {LossKind::Ridge, 0.1});
  EXPECT_DOUBLE_EQ(c.L, 0.1);
  EXPECT_DOUBLE_EQ(c.mu, 0.1);
}

TEST(SmoothnessConstants, MatchesDenseEigendecomposition) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<ClientDataset> data{random_dataset(rng, 30, 6, LossKind::Ridge),
                                          random_dataset(rng, 30, 6, LossKind::Ridge)};
    const ClientDataset all = pool(data);
    const Eigen::MatrixXd gram = all.features.transpose() * all.features / 60.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const auto c = smoothness_constants(data, {LossKind::Ridge, 0.1});
    const double L = eig.eigenvalues().maxCoeff() + 0.1;
    const double mu = eig.eigenvalues().minCoeff() + 0.1;
    EXPECT_NEAR(c.L, L, 1e-8 * L);
    EXPECT_NEAR(c.mu, mu, 1e-8 * mu);

    const auto lc = smoothness_constants(data, {LossKind::Logistic, 0.1});
    EXPECT_NEAR(lc.L, eig.eigenvalues().maxCoeff() / 4.0 + 0.1, 1e-8 * lc.L);
    EXPECT_DOUBLE_EQ(lc.mu, 0.1);
  }
}

TEST(OptimalValue, ZeroLabelsGiveZero) {
  ClientDataset ds;
  ds.features = Eigen::MatrixXd::Random(5, 3);
  ds.labels = Eigen::VectorXd::Zero(5);
  const std::vector<ClientDataset> one{ds};
  const auto opt = optimal_value(one, {LossKind::Ridge, 0.1});
  EXPECT_EQ(opt.w_star.norm(), 0.0);
  EXPECT_EQ(opt.f_star, 0.0);
}

TEST(OptimalValue, SingleSampleLinearSolveResidual) {
  ClientDataset ds;
  ds.features = Eigen::RowVector3d(0.7, -1.2, 2.0);
  ds.labels = Eigen::VectorXd::Constant(1, 1.3);
  const std::vector<ClientDataset> one{ds};
  const auto opt = optimal_value(one, {LossKind::Ridge, 0.1});
  const Eigen::Vector3d x(0.7, -1.2, 2.0);
  const Eigen::Vector3d residual =
      (x * x.transpose() + 0.1 * Eigen::Matrix3d::Identity()) * opt.w_star - 1.3 * x;
  EXPECT_LE(residual.norm(), 1e-10);
}

TEST(OptimalValue, LogisticGradientBelowTolerance) {
  std::mt19937_64 rng(9);
  const std::vector<ClientDataset> data{random_dataset(rng, 40, 5, LossKind::Logistic),
                                        random_dataset(rng, 40, 5, LossKind::Logistic)};
  const LossSpec spec{LossKind::Logistic, 0.05};
  const auto opt = optimal_value(data, spec);
  EXPECT_LE(global_gradient(opt.w_star, data, spec).norm(), kOracleGradientTolerance);
  EXPECT_DOUBLE_EQ(opt.f_star, global_loss(opt.w_star, data, spec));
}

TEST(OptimalValue, RequiresPositiveLambda) {
  std::mt19937_64 rng(10);
  const std::vector<ClientDataset> data{random_dataset(rng, 5, 2, LossKind::Ridge)};
  EXPECT_THROW(optimal_value(data, {LossKind::Ridge, 0.0}), InvalidInput);
}

// Assumption witnesses on random pairs.
TEST(FedmathProperties, SmoothnessStrongConvexityAndPl) {
  std::mt19937_64 rng(11);
  for (LossKind kind : {LossKind::Ridge, LossKind::Logistic}) {
    const std::vector<ClientDataset> data{random_dataset(rng, 25, 4, kind),
                                          random_dataset(rng, 25, 4, kind)};
    const LossSpec spec{kind, 0.1};
    const auto c = smoothness_constants(data, spec);
    const double fstar = optimal_value(data, spec).f_star;
    ASSERT_GT(c.mu, 0.0);
    ASSERT_LE(c.mu, c.L);
    for (int trial = 0; trial < 200; ++trial) {
      const auto x = random_vector(rng, 4, 2.0);
      const auto y = random_vector(rng, 4, 2.0);
      const auto gx = global_gradient(x, data, spec);
      const auto gy = global_gradient(y, data, spec);
      const double fx = global_loss(x, data, spec);
      const double fy = global_loss(y, data, spec);
      EXPECT_LE((gx - gy).norm(), c.L * (x - y).norm() * (1 + 1e-10));
      EXPECT_GE(fx - (fy + gy.dot(x - y) + 0.5 * c.mu * (x - y).squaredNorm()), -1e-10);
      EXPECT_LE(2 * c.mu * (fx - fstar), gx.squaredNorm() * (1 + 1e-10) + 1e-12);
    }
  }
}
