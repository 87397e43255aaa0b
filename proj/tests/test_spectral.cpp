// Copyright 2026 The ICLP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "iclp/kernel.hpp"
#include "iclp/rng.hpp"
#include "iclp/spectral.hpp"

namespace iclp {
namespace {

SpectralBasis Matern(int k, double alpha = 1.5, double rho = 0.1) {
  return decompose(KernelSpec::Matern(alpha, rho), GridSpec::Line(k));
}

Eigen::VectorXd RandomSmooth(const GridSpec& g, std::uint64_t seed) {
  Rng rng(seed);
  double a[4];
  for (double& x : a) x = rng.Normal();
  Eigen::VectorXd v(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const double t = g.node(i)[0];
    v(i) = a[0] + a[1] * t + a[2] * std::sin(3 * t) + a[3] * std::cos(5 * t);
  }
  return v;
}

TEST(SpectralTest, IdentityGramGivesQuadratureWeights) {
  const int k = 11;
  GridSpec g = GridSpec::Line(k);
  auto b = decompose(Eigen::MatrixXd::Identity(k, k), g, 1e-3);
  ASSERT_EQ(b.size(), k);
  const double dx = g.spacing();
  for (int j = 0; j < k - 2; ++j) EXPECT_NEAR(b.eigenvalues(j), dx, 1e-15);
  EXPECT_NEAR(b.eigenvalues(k - 2), dx / 2, 1e-15);
  EXPECT_NEAR(b.eigenvalues(k - 1), dx / 2, 1e-15);
}

TEST(SpectralTest, OrnsteinUhlenbeckLeadingEigenvalue) {
  // Root of (w^2 - c^2) sin w = 2 c w cos w, lambda = 2c / (c^2 + w^2).
  const double lambda1_rho1 = 0.7388108094164550;
  const double lambda1_rho05 = 0.5746552163364326;
  GridSpec g = GridSpec::Line(201);
  EXPECT_NEAR(decompose(KernelSpec::Exponential(1.0), g).eigenvalues(0) / lambda1_rho1,
              1.0, 0.02);
  EXPECT_NEAR(decompose(KernelSpec::Exponential(0.5), g).eigenvalues(0) / lambda1_rho05,
              1.0, 0.02);
}

TEST(SpectralTest, TraceIdentity) {
  auto b = Matern(500);
  EXPECT_NEAR(b.eigenvalues.sum(), 1.0, 0.01);
}

TEST(SpectralTest, EigenvaluesSortedAndAboveFloor) {
  auto b = Matern(200);
  for (int j = 1; j < b.size(); ++j) {
    EXPECT_LE(b.eigenvalues(j), b.eigenvalues(j - 1));
  }
  EXPECT_GT(b.eigenvalues(b.size() - 1), b.floor_rel * b.eigenvalues(0));
  EXPECT_EQ(b.size() + b.discarded, 200);
}

TEST(SpectralTest, FloorDropsComponents) {
  GridSpec g = GridSpec::Line(200);
  auto b = decompose(KernelSpec::Gaussian(0.1), g, 1e-12);
  EXPECT_LT(b.size(), 60);
  EXPECT_GT(b.discarded, 0);
}

TEST(SpectralTest, EigenfunctionsQuadratureOrthonormal) {
  auto b = Matern(150);
  Eigen::MatrixXd gram_q =
      b.eigenfunctions.transpose() * b.grid.weights().asDiagonal() * b.eigenfunctions;
  EXPECT_LT((gram_q - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(),
            1e-6);
}

TEST(SpectralTest, RejectsAsymmetricAndDegenerate) {
  GridSpec g = GridSpec::Line(4);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  m(0, 1) = 0.5;
  EXPECT_THROW(decompose(m, g), MatrixError);
  EXPECT_THROW(decompose(Eigen::MatrixXd::Zero(4, 4), g), MatrixError);
  EXPECT_THROW(decompose(Eigen::MatrixXd::Identity(4, 4), g, 0.0), ConfigError);
  EXPECT_THROW(decompose(Eigen::MatrixXd::Identity(3, 3), g), DimensionError);
}

TEST(SpectralTest, SignRuleMakesLargestEntryPositive) {
  auto b = Matern(80);
  const Eigen::VectorXd sw = b.grid.weights().cwiseSqrt();
  for (int j = 0; j < b.size(); ++j) {
    Eigen::VectorXd u = sw.cwiseProduct(b.eigenfunctions.col(j));
    Eigen::Index arg;
    u.cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(u(arg), 0.0) << j;
  }
}

TEST(SpectralTest, RepeatedDecompositionIsBitIdentical) {
  auto a = Matern(120), b = Matern(120);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.eigenfunctions, b.eigenfunctions);
}

TEST(SpectralTest, ScalingGramScalesEigenvalues) {
  GridSpec g = GridSpec::Line(100);
  Eigen::MatrixXd m = gram(KernelSpec::Matern(2.5, 0.2), g);
  auto a = decompose(m, g), b = decompose(2.0 * m, g);
  ASSERT_EQ(a.size(), b.size());
  for (int j = 0; j < 10; ++j) {
    EXPECT_NEAR(b.eigenvalues(j), 2.0 * a.eigenvalues(j), 1e-12);
    EXPECT_NEAR(std::abs(a.eigenfunctions.col(j).dot(g.weights().asDiagonal() *
                                                      b.eigenfunctions.col(j))),
                1.0, 1e-8);
  }
}

TEST(SpectralTest, ProjectEigenfunctionGivesUnitVector) {
  auto b = Matern(200);
  Eigen::VectorXd c = project(FunctionOnGrid(b.grid, b.eigenfunctions.col(2)), b);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(b.size());
  e(2) = 1.0;
  EXPECT_LT((c - e).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(project(FunctionOnGrid::Zero(b.grid), b), Eigen::VectorXd::Zero(b.size()));
}

TEST(SpectralTest, ProjectReconstructRoundTrips) {
  auto b = Matern(300);
  Rng rng(5);
  Eigen::VectorXd c(b.size());
  for (int j = 0; j < b.size(); ++j) c(j) = rng.Normal();
  EXPECT_LT((project(reconstruct(c, b), b) - c).cwiseAbs().maxCoeff(), 1e-8);

  FunctionOnGrid f(b.grid, RandomSmooth(b.grid, 17));
  auto back = reconstruct(project(f, b), b);
  EXPECT_LE(l2_distance(back, f), 1e-2 * l2_norm(f));
}

TEST(SpectralTest, NormsOfScaledLeadingEigenfunction) {
  auto b = Matern(200);
  FunctionOnGrid f(b.grid, std::sqrt(b.eigenvalues(0)) * b.eigenfunctions.col(0));
  EXPECT_NEAR(cameron_martin_norm(f, b), 1.0, 1e-8);
  EXPECT_NEAR(weighted_l1_norm(f, b), 1.0, 1e-6);
}

TEST(SpectralTest, NormInequalities) {
  auto b = Matern(200);
  const double eta = 1.5;
  const double tr = std::sqrt(partial_trace(b, eta - 1.0));
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(DeriveSeed(9, {static_cast<std::uint64_t>(trial)}));
    Eigen::VectorXd c(b.size());
    for (int j = 0; j < b.size(); ++j) c(j) = rng.Normal() * std::pow(b.eigenvalues(j), 0.9);
    auto f = reconstruct(c, b);
    const double l1 = weighted_l1_norm(f, b);
    EXPECT_GE(l1, cameron_martin_norm(f, b) * (1 - 1e-9));
    EXPECT_LE(l1, power_norm(f, b, eta) * tr * (1 + 1e-9));
    EXPECT_LE(l2_norm(f), std::sqrt(b.eigenvalues(0)) * cameron_martin_norm(f, b) * (1 + 1e-9));
  }
}

TEST(SpectralTest, PowerKernelValues) {
  SpectralBasis b;
  b.grid = GridSpec::Line(2);
  b.eigenvalues = Eigen::Vector2d(0.5, 0.25);
  b.eigenfunctions = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_EQ(power_kernel_values(b, 1.0).eigenvalues, b.eigenvalues);
  EXPECT_EQ(power_kernel_values(b, 2.0).eigenvalues, Eigen::Vector2d(0.25, 0.0625));
  EXPECT_EQ(power_kernel_values(b, 0.0).eigenvalues, Eigen::Vector2d(1.0, 1.0));
  EXPECT_EQ(power_kernel_values(b, 2.0).eigenfunctions, b.eigenfunctions);
  EXPECT_THROW(power_kernel_values(b, -1.0), ConfigError);
  EXPECT_DOUBLE_EQ(partial_trace(b, 1.0), 0.75);
  EXPECT_DOUBLE_EQ(partial_trace(b, 0.0), 2.0);
}

TEST(SpectralTest, PowerKernelKeepsOrder) {
  auto p = power_kernel_values(Matern(100), 1.7);
  for (int j = 1; j < p.size(); ++j) EXPECT_LE(p.eigenvalues(j), p.eigenvalues(j - 1));
}

TEST(SpectralTest, PartialTraceStableAcrossResolution) {
  const double a = partial_trace(Matern(300), 0.5);
  const double b = partial_trace(Matern(500), 0.5);
  EXPECT_NEAR(a / b, 1.0, 0.02);
}

TEST(SpectralTest, FitDecayOnExactPowerLaw) {
  Eigen::VectorXd l(60);
  for (int j = 1; j <= 60; ++j) l(j - 1) = std::pow(j, -4.0);
  EXPECT_NEAR(fit_decay(l, 5, 50), 4.0, 1e-9);
  EXPECT_NEAR(fit_decay(Eigen::VectorXd(7.3 * l), 5, 50), 4.0, 1e-9);
  EXPECT_THROW(fit_decay(l, 5, 6), ConfigError);
  EXPECT_THROW(fit_decay(l, 5, 61), ConfigError);
}

TEST(SpectralTest, MaternDecayRates) {
  EXPECT_NEAR(fit_decay(Matern(500, 1.5), 5, 50), 4.0, 0.6);
  // Reference slopes from an independent dense eigensolve of the same
  // weighted gram. For alpha = 2.5 with rho = 0.1 the window [5, 50] sits
  // before the asymptotic regime (2 alpha / rho^2 = 500 is comparable to
  // the squared frequencies there), so the fit is near 5, not 6; the tail
  // window recovers the 2 alpha + 1 rate.
  const SpectralBasis b25 = Matern(500, 2.5);
  EXPECT_NEAR(fit_decay(b25, 5, 50), 5.025709733097328, 1e-6);
  EXPECT_NEAR(fit_decay(b25, 25, 50), 5.950557754619288, 1e-6);
  EXPECT_LT(fit_decay(b25, 5, 50), fit_decay(b25, 25, 50));
}

}  // namespace
}  // namespace iclp
