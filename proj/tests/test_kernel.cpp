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

TEST(KernelTest, ExponentialAtZeroLag) {
  EXPECT_DOUBLE_EQ(KernelSpec::Exponential(1.0)(0.0), 1.0);
}

TEST(KernelTest, MaternClosedFormMatchesBessel) {
  const double d = 0.05, rho = 0.1;
  const double closed = (1 + std::sqrt(3.0) * d / rho) * std::exp(-std::sqrt(3.0) * d / rho);
  EXPECT_NEAR(KernelSpec::Matern(1.5, rho)(d), closed, 1e-15);
  EXPECT_NEAR(KernelSpec::MaternBessel(1.5, rho, d), closed, 1e-10);
  const double r5 = std::sqrt(5.0) * d / rho;
  EXPECT_NEAR(KernelSpec::MaternBessel(2.5, rho, d), (1 + r5 + r5 * r5 / 3) * std::exp(-r5),
              1e-10);
  EXPECT_NEAR(KernelSpec::MaternBessel(0.5, rho, d), std::exp(-d / rho), 1e-10);
}

TEST(KernelTest, GeneralMaternIsContinuousAtZero) {
  auto k = KernelSpec::Matern(0.8, 0.2);
  EXPECT_DOUBLE_EQ(k(0.0), 1.0);
  EXPECT_NEAR(k(1e-8), 1.0, 1e-5);
  EXPECT_LT(k(0.3), k(0.1));
}

TEST(KernelTest, GaussianRatio) {
  const double rho = 0.3;
  auto k = KernelSpec::Gaussian(rho);
  EXPECT_NEAR(k(0.1) / k(0.0), std::exp(-0.005 / (rho * rho)), 1e-15);
}

TEST(KernelTest, RejectsBadParameters) {
  EXPECT_THROW(KernelSpec::Matern(0.0, 0.1), ConfigError);
  EXPECT_THROW(KernelSpec::Gaussian(-1.0), ConfigError);
  EXPECT_THROW(KernelSpec::Exponential(0.1, 0.0), ConfigError);
  EXPECT_THROW(KernelSpec::Parse("cosine", 0.1), ConfigError);
}

TEST(KernelTest, ParseNames) {
  EXPECT_EQ(KernelSpec::Parse("matern32", 0.1).alpha, 1.5);
  EXPECT_EQ(KernelSpec::Parse("matern52", 0.1).alpha, 2.5);
  EXPECT_EQ(KernelSpec::Parse("gaussian", 0.2).family, KernelFamily::kGaussian);
  EXPECT_EQ(KernelSpec::Parse("exponential", 0.2).family, KernelFamily::kExponential);
  EXPECT_EQ(KernelSpec::Parse("matern:0.75", 0.2).alpha, 0.75);
}

TEST(KernelTest, GramIsSymmetricWithAmplitudeDiagonal) {
  GridSpec g = GridSpec::Line(40);
  auto m = gram(KernelSpec::Matern(2.5, 0.2, 3.0), g);
  EXPECT_EQ((m - m.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(m.diagonal().isApprox(Eigen::VectorXd::Constant(40, 3.0)));
}

TEST(KernelTest, GramUsesEuclideanDistanceIn2D) {
  GridSpec g = GridSpec::Square(3, {0, 2}, {0, 2});
  auto m = gram(KernelSpec::Exponential(1.0), g);
  // Nodes 0 = (0,0) and 4 = (1,1).
  EXPECT_NEAR(m(0, 4), std::exp(-std::sqrt(2.0)), 1e-15);
}

TEST(KernelTest, GramIsPositiveSemidefinite) {
  for (int trial = 0; trial < 6; ++trial) {
    Rng rng(DeriveSeed(11, {static_cast<std::uint64_t>(trial)}));
    const int k = 20 + static_cast<int>(rng() % 60);
    const double lo = rng.Normal(), len = 0.2 + 3 * rng.Uniform();
    GridSpec g = GridSpec::Line(k, lo, lo + len);
    const double rho = 0.05 + rng.Uniform();
    for (auto spec : {KernelSpec::Matern(1.5, rho), KernelSpec::Gaussian(rho),
                      KernelSpec::Exponential(rho), KernelSpec::Matern(0.7, rho)}) {
      auto m = gram(spec, g);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * m.trace());
    }
  }
}

TEST(KernelTest, TraceNormalization) {
  GridSpec g = GridSpec::Line(51, 0.0, 2.0);
  auto k = normalize_trace(KernelSpec::Matern(1.5, 0.1), g);
  EXPECT_NEAR(g.weights().dot(gram(k, g).diagonal()), 1.0, 1e-14);
}

// Integral of the profile over R^d by radial trapezoid quadrature.
double RadialIntegral(const KernelSpec& k, int dim) {
  const int steps = 400000;
  const double r_max = 80.0 * k.rho;
  const double h = r_max / steps;
  double s = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    s += w * k.Profile(r) * (dim == 1 ? 2.0 : 2.0 * M_PI * r);
  }
  return s * h;
}

TEST(KernelTest, ProfileIntegralMatchesQuadrature) {
  for (int dim : {1, 2}) {
    for (auto k : {KernelSpec::Gaussian(0.3), KernelSpec::Exponential(0.2),
                   KernelSpec::Matern(1.5, 0.1), KernelSpec::Matern(2.5, 0.4),
                   KernelSpec::Matern(0.8, 0.25)}) {
      EXPECT_NEAR(k.ProfileIntegral(dim) / RadialIntegral(k, dim), 1.0, 1e-6)
          << k.Name() << " dim " << dim;
    }
  }
}

// 1D Fourier transform of the unit profile at frequency w.
double Fourier1D(const KernelSpec& k, double w) {
  const int steps = 200000;
  const double r_max = 80.0 * k.rho;
  const double h = r_max / steps;
  double s = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double r = i * h;
    const double wt = (i == 0 || i == steps) ? 0.5 : 1.0;
    s += wt * k.Profile(r) * std::cos(w * r);
  }
  return 2.0 * s * h;
}

TEST(KernelTest, PowerProfileRaisesTheSpectrum) {
  const double eta = 1.7;
  for (auto k : {KernelSpec::Gaussian(0.2), KernelSpec::Matern(1.5, 0.2),
                 KernelSpec::Exponential(0.2)}) {
    auto p = k.PowerProfile(eta, 1);
    for (double w : {2.0, 5.0, 11.0}) {
      const double lhs = Fourier1D(p, w) / Fourier1D(p, 0.0);
      const double rhs = std::pow(Fourier1D(k, w) / Fourier1D(k, 0.0), eta);
      EXPECT_NEAR(lhs / rhs, 1.0, 1e-4) << k.Name() << " w=" << w;
    }
  }
}

TEST(KernelTest, PowerProfileInTwoDimensions) {
  auto p = KernelSpec::Exponential(1.0).PowerProfile(2.0, 2);
  // alpha' = 2 (1/2 + 1) - 1 = 2, rho' = sqrt(2 / 0.5) = 2.
  EXPECT_DOUBLE_EQ(p.alpha, 2.0);
  EXPECT_DOUBLE_EQ(p.rho, 2.0);
}

}  // namespace
}  // namespace iclp
