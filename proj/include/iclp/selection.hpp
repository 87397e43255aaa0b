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

#ifndef ICLP_SELECTION_HPP_
#define ICLP_SELECTION_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "iclp/error.hpp"
#include "iclp/mechanisms.hpp"
#include "iclp/rng.hpp"
#include "iclp/spectral.hpp"

namespace iclp {

// Tuning chosen from (n, epsilon, spectrum) only; never reads curve values.
struct PssChoice {
  Strategy strategy = Strategy::kIclpQr;
  double psi = 0.0;
  double eta = 0.0;
  double psi_min = 0.0;  // lower edge of the admissible window (QR)
  int m_lo = 0;          // FRL range; empty when m_lo > m_hi
  int m_hi = 0;
  double beta_hat = 0.0;
  std::string note = "data-independent";

  bool empty_range() const { return m_lo > m_hi; }
};

inline void RequireDecay(double beta_hat) {
  ICLP_REQUIRE(std::isfinite(beta_hat) && beta_hat > 1, ConfigError,
               "fitted eigenvalue decay ", beta_hat,
               " must exceed 1 for these rates to apply");
}

// psi = 1/n, eta = 1 + 2/beta + 0.1.
inline PssChoice pss_qr(int n, double epsilon, double beta_hat) {
  ICLP_REQUIRE(n >= 2, ConfigError, "n must be at least 2, got ", n);
  ICLP_REQUIRE(epsilon > 0 && std::isfinite(epsilon), ConfigError,
               "epsilon must be positive, got ", epsilon);
  RequireDecay(beta_hat);
  PssChoice c;
  c.strategy = Strategy::kIclpQr;
  c.beta_hat = beta_hat;
  c.psi = 1.0 / n;
  c.eta = 1.0 + 2.0 / beta_hat + 0.1;
  c.psi_min = std::pow(n * epsilon * epsilon,
                       -c.eta * beta_hat / (beta_hat + 2.0));
  return c;
}

// M in [ceil(n^(1/(eta beta))), floor(n^(1/3))], clipped to [1, j_max].
inline PssChoice pss_frl(int n, double beta_hat, double eta, int j_max) {
  ICLP_REQUIRE(n >= 2, ConfigError, "n must be at least 2, got ", n);
  RequireDecay(beta_hat);
  ICLP_REQUIRE(eta >= 1, ConfigError, "eta must be >= 1, got ", eta);
  PssChoice c;
  c.strategy = Strategy::kFrl;
  c.beta_hat = beta_hat;
  c.eta = eta;
  // Small slack keeps exact powers (n = 8 -> 2) from rounding down.
  c.m_lo = static_cast<int>(std::ceil(std::pow(n, 1.0 / (eta * beta_hat)) - 1e-9));
  c.m_hi = static_cast<int>(std::floor(std::cbrt(static_cast<double>(n)) + 1e-9));
  c.m_lo = std::clamp(c.m_lo, 1, std::max(1, j_max));
  c.m_hi = std::clamp(c.m_hi, 1, std::max(1, j_max));
  return c;
}

// Ten log-spaced candidates over [0.1 psi, 10 psi].
inline std::vector<double> DefaultPsiGrid(double psi, int count = 10) {
  ICLP_REQUIRE(psi > 0 && count >= 1, ConfigError, "bad psi grid request");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    g[i] = psi * std::pow(10.0, -1.0 + 2.0 * t);
  }
  return g;
}

struct CvResult {
  double psi = 0.0;
  std::vector<double> scores;  // mean held-out squared L2 error per candidate
};

// Plain k-fold cross-validation of the QR estimator. NOT private: it reads
// the curves. Ties go to the smallest psi.
inline CvResult cv_psi(const std::vector<FunctionOnGrid>& curves,
                       const SpectralBasis& basis, double eta,
                       std::vector<double> candidates, int folds,
                       std::uint64_t seed) {
  ICLP_REQUIRE(folds >= 2, ConfigError, "need at least 2 folds, got ", folds);
  ICLP_REQUIRE(!candidates.empty(), ConfigError, "no candidate psi values");
  const int n = static_cast<int>(curves.size());
  ICLP_REQUIRE(n >= folds, ConfigError, "n = ", n, " is smaller than folds = ",
               folds);
  for (double p : candidates) {
    ICLP_REQUIRE(p > 0 && std::isfinite(p), ConfigError,
                 "psi candidates must be positive");
  }
  std::sort(candidates.begin(), candidates.end());

  // Deterministic shuffled fold labels.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, {}));
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<int> fold(n);
  for (int i = 0; i < n; ++i) fold[order[i]] = i % folds;

  Eigen::MatrixXd coeffs(basis.size(), n);
  for (int i = 0; i < n; ++i) coeffs.col(i) = project(curves[i], basis);

  CvResult res;
  res.scores.assign(candidates.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    Eigen::VectorXd train = Eigen::VectorXd::Zero(basis.size());
    Eigen::VectorXd test = Eigen::VectorXd::Zero(basis.grid.size());
    int n_train = 0, n_test = 0;
    for (int i = 0; i < n; ++i) {
      if (fold[i] == f) {
        test += curves[i].values();
        ++n_test;
      } else {
        train += coeffs.col(i);
        ++n_train;
      }
    }
    train /= n_train;
    test /= n_test;
    for (size_t c = 0; c < candidates.size(); ++c) {
      const Eigen::VectorXd est =
          basis.eigenfunctions *
          QrFilter(basis, candidates[c], eta).cwiseProduct(train);
      res.scores[c] += l2_norm_squared(basis.grid, est - test) / folds;
    }
  }
  size_t best = 0;
  for (size_t c = 1; c < candidates.size(); ++c) {
    if (res.scores[c] < res.scores[best]) best = c;
  }
  res.psi = candidates[best];
  return res;
}

}  // namespace iclp

#endif  // ICLP_SELECTION_HPP_
