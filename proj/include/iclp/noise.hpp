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

#ifndef ICLP_NOISE_HPP_
#define ICLP_NOISE_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "iclp/error.hpp"
#include "iclp/grid.hpp"
#include "iclp/rng.hpp"
#include "iclp/spectral.hpp"

namespace iclp {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;

  void Validate() const {
    ICLP_REQUIRE(epsilon > 0 && std::isfinite(epsilon), ConfigError,
                 "epsilon must be positive and finite, got ", epsilon);
    ICLP_REQUIRE(delta >= 0 && delta < 1, ConfigError,
                 "delta must lie in [0, 1), got ", delta);
  }
};

// kLaplace is i.i.d. Laplace on a coefficient block (the FRL baseline).
enum class NoiseProcess { kIclp, kGp, kLaplace };

inline const char* ToString(NoiseProcess p) {
  switch (p) {
    case NoiseProcess::kIclp:
      return "iclp";
    case NoiseProcess::kGp:
      return "gp";
    case NoiseProcess::kLaplace:
      return "laplace";
  }
  return "unknown";
}

struct NoiseDraw {
  FunctionOnGrid path;
  Eigen::VectorXd coefficients;  // sigma * sqrt(lambda_j) * Z_j
  double sigma = 0.0;
  NoiseProcess process = NoiseProcess::kIclp;
  std::uint64_t seed = 0;
};

// Fills out(j) = sigma * sqrt(lambda_j) * Z_j for j < count, zero beyond.
// For kLaplace, out(j) = sigma * L_j with L_j ~ Laplace(1).
inline void SampleCoefficients(const SpectralBasis& basis, double sigma,
                               NoiseProcess process, Rng& rng,
                               Eigen::VectorXd& out, int count = -1) {
  const int j_max = basis.size();
  if (count < 0 || count > j_max) count = j_max;
  out.setZero(j_max);
  if (sigma == 0.0) return;
  for (int j = 0; j < count; ++j) {
    if (process == NoiseProcess::kLaplace) {
      out(j) = sigma * rng.Laplace(1.0);
      continue;
    }
    const double z =
        process == NoiseProcess::kIclp ? rng.StandardLaplace() : rng.Normal();
    out(j) = sigma * std::sqrt(basis.eigenvalues(j)) * z;
  }
}

inline NoiseDraw SampleProcess(const SpectralBasis& basis, double sigma,
                               NoiseProcess process, std::uint64_t seed) {
  ICLP_REQUIRE(sigma >= 0 && std::isfinite(sigma), ConfigError,
               "sigma must be nonnegative, got ", sigma);
  NoiseDraw d;
  d.sigma = sigma;
  d.process = process;
  d.seed = seed;
  Rng rng(DeriveSeed(seed, {}));
  SampleCoefficients(basis, sigma, process, rng, d.coefficients);
  d.path = reconstruct(d.coefficients, basis);
  return d;
}

// sigma * sum_j sqrt(lambda_j) Z_j phi_j with Z_j i.i.d. unit-variance Laplace.
inline NoiseDraw sample_iclp(const SpectralBasis& basis, double sigma,
                             std::uint64_t seed) {
  return SampleProcess(basis, sigma, NoiseProcess::kIclp, seed);
}

inline NoiseDraw sample_gp(const SpectralBasis& basis, double sigma,
                           std::uint64_t seed) {
  return SampleProcess(basis, sigma, NoiseProcess::kGp, seed);
}

// Noise scale for a sensitivity bound.
//
// ICLP: delta_gs is measured in the weighted l1 norm. With unit-variance
// Laplace coefficients the j-th Laplace scale is sigma * sqrt(lambda_j / 2),
// so the exact log-density ratio between neighbors is bounded by
// sqrt(2) * delta_gs / sigma; sigma = sqrt(2) * delta_gs / epsilon.
// GP: delta_gs is measured in the Cameron-Martin norm.
// Laplace: delta_gs is the l1 sensitivity of the coefficient block and
// sigma is the Laplace scale.
inline double calibrate(double delta_gs, const PrivacyBudget& budget,
                        NoiseProcess process) {
  budget.Validate();
  ICLP_REQUIRE(delta_gs >= 0 && std::isfinite(delta_gs), ConfigError,
               "sensitivity must be nonnegative and finite, got ", delta_gs);
  if (process == NoiseProcess::kLaplace) {
    ICLP_REQUIRE(budget.delta == 0, ConfigError,
                 "Laplace mechanisms give pure DP; delta must be 0");
    return delta_gs / budget.epsilon;
  }
  if (process == NoiseProcess::kIclp) {
    ICLP_REQUIRE(budget.delta == 0, ConfigError,
                 "ICLP mechanisms give pure DP; delta must be 0");
    return std::numbers::sqrt2 * delta_gs / budget.epsilon;
  }
  ICLP_REQUIRE(budget.delta > 0, ConfigError,
               "Gaussian-process noise needs delta in (0, 1)");
  return delta_gs * std::sqrt(2.0 * std::log(2.0 / budget.delta)) /
         budget.epsilon;
}

struct DpCheckResult {
  double max_log_ratio = 0.0;
  // Sum_j |a_j - a'_j| / b_j: the largest ratio any draw can reach.
  double bound = 0.0;
  double epsilon = 0.0;
  int draws = 0;
  bool certified = false;  // max_log_ratio <= epsilon + 1e-9
};

// Exact privacy-loss check for a release a + b * L, L_j i.i.d. Laplace(1).
//
// Draws z from the release on D and evaluates
//   log p_D(z) - log p_D'(z) = sum_j (|z_j - a'_j| - |z_j - a_j|) / b_j.
// Components with b_j = 0 carry no noise and must agree exactly.
inline DpCheckResult dp_ratio_check_coefficients(const Eigen::VectorXd& a,
                                                 const Eigen::VectorXd& a_prime,
                                                 const Eigen::VectorXd& scales,
                                                 const PrivacyBudget& budget,
                                                 int n_draws,
                                                 std::uint64_t seed) {
  budget.Validate();
  ICLP_REQUIRE(a.size() == a_prime.size() && a.size() == scales.size(),
               DimensionError, "coefficient vectors differ in length");
  ICLP_REQUIRE(n_draws >= 1, ConfigError, "need at least one draw");
  DpCheckResult r;
  r.epsilon = budget.epsilon;
  r.draws = n_draws;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    ICLP_REQUIRE(scales(j) >= 0 && std::isfinite(scales(j)), ConfigError,
                 "noise scales must be nonnegative");
    if (scales(j) == 0) {
      ICLP_REQUIRE(a(j) == a_prime(j), PrivacyError,
                   "component ", j + 1,
                   " differs between neighbors but carries no noise; "
                   "no finite privacy loss");
    } else {
      r.bound += std::abs(a(j) - a_prime(j)) / scales(j);
    }
  }
  r.max_log_ratio = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < n_draws; ++d) {
    Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(d)}));
    double lr = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (scales(j) == 0) continue;
      const double z = a(j) + rng.Laplace(scales(j));
      lr += (std::abs(z - a_prime(j)) - std::abs(z - a(j))) / scales(j);
    }
    r.max_log_ratio = std::max(r.max_log_ratio, lr);
  }
  r.certified = r.max_log_ratio <= budget.epsilon + 1e-9;
  return r;
}

// ICLP release f + sigma Z on the retained span of `basis`.
inline DpCheckResult dp_ratio_check(const FunctionOnGrid& f_d,
                                    const FunctionOnGrid& f_dp,
                                    const SpectralBasis& basis, double sigma,
                                    const PrivacyBudget& budget, int n_draws,
                                    std::uint64_t seed) {
  ICLP_REQUIRE(sigma >= 0 && std::isfinite(sigma), ConfigError,
               "sigma must be nonnegative");
  const Eigen::VectorXd a = project(f_d, basis);
  const Eigen::VectorXd ap = project(f_dp, basis);
  if (sigma == 0) {
    ICLP_REQUIRE(a == ap, PrivacyError,
                 "sigma = 0 with distinct inputs: no privacy certificate "
                 "is possible");
  }
  const Eigen::VectorXd scales =
      sigma * (basis.eigenvalues.array() / 2.0).sqrt();
  return dp_ratio_check_coefficients(a, ap, scales, budget, n_draws, seed);
}

}  // namespace iclp

#endif  // ICLP_NOISE_HPP_
