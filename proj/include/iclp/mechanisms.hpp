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

#ifndef ICLP_MECHANISMS_HPP_
#define ICLP_MECHANISMS_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "iclp/error.hpp"
#include "iclp/grid.hpp"
#include "iclp/kernel.hpp"
#include "iclp/noise.hpp"
#include "iclp/rng.hpp"
#include "iclp/spectral.hpp"

namespace iclp {

enum class Strategy { kFrl, kIclpAr, kIclpQr, kGpAdp };

inline const char* ToString(Strategy s) {
  switch (s) {
    case Strategy::kFrl:
      return "frl";
    case Strategy::kIclpAr:
      return "iclp-ar";
    case Strategy::kIclpQr:
      return "iclp-qr";
    case Strategy::kGpAdp:
      return "gp-adp";
  }
  return "unknown";
}

inline Strategy ParseStrategy(const std::string& s) {
  if (s == "frl") return Strategy::kFrl;
  if (s == "iclp-ar" || s == "ar") return Strategy::kIclpAr;
  if (s == "iclp-qr" || s == "qr") return Strategy::kIclpQr;
  if (s == "gp-adp" || s == "gp") return Strategy::kGpAdp;
  throw ConfigError("unknown strategy '" + s +
                    "' (expected frl, iclp-ar, iclp-qr, gp-adp)");
}

inline NoiseProcess ProcessFor(Strategy s) {
  switch (s) {
    case Strategy::kFrl:
      return NoiseProcess::kLaplace;
    case Strategy::kGpAdp:
      return NoiseProcess::kGp;
    default:
      return NoiseProcess::kIclp;
  }
}

struct MechanismConfig {
  Strategy strategy = Strategy::kIclpQr;
  int M = 0;          // FRL truncation level
  double psi = 0.0;   // AR / QR / GP-ADP penalty
  double eta = 0.0;   // AR / QR / GP-ADP power
  double tau = 1.0;   // L2 bound enforced by clipping

  static MechanismConfig Frl(int m, double tau) {
    return {Strategy::kFrl, m, 0.0, 0.0, tau};
  }
  static MechanismConfig IclpAr(double psi, double eta, double tau) {
    return {Strategy::kIclpAr, 0, psi, eta, tau};
  }
  static MechanismConfig IclpQr(double psi, double eta, double tau) {
    return {Strategy::kIclpQr, 0, psi, eta, tau};
  }
  static MechanismConfig GpAdp(double psi, double eta, double tau) {
    return {Strategy::kGpAdp, 0, psi, eta, tau};
  }

  void Validate(const SpectralBasis& basis) const {
    ICLP_REQUIRE(tau > 0 && std::isfinite(tau), ConfigError,
                 "tau must be positive, got ", tau);
    switch (strategy) {
      case Strategy::kFrl:
        ICLP_REQUIRE(M >= 1, ConfigError, "FRL needs M >= 1, got ", M);
        ICLP_REQUIRE(M <= basis.size(), ConfigError, "M = ", M,
                     " exceeds the ", basis.size(), " retained components");
        break;
      case Strategy::kIclpAr:
        ICLP_REQUIRE(psi > 0 && std::isfinite(psi), ConfigError,
                     "psi must be positive, got ", psi);
        ICLP_REQUIRE(eta >= 1 && std::isfinite(eta), ConfigError,
                     "ICLP-AR needs eta >= 1, got ", eta);
        break;
      case Strategy::kIclpQr:
      case Strategy::kGpAdp:
        ICLP_REQUIRE(psi > 0 && std::isfinite(psi), ConfigError,
                     "psi must be positive, got ", psi);
        ICLP_REQUIRE(eta > 1 && std::isfinite(eta), ConfigError, ToString(strategy),
                     " needs eta > 1, got ", eta);
        break;
    }
  }

  // psi for penalized strategies, M for FRL.
  double TuningValue() const {
    return strategy == Strategy::kFrl ? static_cast<double>(M) : psi;
  }
};

// Output of a sanitizer. Every summary is reconstruct(estimate + noise) on
// the retained span of the noise basis.
struct SanitizedRelease {
  std::string mechanism;
  FunctionOnGrid summary;
  FunctionOnGrid non_private;
  double delta_gs = 0.0;
  double sigma = 0.0;
  PrivacyBudget budget;
  NoiseProcess process = NoiseProcess::kIclp;
  MechanismConfig config;
  int n = 0;
  std::uint64_t seed = 0;
  double floor_rel = kDefaultFloorRel;
  int noisy_components = 0;
  Eigen::VectorXd non_private_coefficients;
  // Per-coefficient Laplace scale (kIclp, kLaplace) or normal sd (kGp);
  // zero where no noise is added.
  Eigen::VectorXd noise_scales;
  // Extra parameters echoed into metadata, e.g. bandwidth.
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Curve preprocessing.

// Rescales every column whose quadrature L2 norm exceeds tau onto the ball.
inline void ClipColumns(const GridSpec& grid, double tau, Eigen::MatrixXd& values) {
  ICLP_REQUIRE(tau > 0, ConfigError, "tau must be positive, got ", tau);
  ICLP_REQUIRE(values.rows() == grid.size(), DimensionError,
               "curve length does not match grid");
  const Eigen::VectorXd& w = grid.weights();
  for (Eigen::Index i = 0; i < values.cols(); ++i) {
    const double norm = std::sqrt(w.dot(values.col(i).cwiseAbs2()));
    if (norm > tau) values.col(i) *= tau / norm;
  }
}

inline std::vector<FunctionOnGrid> clip_to_tau(
    const std::vector<FunctionOnGrid>& curves, double tau) {
  ICLP_REQUIRE(tau > 0, ConfigError, "tau must be positive, got ", tau);
  std::vector<FunctionOnGrid> out;
  out.reserve(curves.size());
  for (const auto& c : curves) {
    const double norm = l2_norm(c);
    out.push_back(norm > tau ? FunctionOnGrid(c.grid(), c.values() * (tau / norm))
                             : c);
  }
  return out;
}

// Grid values of curves as columns; all curves must share `grid`.
inline Eigen::MatrixXd StackCurves(const std::vector<FunctionOnGrid>& curves,
                                   const GridSpec& grid) {
  Eigen::MatrixXd m(grid.size(), static_cast<Eigen::Index>(curves.size()));
  for (size_t i = 0; i < curves.size(); ++i) {
    RequireSameGrid(curves[i].grid(), grid);
    m.col(static_cast<Eigen::Index>(i)) = curves[i].values();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Mean estimators and their sensitivities.

inline double SoftThreshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// 1-based truncation index J* = min{j : tau <= psi / (2 lambda_j^(eta/2))},
// or J_max if no retained index qualifies.
inline int ArTruncation(const SpectralBasis& basis, double psi, double eta,
                        double tau) {
  for (int j = 0; j < basis.size(); ++j) {
    if (tau <= psi / (2.0 * std::pow(basis.eigenvalues(j), eta / 2.0))) {
      return j + 1;
    }
  }
  return basis.size();
}

inline Eigen::VectorXd QrFilter(const SpectralBasis& basis, double psi,
                                double eta) {
  Eigen::ArrayXd le = basis.eigenvalues.array().pow(eta);
  return (le / (le + psi)).matrix();
}

// Number of coefficients that receive noise.
inline int NoisyComponents(const MechanismConfig& c, const SpectralBasis& basis) {
  switch (c.strategy) {
    case Strategy::kFrl:
      return c.M;
    case Strategy::kIclpAr:
      return ArTruncation(basis, c.psi, c.eta, c.tau);
    default:
      return basis.size();
  }
}

// Non-private estimate from the coefficients of the (clipped) sample mean.
inline Eigen::VectorXd EstimateCoefficients(const Eigen::VectorXd& mean_coeffs,
                                            const MechanismConfig& c,
                                            const SpectralBasis& basis) {
  ICLP_REQUIRE(mean_coeffs.size() == basis.size(), DimensionError,
               "coefficient length mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.size());
  switch (c.strategy) {
    case Strategy::kFrl:
      out.head(c.M) = mean_coeffs.head(c.M);
      break;
    case Strategy::kIclpAr: {
      const int j_star = ArTruncation(basis, c.psi, c.eta, c.tau);
      for (int j = 0; j < j_star; ++j) {
        const double t =
            c.psi / (2.0 * std::pow(basis.eigenvalues(j), c.eta / 2.0));
        out(j) = SoftThreshold(mean_coeffs(j), t);
      }
      break;
    }
    case Strategy::kIclpQr:
    case Strategy::kGpAdp:
      out = QrFilter(basis, c.psi, c.eta).cwiseProduct(mean_coeffs);
      break;
  }
  return out;
}

inline double frl_sensitivity(int m, double tau, int n) {
  return 2.0 * m * tau / n;
}

// Uses max(lambda^-1/2, lambda^-eta/2) per component so the bound stays
// valid when an eigenvalue exceeds 1; equal to lambda^-eta/2 otherwise.
inline double iclp_ar_sensitivity(const SpectralBasis& basis, double psi,
                                  double eta, double tau, int n) {
  const int j_star = ArTruncation(basis, psi, eta, tau);
  double s = 0.0;
  for (int j = 0; j < j_star; ++j) {
    const double l = basis.eigenvalues(j);
    s += std::max(std::pow(l, -0.5), std::pow(l, -eta / 2.0));
  }
  return 2.0 * tau / n * s;
}

inline double iclp_qr_sensitivity(const SpectralBasis& basis, double psi,
                                  double eta, double tau, int n) {
  Eigen::ArrayXd l = basis.eigenvalues.array();
  Eigen::ArrayXd le = l.pow(eta);
  return 2.0 * tau / n * (l.pow(eta - 0.5) / (le + psi)).sum();
}

// Cameron-Martin sensitivity of the filtered mean.
inline double gp_adp_sensitivity(const SpectralBasis& basis, double psi,
                                 double eta, double tau, int n) {
  Eigen::ArrayXd l = basis.eigenvalues.array();
  Eigen::ArrayXd le = l.pow(eta);
  return 2.0 * tau / n * (l.pow(eta - 0.5) / (le + psi)).maxCoeff();
}

inline double MeanSensitivity(const MechanismConfig& c,
                              const SpectralBasis& basis, int n) {
  switch (c.strategy) {
    case Strategy::kFrl:
      return frl_sensitivity(c.M, c.tau, n);
    case Strategy::kIclpAr:
      return iclp_ar_sensitivity(basis, c.psi, c.eta, c.tau, n);
    case Strategy::kIclpQr:
      return iclp_qr_sensitivity(basis, c.psi, c.eta, c.tau, n);
    case Strategy::kGpAdp:
      return gp_adp_sensitivity(basis, c.psi, c.eta, c.tau, n);
  }
  return 0.0;
}

// Per-coefficient noise scales for a calibrated sigma (see
// SanitizedRelease::noise_scales).
inline Eigen::VectorXd NoiseScales(NoiseProcess process, double sigma,
                                   const SpectralBasis& basis, int noisy) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(basis.size());
  for (int j = 0; j < noisy; ++j) {
    const double l = basis.eigenvalues(j);
    switch (process) {
      case NoiseProcess::kIclp:
        s(j) = sigma * std::sqrt(l / 2.0);
        break;
      case NoiseProcess::kGp:
        s(j) = sigma * std::sqrt(l);
        break;
      case NoiseProcess::kLaplace:
        s(j) = sigma;
        break;
    }
  }
  return s;
}

// Noise coefficients for one release. The stream matches sample_iclp and
// sample_gp for the same seed.
inline Eigen::VectorXd DrawReleaseNoise(const SpectralBasis& basis,
                                        NoiseProcess process, double sigma,
                                        int noisy, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, {}));
  Eigen::VectorXd noise;
  SampleCoefficients(basis, sigma, process, rng, noise, noisy);
  return noise;
}

namespace internal {

inline void WarnOnWeakEta(const MechanismConfig& c, const SpectralBasis& basis,
                          std::vector<std::string>& warnings) {
  if (c.strategy != Strategy::kIclpQr && c.strategy != Strategy::kGpAdp) return;
  const int hi = std::min(50, basis.size());
  if (hi - 5 < 2) return;
  const double beta = fit_decay(basis, 5, hi);
  if (beta > 0 && c.eta <= 1.0 + 1.0 / beta) {
    warnings.push_back(Concat("eta = ", c.eta, " is at or below 1 + 1/beta = ",
                              1.0 + 1.0 / beta,
                              " (fitted decay); utility guarantees weaken"));
  }
}

}  // namespace internal

// Runs any mean strategy on raw curve values (grid.size() x n). Clipping is
// applied to a copy.
inline SanitizedRelease SanitizeMeanValues(Eigen::MatrixXd values,
                                           const SpectralBasis& basis,
                                           const MechanismConfig& config,
                                           const PrivacyBudget& budget,
                                           std::uint64_t seed) {
  config.Validate(basis);
  budget.Validate();
  const int n = static_cast<int>(values.cols());
  ICLP_REQUIRE(n >= 2, DataError, "need at least 2 curves, got ", n);
  const NoiseProcess process = ProcessFor(config.strategy);
  if (process == NoiseProcess::kGp) {
    ICLP_REQUIRE(budget.delta > 0, ConfigError,
                 "gp-adp needs delta in (0, 1)");
  } else {
    ICLP_REQUIRE(budget.delta == 0, ConfigError, ToString(config.strategy),
                 " is a pure-DP mechanism; delta must be 0");
  }

  ClipColumns(basis.grid, config.tau, values);
  const Eigen::VectorXd mean = values.rowwise().mean();

  SanitizedRelease r;
  r.mechanism = ToString(config.strategy);
  r.config = config;
  r.budget = budget;
  r.process = process;
  r.n = n;
  r.seed = seed;
  r.floor_rel = basis.floor_rel;
  internal::WarnOnWeakEta(config, basis, r.warnings);

  r.non_private_coefficients =
      EstimateCoefficients(project(mean, basis), config, basis);
  r.delta_gs = MeanSensitivity(config, basis, n);
  r.sigma = calibrate(r.delta_gs, budget, process);
  r.noisy_components = NoisyComponents(config, basis);
  r.noise_scales = NoiseScales(process, r.sigma, basis, r.noisy_components);
  const Eigen::VectorXd noise =
      DrawReleaseNoise(basis, process, r.sigma, r.noisy_components, seed);
  r.non_private = reconstruct(r.non_private_coefficients, basis);
  r.summary = reconstruct(r.non_private_coefficients + noise, basis);
  return r;
}

inline SanitizedRelease sanitize_mean(const std::vector<FunctionOnGrid>& curves,
                                      const SpectralBasis& basis,
                                      const MechanismConfig& config,
                                      const PrivacyBudget& budget,
                                      std::uint64_t seed) {
  return SanitizeMeanValues(StackCurves(curves, basis.grid), basis, config,
                            budget, seed);
}

inline SanitizedRelease frl_mean(const std::vector<FunctionOnGrid>& curves,
                                 const SpectralBasis& basis, int m, double tau,
                                 const PrivacyBudget& budget, std::uint64_t seed) {
  return sanitize_mean(curves, basis, MechanismConfig::Frl(m, tau), budget, seed);
}

inline SanitizedRelease iclp_ar_mean(const std::vector<FunctionOnGrid>& curves,
                                     const SpectralBasis& basis, double psi,
                                     double eta, double tau,
                                     const PrivacyBudget& budget,
                                     std::uint64_t seed) {
  return sanitize_mean(curves, basis, MechanismConfig::IclpAr(psi, eta, tau),
                       budget, seed);
}

inline SanitizedRelease iclp_qr_mean(const std::vector<FunctionOnGrid>& curves,
                                     const SpectralBasis& basis, double psi,
                                     double eta, double tau,
                                     const PrivacyBudget& budget,
                                     std::uint64_t seed) {
  return sanitize_mean(curves, basis, MechanismConfig::IclpQr(psi, eta, tau),
                       budget, seed);
}

inline SanitizedRelease gp_adp_mean(const std::vector<FunctionOnGrid>& curves,
                                    const SpectralBasis& basis, double psi,
                                    double eta, double tau,
                                    const PrivacyBudget& budget,
                                    std::uint64_t seed) {
  return sanitize_mean(curves, basis, MechanismConfig::GpAdp(psi, eta, tau),
                       budget, seed);
}

// ---------------------------------------------------------------------------
// Kernel density estimation.

struct KdeOptions {
  // Also measure the sensitivity directly on the grid and release with
  // max(analytic, measured).
  bool certified_bound = false;
  // Probe stride per axis for the measured bound.
  int probe_stride = 1;
};

// Density estimation profile: the continuum power of the noise kernel,
// normalized to integrate to one over R^d.
struct KdeProfile {
  KernelSpec shape;
  double integral = 1.0;

  double operator()(double distance) const {
    return shape.Profile(distance) / integral;
  }
  double peak() const { return 1.0 / integral; }
};

inline KdeProfile MakeKdeProfile(const KernelSpec& kernel, double eta, int dim) {
  KdeProfile p;
  p.shape = kernel.PowerProfile(eta, dim);
  p.integral = p.shape.ProfileIntegral(dim);
  return p;
}

inline double KdeSensitivity(double peak, const SpectralBasis& basis, double eta,
                             double h, int n) {
  const int d = basis.grid.dim();
  return 2.0 * peak * std::sqrt(partial_trace(basis, eta - 1.0)) /
         (n * std::pow(h, d));
}

// Values of (1 / h^d) profile((x - center) / h) at every grid node.
inline Eigen::VectorXd KdeBump(const KdeProfile& profile, const GridSpec& grid,
                               const std::array<double, 2>& center, double h) {
  const int d = grid.dim();
  const double scale = 1.0 / std::pow(h, d);
  Eigen::VectorXd v(grid.size());
  for (int g = 0; g < grid.size(); ++g) {
    auto x = grid.node(g);
    const double dist = d == 1 ? std::abs(x[0] - center[0])
                               : std::hypot(x[0] - center[0], x[1] - center[1]);
    v(g) = scale * profile(dist / h);
  }
  return v;
}

// Largest (2 / n) ||P bump_x||_{1,C} over probe nodes x.
inline double MeasuredKdeSensitivity(const KdeProfile& profile,
                                     const SpectralBasis& basis, double h,
                                     int n, int stride) {
  const GridSpec& grid = basis.grid;
  const int k = grid.points_per_axis();
  double best = 0.0;
  for (int g = 0; g < grid.size(); ++g) {
    if (grid.dim() == 1 ? g % stride != 0
                        : ((g / k) % stride != 0 || (g % k) % stride != 0)) {
      continue;
    }
    const Eigen::VectorXd bump = KdeBump(profile, grid, grid.node(g), h);
    best = std::max(best, weighted_l1_norm_coeffs(project(bump, basis), basis));
  }
  return 2.0 * best / n;
}

// points: n x d, one observation per row, inside the grid's box.
inline SanitizedRelease dp_kde(const Eigen::MatrixXd& points,
                               const SpectralBasis& basis,
                               const KernelSpec& kernel, double eta, double h,
                               const PrivacyBudget& budget, std::uint64_t seed,
                               const KdeOptions& options = {}) {
  budget.Validate();
  ICLP_REQUIRE(eta > 1 && std::isfinite(eta), ConfigError,
               "KDE needs eta > 1, got ", eta);
  ICLP_REQUIRE(h > 0 && std::isfinite(h), ConfigError,
               "bandwidth must be positive, got ", h);
  ICLP_REQUIRE(budget.delta == 0, ConfigError,
               "KDE release is pure DP; delta must be 0");
  ICLP_REQUIRE(options.probe_stride >= 1, ConfigError,
               "probe stride must be >= 1");
  const GridSpec& grid = basis.grid;
  const int d = grid.dim();
  const int n = static_cast<int>(points.rows());
  ICLP_REQUIRE(n >= 1, DataError, "need at least one point");
  ICLP_REQUIRE(points.cols() == d, DimensionError, "points have ",
               points.cols(), " coordinates, grid is ", d, "-dimensional");
  for (int i = 0; i < n; ++i) {
    std::array<double, 2> x{points(i, 0), d == 2 ? points(i, 1) : 0.0};
    ICLP_REQUIRE(grid.contains(x), DataError, "point ", i + 1,
                 " lies outside the domain");
  }

  const KdeProfile profile = MakeKdeProfile(kernel, eta, d);
  Eigen::VectorXd est = Eigen::VectorXd::Zero(grid.size());
  for (int i = 0; i < n; ++i) {
    std::array<double, 2> x{points(i, 0), d == 2 ? points(i, 1) : 0.0};
    est += KdeBump(profile, grid, x, h);
  }
  est /= n;

  SanitizedRelease r;
  r.mechanism = "kde";
  r.budget = budget;
  r.process = NoiseProcess::kIclp;
  r.n = n;
  r.seed = seed;
  r.floor_rel = basis.floor_rel;
  r.parameters = {{"eta", eta}, {"h", h}, {"peak", profile.peak()}};
  r.delta_gs = KdeSensitivity(profile.peak(), basis, eta, h, n);
  if (options.certified_bound) {
    const double measured =
        MeasuredKdeSensitivity(profile, basis, h, n, options.probe_stride);
    r.parameters.emplace_back("measured_delta_gs", measured);
    if (measured > r.delta_gs) {
      r.warnings.push_back(internal::Concat("measured sensitivity ", measured,
                                  " exceeds the analytic bound ", r.delta_gs,
                                  "; releasing with the measured value"));
      r.delta_gs = measured;
    }
  }
  r.sigma = calibrate(r.delta_gs, budget, NoiseProcess::kIclp);
  r.noisy_components = basis.size();
  r.noise_scales = NoiseScales(r.process, r.sigma, basis, basis.size());
  r.non_private_coefficients = project(est, basis);
  r.non_private = FunctionOnGrid(grid, est);
  const Eigen::VectorXd noise = DrawReleaseNoise(
      basis, NoiseProcess::kIclp, r.sigma, basis.size(), seed);
  r.summary = reconstruct(r.non_private_coefficients + noise, basis);
  return r;
}

// ---------------------------------------------------------------------------
// Regularized ERM.

// (M / (psi n)) sqrt(max_x sum_j lambda_j^eta phi_j(x)^2) sqrt(sum lambda^(eta-1)).
inline double rerm_sensitivity(double loss_m, double psi,
                               const SpectralBasis& basis, double eta, int n) {
  ICLP_REQUIRE(loss_m > 0 && psi > 0 && n > 0, ConfigError,
               "M, psi and n must be positive");
  ICLP_REQUIRE(eta > 1, ConfigError, "eta must exceed 1, got ", eta);
  const Eigen::ArrayXd le = basis.eigenvalues.array().pow(eta);
  const double sup_diag =
      (basis.eigenfunctions.array().square().rowwise() * le.transpose())
          .rowwise()
          .sum()
          .maxCoeff();
  return loss_m / (psi * n) * std::sqrt(sup_diag) *
         std::sqrt(partial_trace(basis, eta - 1.0));
}

// ---------------------------------------------------------------------------
// Covariance surface.

// Entrywise bound on the change of the centered coefficient covariance when
// one curve of norm <= tau is replaced.
inline double CovarianceEntryBound(double tau, int n) {
  const double t2 = tau * tau;
  return 6.0 * t2 / n + 4.0 * t2 / (static_cast<double>(n) * n);
}

inline double covariance_sensitivity(const SpectralBasis& basis, double psi,
                                     double eta, double tau, int n) {
  const Eigen::ArrayXd l = basis.eigenvalues.array();
  double s = 0.0;
  for (Eigen::Index j = 0; j < l.size(); ++j) {
    for (Eigen::Index k = 0; k < l.size(); ++k) {
      const double p = l(j) * l(k);
      s += std::pow(p, eta - 0.5) / (std::pow(p, eta) + psi);
    }
  }
  return CovarianceEntryBound(tau, n) * s;
}

inline GridSpec SquareOf(const GridSpec& line) {
  ICLP_REQUIRE(line.dim() == 1, DimensionError, "expected a 1D grid");
  return GridSpec::Square(line.points_per_axis(), line.bounds(0), line.bounds(0));
}

// Tensor-filtered covariance surface plus tensor ICLP noise, released on the
// square grid. Coefficients are stored row-major (j, l) -> j * J + l.
inline SanitizedRelease dp_covariance(const std::vector<FunctionOnGrid>& curves,
                                      const SpectralBasis& basis, double psi,
                                      double eta, double tau,
                                      const PrivacyBudget& budget,
                                      std::uint64_t seed) {
  budget.Validate();
  ICLP_REQUIRE(psi > 0 && std::isfinite(psi), ConfigError,
               "psi must be positive, got ", psi);
  ICLP_REQUIRE(eta > 1 && std::isfinite(eta), ConfigError,
               "eta must exceed 1, got ", eta);
  ICLP_REQUIRE(tau > 0, ConfigError, "tau must be positive, got ", tau);
  ICLP_REQUIRE(budget.delta == 0, ConfigError,
               "covariance release is pure DP; delta must be 0");
  const int n = static_cast<int>(curves.size());
  ICLP_REQUIRE(n >= 2, DataError, "need at least 2 curves, got ", n);

  Eigen::MatrixXd values = StackCurves(curves, basis.grid);
  ClipColumns(basis.grid, tau, values);
  values.colwise() -= values.rowwise().mean();
  const Eigen::MatrixXd a =
      basis.eigenfunctions.transpose() * basis.grid.weights().asDiagonal() *
      values;  // J x n
  const int jm = basis.size();
  Eigen::MatrixXd cov = a * a.transpose() / n;
  const Eigen::ArrayXd l = basis.eigenvalues.array();
  Eigen::MatrixXd filt(jm, jm);
  Eigen::MatrixXd scale(jm, jm);
  const double delta_gs = covariance_sensitivity(basis, psi, eta, tau, n);
  const double sigma = calibrate(delta_gs, budget, NoiseProcess::kIclp);
  for (int j = 0; j < jm; ++j) {
    for (int k = 0; k < jm; ++k) {
      const double pe = std::pow(l(j) * l(k), eta);
      filt(j, k) = pe / (pe + psi);
      scale(j, k) = sigma * std::sqrt(l(j) * l(k) / 2.0);
    }
  }
  Eigen::MatrixXd est = filt.cwiseProduct(cov);
  est = 0.5 * (est + est.transpose()).eval();

  Rng rng(DeriveSeed(seed, {}));
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(jm, jm);
  if (sigma > 0) {
    for (int j = 0; j < jm; ++j) {
      for (int k = 0; k < jm; ++k) noise(j, k) = rng.Laplace(scale(j, k));
    }
  }

  const GridSpec square = SquareOf(basis.grid);
  auto surface = [&](const Eigen::MatrixXd& coeffs) {
    Eigen::MatrixXd s =
        basis.eigenfunctions * coeffs * basis.eigenfunctions.transpose();
    Eigen::VectorXd flat(square.size());
    const int k = basis.grid.size();
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) flat(i * k + j) = s(i, j);
    }
    return FunctionOnGrid(square, flat);
  };

  SanitizedRelease r;
  r.mechanism = "covariance";
  r.config = MechanismConfig::IclpQr(psi, eta, tau);
  r.budget = budget;
  r.process = NoiseProcess::kIclp;
  r.n = n;
  r.seed = seed;
  r.floor_rel = basis.floor_rel;
  r.delta_gs = delta_gs;
  r.sigma = sigma;
  r.noisy_components = jm * jm;
  r.non_private_coefficients = Eigen::Map<const Eigen::VectorXd>(
      Eigen::MatrixXd(est.transpose()).data(), jm * jm);
  Eigen::MatrixXd st = scale.transpose();
  r.noise_scales = Eigen::Map<const Eigen::VectorXd>(st.data(), jm * jm);
  r.non_private = surface(est);
  r.summary = surface(est + noise);
  // Make the non-private surface exactly symmetric.
  {
    Eigen::VectorXd v = r.non_private.values();
    const int k = basis.grid.size();
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) v(j * k + i) = v(i * k + j);
    }
    r.non_private = FunctionOnGrid(square, v);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Function-on-scalar regression.

struct FosRelease {
  std::vector<FunctionOnGrid> beta;              // p sanitized curves
  std::vector<FunctionOnGrid> beta_non_private;  // p curves
  Eigen::MatrixXd t1;                            // sanitized p x p
  Eigen::MatrixXd t1_non_private;
  double t1_sensitivity = 0.0;  // l1, upper triangle
  double t1_scale = 0.0;        // Laplace scale per entry
  std::vector<SanitizedRelease> t2;  // one per covariate column
  PrivacyBudget budget;
  double gamma = 0.5;
  double bx = 1.0;
  std::uint64_t seed = 0;
};

// beta = T1^-1 T2 with T1 = mean X X^T (Laplace, budget gamma eps) and
// T2_k = QR-filtered mean of Y_i X_ik (ICLP, budget (1 - gamma) eps / p).
// Covariates are clamped to [-bx, bx] and curves clipped to tau.
inline FosRelease dp_fos_regression(const Eigen::MatrixXd& x,
                                    const std::vector<FunctionOnGrid>& y,
                                    const SpectralBasis& basis, double gamma,
                                    double psi, double eta, double tau, double bx,
                                    const PrivacyBudget& budget,
                                    std::uint64_t seed) {
  budget.Validate();
  ICLP_REQUIRE(gamma > 0 && gamma < 1, ConfigError,
               "gamma must lie in (0, 1), got ", gamma);
  ICLP_REQUIRE(bx > 0 && std::isfinite(bx), ConfigError,
               "covariate bound must be positive, got ", bx);
  ICLP_REQUIRE(budget.delta == 0, ConfigError,
               "regression release is pure DP; delta must be 0");
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  ICLP_REQUIRE(n == static_cast<int>(y.size()), DimensionError, "X has ", n,
               " rows but there are ", y.size(), " curves");
  ICLP_REQUIRE(p >= 1 && n >= 2, DataError, "need p >= 1 and n >= 2");
  const MechanismConfig qr = MechanismConfig::IclpQr(psi, eta, tau * bx);
  qr.Validate(basis);

  const Eigen::MatrixXd xc = x.cwiseMax(-bx).cwiseMin(bx);
  Eigen::MatrixXd yv = StackCurves(y, basis.grid);
  ClipColumns(basis.grid, tau, yv);

  FosRelease r;
  r.budget = budget;
  r.gamma = gamma;
  r.bx = bx;
  r.seed = seed;
  r.t1_non_private = xc.transpose() * xc / n;
  r.t1_sensitivity = 0.5 * p * (p + 1) * 2.0 * bx * bx / n;
  r.t1_scale = r.t1_sensitivity / (gamma * budget.epsilon);
  r.t1 = r.t1_non_private;
  {
    Rng rng(DeriveSeed(seed, {0}));
    for (int a = 0; a < p; ++a) {
      for (int b = a; b < p; ++b) {
        r.t1(a, b) += rng.Laplace(r.t1_scale);
        r.t1(b, a) = r.t1(a, b);
      }
    }
  }

  const PrivacyBudget col_budget{(1.0 - gamma) * budget.epsilon / p, 0.0};
  Eigen::MatrixXd t2(basis.grid.size(), p), t2_np(basis.grid.size(), p);
  for (int k = 0; k < p; ++k) {
    Eigen::MatrixXd prod = yv * xc.col(k).asDiagonal();
    r.t2.push_back(SanitizeMeanValues(std::move(prod), basis, qr, col_budget,
                                      DeriveSeed(seed, {1, static_cast<std::uint64_t>(k)})));
    t2.col(k) = r.t2.back().summary.values();
    t2_np.col(k) = r.t2.back().non_private.values();
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(r.t1);
  ICLP_REQUIRE(lu.isInvertible(), PrivacyError,
               "sanitized X'X/n is singular; redrawing would break the privacy "
               "guarantee, so no estimate is released");
  const Eigen::MatrixXd beta = lu.solve(t2.transpose());  // p x N
  Eigen::FullPivLU<Eigen::MatrixXd> lu_np(r.t1_non_private);
  ICLP_REQUIRE(lu_np.isInvertible(), DataError, "X'X is singular");
  const Eigen::MatrixXd beta_np = lu_np.solve(t2_np.transpose());
  for (int k = 0; k < p; ++k) {
    r.beta.emplace_back(basis.grid, beta.row(k).transpose());
    r.beta_non_private.emplace_back(basis.grid, beta_np.row(k).transpose());
  }
  return r;
}

}  // namespace iclp

#endif  // ICLP_MECHANISMS_HPP_
