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

#ifndef ICLP_KERNEL_HPP_
#define ICLP_KERNEL_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "iclp/error.hpp"
#include "iclp/grid.hpp"

namespace iclp {

enum class KernelFamily { kMatern, kGaussian, kExponential };

// Stationary isotropic covariance kernel C(s, t) = amplitude * k(|s - t|).
struct KernelSpec {
  KernelFamily family = KernelFamily::kMatern;
  double alpha = 1.5;  // Matérn smoothness; ignored by other families
  double rho = 0.1;
  double amplitude = 1.0;

  static KernelSpec Matern(double alpha, double rho, double amplitude = 1.0) {
    KernelSpec k{KernelFamily::kMatern, alpha, rho, amplitude};
    k.Validate();
    return k;
  }
  static KernelSpec Gaussian(double rho, double amplitude = 1.0) {
    KernelSpec k{KernelFamily::kGaussian, 0.0, rho, amplitude};
    k.Validate();
    return k;
  }
  static KernelSpec Exponential(double rho, double amplitude = 1.0) {
    KernelSpec k{KernelFamily::kExponential, 0.5, rho, amplitude};
    k.Validate();
    return k;
  }

  // Accepts matern32, matern52, gaussian, exponential, or matern<alpha>
  // written as e.g. "matern:0.75".
  static KernelSpec Parse(const std::string& name, double rho) {
    if (name == "matern32") return Matern(1.5, rho);
    if (name == "matern52") return Matern(2.5, rho);
    if (name == "matern12" || name == "exponential") return Exponential(rho);
    if (name == "gaussian" || name == "rbf") return Gaussian(rho);
    if (name.rfind("matern:", 0) == 0) {
      double a = 0.0;
      try {
        a = std::stod(name.substr(7));
      } catch (const std::exception&) {
        throw ConfigError("bad Matérn smoothness in '" + name + "'");
      }
      return Matern(a, rho);
    }
    throw ConfigError("unknown kernel '" + name +
                      "' (expected matern32, matern52, gaussian, exponential)");
  }

  std::string Name() const {
    switch (family) {
      case KernelFamily::kGaussian:
        return "gaussian";
      case KernelFamily::kExponential:
        return "exponential";
      case KernelFamily::kMatern:
        if (alpha == 1.5) return "matern32";
        if (alpha == 2.5) return "matern52";
        return "matern:" + std::to_string(alpha);
    }
    return "unknown";
  }

  void Validate() const {
    ICLP_REQUIRE(rho > 0 && std::isfinite(rho), ConfigError,
                 "kernel length-scale must be positive, got ", rho);
    ICLP_REQUIRE(amplitude > 0 && std::isfinite(amplitude), ConfigError,
                 "kernel amplitude must be positive, got ", amplitude);
    if (family == KernelFamily::kMatern) {
      ICLP_REQUIRE(alpha > 0 && std::isfinite(alpha), ConfigError,
                   "Matérn smoothness must be positive, got ", alpha);
    }
  }

  // Kernel value at distance d >= 0.
  double operator()(double d) const {
    return amplitude * Profile(d);
  }

  // Unit-amplitude profile k(d).
  double Profile(double d) const {
    d = std::abs(d);
    switch (family) {
      case KernelFamily::kGaussian:
        return std::exp(-d * d / (2.0 * rho * rho));
      case KernelFamily::kExponential:
        return std::exp(-d / rho);
      case KernelFamily::kMatern:
        return MaternProfile(alpha, rho, d);
    }
    return 0.0;
  }

  // Bessel form of the Matérn profile, valid for every alpha.
  static double MaternBessel(double alpha, double rho, double d) {
    if (d == 0.0) return 1.0;
    const double r = std::sqrt(2.0 * alpha) * d / rho;
    if (r > 700.0) return 0.0;
    return std::pow(2.0, 1.0 - alpha) / std::tgamma(alpha) *
           std::pow(r, alpha) * std::cyl_bessel_k(alpha, r);
  }

  static double MaternProfile(double alpha, double rho, double d) {
    if (alpha == 0.5) return std::exp(-d / rho);
    if (alpha == 1.5) {
      const double r = std::sqrt(3.0) * d / rho;
      return (1.0 + r) * std::exp(-r);
    }
    if (alpha == 2.5) {
      const double r = std::sqrt(5.0) * d / rho;
      return (1.0 + r + r * r / 3.0) * std::exp(-r);
    }
    return MaternBessel(alpha, rho, d);
  }

  // Integral of the unit-amplitude profile over R^dim.
  double ProfileIntegral(int dim) const {
    const double pi = std::numbers::pi;
    switch (family) {
      case KernelFamily::kGaussian:
        return std::pow(2.0 * pi * rho * rho, 0.5 * dim);
      case KernelFamily::kExponential:
      case KernelFamily::kMatern: {
        const double a = family == KernelFamily::kExponential ? 0.5 : alpha;
        const double ell = rho / std::sqrt(2.0 * a);
        return std::pow(2.0 * std::sqrt(pi) * ell, dim) *
               std::tgamma(a + 0.5 * dim) / std::tgamma(a);
      }
    }
    return 0.0;
  }

  // Profile of the continuum operator power C^eta on R^dim, up to scale.
  //
  // Gaussian spectra stay Gaussian; a Matérn spectrum (1 + |w|^2 l^2)^-(a+d/2)
  // raised to eta is Matérn with a' = eta (a + d/2) - d/2 and the same l.
  KernelSpec PowerProfile(double eta, int dim) const {
    ICLP_REQUIRE(eta > 0, ConfigError, "power exponent must be positive");
    if (family == KernelFamily::kGaussian) {
      return Gaussian(rho * std::sqrt(eta));
    }
    const double a = family == KernelFamily::kExponential ? 0.5 : alpha;
    const double a_new = eta * (a + 0.5 * dim) - 0.5 * dim;
    ICLP_REQUIRE(a_new > 0, ConfigError,
                 "power exponent too small for this kernel");
    return Matern(a_new, rho * std::sqrt(a_new / a));
  }
};

// Gram matrix over every pair of grid nodes; distance is Euclidean.
inline Eigen::MatrixXd gram(const KernelSpec& spec, const GridSpec& grid) {
  spec.Validate();
  const int n = grid.size();
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    auto xi = grid.node(i);
    g(i, i) = spec(0.0);
    for (int j = i + 1; j < n; ++j) {
      auto xj = grid.node(j);
      const double d = std::hypot(xi[0] - xj[0], xi[1] - xj[1]);
      g(i, j) = g(j, i) = spec(d);
    }
  }
  return g;
}

// Returns `spec` rescaled so that the quadrature trace of its gram is 1.
inline KernelSpec normalize_trace(KernelSpec spec, const GridSpec& grid) {
  spec.amplitude = 1.0 / (spec.Profile(0.0) * grid.weights().sum());
  return spec;
}

}  // namespace iclp

#endif  // ICLP_KERNEL_HPP_
