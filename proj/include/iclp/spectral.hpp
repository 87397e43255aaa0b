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

#ifndef ICLP_SPECTRAL_HPP_
#define ICLP_SPECTRAL_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "iclp/csv.hpp"
#include "iclp/error.hpp"
#include "iclp/grid.hpp"
#include "iclp/kernel.hpp"

namespace iclp {

// Eigenpairs of a kernel operator approximated on a grid.
//
// Only eigenvalues above floor_rel * lambda_1 are kept; every norm and
// projection below works on that retained span.
struct SpectralBasis {
  GridSpec grid;
  Eigen::VectorXd eigenvalues;     // J, decreasing, positive
  Eigen::MatrixXd eigenfunctions;  // grid.size() x J
  double floor_rel = 1e-12;
  int discarded = 0;  // eigenpairs dropped by the floor

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

inline constexpr double kDefaultFloorRel = 1e-12;

// Weighted Nyström decomposition: eigenpairs of W^1/2 G W^1/2 give
// lambda directly and phi = W^-1/2 u, which is orthonormal under the
// trapezoid quadrature.
inline SpectralBasis decompose(const Eigen::MatrixXd& gram_matrix,
                               const GridSpec& grid,
                               double floor_rel = kDefaultFloorRel) {
  const int n = grid.size();
  ICLP_REQUIRE(gram_matrix.rows() == n && gram_matrix.cols() == n,
               DimensionError, "gram is ", gram_matrix.rows(), "x",
               gram_matrix.cols(), " but grid has ", n, " nodes");
  ICLP_REQUIRE(floor_rel > 0 && floor_rel < 1, ConfigError,
               "floor_rel must lie in (0, 1), got ", floor_rel);
  ICLP_REQUIRE(gram_matrix.allFinite(), MatrixError, "gram has non-finite entries");
  const double scale = gram_matrix.cwiseAbs().maxCoeff();
  ICLP_REQUIRE((gram_matrix - gram_matrix.transpose()).cwiseAbs().maxCoeff() <=
                   1e-10 * std::max(scale, 1e-300),
               MatrixError, "gram matrix is not symmetric");

  const Eigen::VectorXd sw = grid.weights().cwiseSqrt();
  Eigen::MatrixXd a = sw.asDiagonal() * gram_matrix * sw.asDiagonal();
  a = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  ICLP_REQUIRE(es.info() == Eigen::Success, MatrixError,
               "eigendecomposition failed");

  // Eigen returns ascending order.
  const Eigen::VectorXd& nu = es.eigenvalues();
  const double top = nu(n - 1);
  ICLP_REQUIRE(top > 0, MatrixError, "kernel is degenerate: no positive eigenvalue");
  int kept = 0;
  while (kept < n && nu(n - 1 - kept) > floor_rel * top) ++kept;

  SpectralBasis b;
  b.grid = grid;
  b.floor_rel = floor_rel;
  b.discarded = n - kept;
  b.eigenvalues.resize(kept);
  b.eigenfunctions.resize(n, kept);
  const Eigen::VectorXd inv_sw = sw.cwiseInverse();
  for (int j = 0; j < kept; ++j) {
    Eigen::VectorXd u = es.eigenvectors().col(n - 1 - j);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (std::abs(u(i)) > best) {
        best = std::abs(u(i));
        arg = i;
      }
    }
    if (u(arg) < 0) u = -u;
    b.eigenvalues(j) = nu(n - 1 - j);
    b.eigenfunctions.col(j) = inv_sw.cwiseProduct(u);
  }
  return b;
}

inline SpectralBasis decompose(const KernelSpec& kernel, const GridSpec& grid,
                               double floor_rel = kDefaultFloorRel) {
  return decompose(gram(kernel, grid), grid, floor_rel);
}

// Same eigenfunctions with eigenvalues raised to eta.
inline SpectralBasis power_kernel_values(const SpectralBasis& basis, double eta) {
  ICLP_REQUIRE(eta >= 0 && std::isfinite(eta), ConfigError,
               "power exponent must be nonnegative, got ", eta);
  SpectralBasis p = basis;
  p.eigenvalues = basis.eigenvalues.array().pow(eta);
  return p;
}

inline Eigen::VectorXd project(const Eigen::VectorXd& values,
                               const SpectralBasis& basis) {
  ICLP_REQUIRE(values.size() == basis.grid.size(), DimensionError,
               "function has ", values.size(), " values, basis expects ",
               basis.grid.size());
  return basis.eigenfunctions.transpose() *
         basis.grid.weights().cwiseProduct(values);
}

inline Eigen::VectorXd project(const FunctionOnGrid& f,
                               const SpectralBasis& basis) {
  RequireSameGrid(f.grid(), basis.grid);
  return project(f.values(), basis);
}

inline FunctionOnGrid reconstruct(const Eigen::VectorXd& coeffs,
                                  const SpectralBasis& basis) {
  ICLP_REQUIRE(coeffs.size() == basis.size(), DimensionError, "got ",
               coeffs.size(), " coefficients, basis has ", basis.size());
  return FunctionOnGrid(basis.grid, basis.eigenfunctions * coeffs);
}

// Coefficient-space norms.
inline double power_norm_coeffs(const Eigen::VectorXd& c,
                                const SpectralBasis& basis, double eta) {
  ICLP_REQUIRE(c.size() == basis.size(), DimensionError,
               "coefficient length mismatch");
  return std::sqrt((c.array().square() / basis.eigenvalues.array().pow(eta)).sum());
}

inline double weighted_l1_norm_coeffs(const Eigen::VectorXd& c,
                                      const SpectralBasis& basis) {
  ICLP_REQUIRE(c.size() == basis.size(), DimensionError,
               "coefficient length mismatch");
  return (c.array().abs() / basis.eigenvalues.array().sqrt()).sum();
}

inline double cameron_martin_norm(const FunctionOnGrid& f,
                                  const SpectralBasis& basis) {
  return power_norm_coeffs(project(f, basis), basis, 1.0);
}

inline double weighted_l1_norm(const FunctionOnGrid& f,
                               const SpectralBasis& basis) {
  return weighted_l1_norm_coeffs(project(f, basis), basis);
}

inline double power_norm(const FunctionOnGrid& f, const SpectralBasis& basis,
                         double eta) {
  return power_norm_coeffs(project(f, basis), basis, eta);
}

inline double partial_trace(const SpectralBasis& basis, double eta) {
  ICLP_REQUIRE(std::isfinite(eta), ConfigError, "exponent must be finite");
  return basis.eigenvalues.array().pow(eta).sum();
}

// Negated least-squares slope of log lambda_j against log j, j in [lo, hi]
// (1-based).
inline double fit_decay(const Eigen::VectorXd& eigenvalues, int lo = 5,
                        int hi = 50) {
  ICLP_REQUIRE(lo >= 1 && hi <= eigenvalues.size() && hi - lo >= 2,
               ConfigError, "decay fit range [", lo, ", ", hi,
               "] needs at least 3 of the ", eigenvalues.size(),
               " retained eigenvalues");
  const int m = hi - lo + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int j = lo; j <= hi; ++j) {
    const double x = std::log(static_cast<double>(j));
    const double y = std::log(eigenvalues(j - 1));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

inline double fit_decay(const SpectralBasis& basis, int lo = 5, int hi = 50) {
  return fit_decay(basis.eigenvalues, lo, hi);
}

// One row per retained eigenpair: lambda_j, phi_j(x_1), ..., phi_j(x_N).
inline void save_basis_csv(const SpectralBasis& basis, const std::string& path) {
  std::ofstream out(path);
  ICLP_REQUIRE(out.good(), DataError, "cannot write '", path, "'");
  for (int j = 0; j < basis.size(); ++j) {
    out << FormatDouble(basis.eigenvalues(j));
    for (int i = 0; i < basis.grid.size(); ++i) {
      out << ',' << FormatDouble(basis.eigenfunctions(i, j));
    }
    out << '\n';
  }
}

}  // namespace iclp

#endif  // ICLP_SPECTRAL_HPP_
