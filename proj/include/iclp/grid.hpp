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

#ifndef ICLP_GRID_HPP_
#define ICLP_GRID_HPP_

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <type_traits>
#include <utility>

#include "iclp/error.hpp"

namespace iclp {

// Closed interval [lo, hi] along one axis.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool operator==(const Interval&) const = default;
};

// Uniform tensor grid on a box in one or two dimensions.
//
// Nodes are stored row-major: node (i, j) of a 2D grid has flat index
// i * K + j, where i runs along axis 0.
class GridSpec {
 public:
  GridSpec() : GridSpec(1, 2, {Interval{}}) {}

  GridSpec(int dim, int points_per_axis, std::array<Interval, 2> bounds)
      : dim_(dim), k_(points_per_axis), bounds_(bounds) {
    ICLP_REQUIRE(dim == 1 || dim == 2, ConfigError,
                 "grid dimension must be 1 or 2, got ", dim);
    ICLP_REQUIRE(points_per_axis >= 2, ConfigError,
                 "grid needs at least 2 points per axis, got ",
                 points_per_axis);
    for (int a = 0; a < dim; ++a) {
      ICLP_REQUIRE(std::isfinite(bounds[a].lo) && std::isfinite(bounds[a].hi) &&
                       bounds[a].hi > bounds[a].lo,
                   ConfigError, "axis ", a, " bounds must satisfy lo < hi");
    }
    if (dim == 1) bounds_[1] = bounds_[0];
    BuildWeights();
  }

  static GridSpec Line(int k, double lo = 0.0, double hi = 1.0) {
    return GridSpec(1, k, {Interval{lo, hi}, Interval{lo, hi}});
  }

  static GridSpec Square(int k, Interval x, Interval y) {
    return GridSpec(2, k, {x, y});
  }

  int dim() const { return dim_; }
  int points_per_axis() const { return k_; }
  int size() const { return dim_ == 1 ? k_ : k_ * k_; }
  const Interval& bounds(int axis) const { return bounds_[axis]; }

  double spacing(int axis = 0) const {
    return (bounds_[axis].hi - bounds_[axis].lo) / (k_ - 1);
  }

  // Coordinate of the i-th node along one axis.
  double axis_node(int axis, int i) const {
    if (i == k_ - 1) return bounds_[axis].hi;
    return bounds_[axis].lo + i * spacing(axis);
  }

  // Coordinates of flat node `index`.
  std::array<double, 2> node(int index) const {
    if (dim_ == 1) return {axis_node(0, index), 0.0};
    return {axis_node(0, index / k_), axis_node(1, index % k_)};
  }

  // Product trapezoid weights, one per node.
  const Eigen::VectorXd& weights() const { return weights_; }

  // Domain volume.
  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= bounds_[a].hi - bounds_[a].lo;
    return v;
  }

  bool contains(const std::array<double, 2>& x) const {
    for (int a = 0; a < dim_; ++a) {
      if (!(x[a] >= bounds_[a].lo && x[a] <= bounds_[a].hi)) return false;
    }
    return true;
  }

  bool operator==(const GridSpec& o) const {
    if (dim_ != o.dim_ || k_ != o.k_) return false;
    for (int a = 0; a < dim_; ++a) {
      if (!(bounds_[a] == o.bounds_[a])) return false;
    }
    return true;
  }

 private:
  void BuildWeights() {
    Eigen::VectorXd w1[2];
    for (int a = 0; a < dim_; ++a) {
      w1[a] = Eigen::VectorXd::Constant(k_, spacing(a));
      w1[a](0) *= 0.5;
      w1[a](k_ - 1) *= 0.5;
    }
    if (dim_ == 1) {
      weights_ = w1[0];
      return;
    }
    weights_.resize(size());
    for (int i = 0; i < k_; ++i) {
      for (int j = 0; j < k_; ++j) weights_(i * k_ + j) = w1[0](i) * w1[1](j);
    }
  }

  int dim_;
  int k_;
  std::array<Interval, 2> bounds_;
  Eigen::VectorXd weights_;
};

// A function sampled at every node of a grid.
class FunctionOnGrid {
 public:
  FunctionOnGrid() = default;

  FunctionOnGrid(GridSpec grid, Eigen::VectorXd values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    ICLP_REQUIRE(values_.size() == grid_.size(), DimensionError,
                 "function has ", values_.size(), " values but grid has ",
                 grid_.size(), " nodes");
    ICLP_REQUIRE(values_.allFinite(), DataError,
                 "function values must be finite");
  }

  static FunctionOnGrid Zero(const GridSpec& grid) {
    return FunctionOnGrid(grid, Eigen::VectorXd::Zero(grid.size()));
  }

  template <typename F>
  static FunctionOnGrid FromCallable(const GridSpec& grid, F&& f) {
    Eigen::VectorXd v(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      auto x = grid.node(i);
      if constexpr (std::is_invocable_v<F, double>) {
        v(i) = f(x[0]);
      } else {
        v(i) = f(x[0], x[1]);
      }
    }
    return FunctionOnGrid(grid, std::move(v));
  }

  const GridSpec& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](int i) const { return values_(i); }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  GridSpec grid_;
  Eigen::VectorXd values_;
};

inline void RequireSameGrid(const GridSpec& a, const GridSpec& b) {
  ICLP_REQUIRE(a == b, DimensionError, "functions live on different grids");
}

inline double inner_product(const FunctionOnGrid& f, const FunctionOnGrid& g) {
  RequireSameGrid(f.grid(), g.grid());
  return (f.grid().weights().array() * f.values().array() *
          g.values().array())
      .sum();
}

inline double l2_norm(const FunctionOnGrid& f) {
  return std::sqrt(inner_product(f, f));
}

// Squared norm of a raw value vector under the grid's quadrature.
inline double l2_norm_squared(const GridSpec& grid, const Eigen::VectorXd& v) {
  ICLP_REQUIRE(v.size() == grid.size(), DimensionError,
               "vector length does not match grid");
  return (grid.weights().array() * v.array().square()).sum();
}

inline double l2_distance(const FunctionOnGrid& f, const FunctionOnGrid& g) {
  RequireSameGrid(f.grid(), g.grid());
  return std::sqrt(l2_norm_squared(f.grid(), f.values() - g.values()));
}

}  // namespace iclp

#endif  // ICLP_GRID_HPP_
