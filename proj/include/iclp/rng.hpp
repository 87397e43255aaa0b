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

#ifndef ICLP_RNG_HPP_
#define ICLP_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace iclp {

inline constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream key from a master seed and a path of tags,
// e.g. DeriveSeed(seed, {kNoiseTag, replicate}).
inline constexpr std::uint64_t DeriveSeed(
    std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t key = Mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t t : tags) key = Mix64(key ^ Mix64(t + 0x9e3779b97f4a7c15ULL));
  return key;
}

// Counter-based generator: output k is Mix64(key + (k + 1) * golden), so a
// stream is fully determined by its key and is cheap to create per draw.
//
// Variates are produced by explicit transforms rather than <random>
// distributions so that streams agree across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix64(state_);
  }

  // Uniform on the open interval (0, 1).
  double Uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = Uniform();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  // Laplace with scale b by inverse CDF.
  double Laplace(double b) {
    const double u = Uniform() - 0.5;
    const double mag = -b * std::log1p(-2.0 * std::abs(u));
    return u < 0 ? -mag : mag;
  }

  // Zero-mean, unit-variance Laplace (scale 1/sqrt 2).
  double StandardLaplace() { return Laplace(std::numbers::sqrt2 / 2.0); }

  // Student t with integer degrees of freedom.
  double StudentT(int dof) {
    const double z = Normal();
    double chi2 = 0.0;
    for (int i = 0; i < dof; ++i) {
      const double g = Normal();
      chi2 += g * g;
    }
    return z / std::sqrt(chi2 / dof);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace iclp

#endif  // ICLP_RNG_HPP_
