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

#ifndef ICLP_ERROR_HPP_
#define ICLP_ERROR_HPP_

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace iclp {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-domain input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Two objects live on incompatible grids or have incompatible sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A matrix is not symmetric, degenerate, or singular.
class MatrixError : public Error {
 public:
  using Error::Error;
};

// The request cannot be met under the stated privacy guarantee.
class PrivacyError : public Error {
 public:
  using Error::Error;
};

namespace internal {

template <typename... Args>
std::string Concat(Args&&... args) {
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  return os.str();
}

}  // namespace internal

#define ICLP_REQUIRE(cond, ErrorType, ...)                              \
  do {                                                                  \
    if (!(cond)) throw ErrorType(::iclp::internal::Concat(__VA_ARGS__)); \
  } while (0)

}  // namespace iclp

#endif  // ICLP_ERROR_HPP_
