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

// Umbrella header.

#ifndef ICLP_ICLP_HPP_
#define ICLP_ICLP_HPP_

#include "iclp/bench.hpp"
#include "iclp/csv.hpp"
#include "iclp/error.hpp"
#include "iclp/grid.hpp"
#include "iclp/kernel.hpp"
#include "iclp/mechanisms.hpp"
#include "iclp/noise.hpp"
#include "iclp/rng.hpp"
#include "iclp/selection.hpp"
#include "iclp/spectral.hpp"

#endif  // ICLP_ICLP_HPP_
