// Copyright 2026 The PolyScope Authors
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

// Synthetic Android-like snapshots for property tests and benchmarks.

#ifndef POLYSCOPE_SYNTHGEN_HPP
#define POLYSCOPE_SYNTHGEN_HPP

#include <cstddef>
#include <cstdint>

#include "polyscope/snapshot.hpp"

namespace polyscope {

struct GenParams {
  std::uint64_t seed = 1;
  std::size_t subject_count = 0;
  std::size_t object_count = 0;
  double legacy_fraction = 0.2;
  double external_fraction = 0.3;
  bool scoped_storage_enabled = true;
  // Zipf exponent for how many labels hold rules on each object type.
  double skew = 1.0;
};

// Counter-based generator: value i of stream k is a pure function of
// (seed, k, i), so output is stable across platforms and compilers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next();
  double uniform();                                  // [0, 1)
  std::uint64_t below(std::uint64_t bound);          // [0, bound)
  bool chance(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Deterministic per params; the result always validates without errors.
// Throws ValueError for out-of-range fractions.
Snapshot generate(const GenParams& params);

}  // namespace polyscope

#endif  // POLYSCOPE_SYNTHGEN_HPP
