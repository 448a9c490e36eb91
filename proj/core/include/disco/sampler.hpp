// Copyright 2026 The DisCo Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Query / positive / negative set construction for one optimization step.
// Q and K+ share one direction d ~ U{0..D-1}; each negative draws its own
// direction from U{0..D-1} \ {d}. Every shift is U[-eps_bar, eps_bar].

#ifndef DISCO_SAMPLER_HPP_
#define DISCO_SAMPLER_HPP_

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "disco/common.hpp"
#include "disco/contrastor.hpp"
#include "disco/gen_backend.hpp"
#include "disco/navigator.hpp"

namespace disco {

struct SamplerConfig {
  int directions = 8;  // D
  int queries = 32;    // B
  int positives = 32;  // N
  int negatives = 64;  // M
  double eps_bar = 3.0;
};

struct BatchSpec {
  int direction = 0;
  std::vector<int> negative_directions;  // M entries, none equal to `direction`
  std::vector<LatentCode> queries;
  std::vector<LatentCode> positives;
  std::vector<LatentCode> negatives;
  std::vector<double> query_shifts;
  std::vector<double> positive_shifts;
  std::vector<double> negative_shifts;

  // Flattened slots in Q, K+, K- order.
  std::vector<VariationSlot> slots() const;
  nlohmann::json to_json() const;
};

// Throws ConfigError for D < 2, non-positive set sizes, or eps_bar <= 0.
BatchSpec draw_spec(Rng& rng, const Generator& generator, const SamplerConfig& config);

struct ContrastBatch {
  BatchSpec spec;
  Mat queries;    // n x B
  Mat positives;  // n x N
  Mat negatives;  // n x M
  int resampled = 0;
  // Kept for the backward pass; null for batches realized without it.
  std::optional<VariationPass> pass;
};

inline constexpr int kResampleAttempts = 10;

// Realizes every slot through the contrastor. A slot whose variation vanishes
// gets a fresh (z, eps) from `rng`; after kResampleAttempts rounds that still
// leave a degenerate slot, throws BatchError.
ContrastBatch realize_batch(BatchSpec spec, const Encoder& encoder,
                            const Generator& generator, const Navigator& navigator,
                            Rng& rng, double eps_bar,
                            VariationMode mode = VariationMode::difference);

}  // namespace disco

#endif  // DISCO_SAMPLER_HPP_
