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


// Builds aligned (code, factor) matrices for a trained encoder and turns them
// into the metric report written by `disco eval`.

#ifndef DISCO_EVALUATION_HPP_
#define DISCO_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disco/config.hpp"
#include "disco/contrastor.hpp"
#include "disco/gen_backend.hpp"
#include "disco/metrics.hpp"

namespace disco {

struct EvaluationSamples {
  CodeMatrix codes;      // S x n
  FactorMatrix factors;  // S x K
};

// Encodes images in chunks of this many columns.
inline constexpr int kEncodeChunk = 256;

// S latents drawn from the generator's prior with Rng(seed); factors come
// from the oracle. Throws MetricError when the generator has no factors.
EvaluationSamples collect_oracle_samples(const Encoder& encoder,
                                         const Generator& generator, int samples,
                                         std::uint64_t seed);

// External datasets: CSV with header factor_0..factor_{K-1} and an image list
// with one PNG path per line (relative paths resolve against the list's
// directory). Row i of the CSV labels line i of the list.
Mat read_factor_csv(const std::filesystem::path& path);
std::vector<std::filesystem::path> read_image_list(const std::filesystem::path& path);
EvaluationSamples collect_dataset_samples(const Encoder& encoder,
                                          const std::filesystem::path& factors_csv,
                                          const std::filesystem::path& image_list);

// Picks oracle or dataset samples according to the eval section. Throws
// MetricError when neither source of factors is available.
EvaluationSamples collect_samples(const RunConfig& config, const Encoder& encoder,
                                  const Generator& generator);

// {"mig", "per_factor_mig", "excluded_factors", "dci", "importance_matrix",
//  "samples", "config"}; metric keys appear only when requested.
nlohmann::json metric_report(const EvaluationSamples& samples,
                             const std::vector<std::string>& metrics,
                             const EvalConfig& eval, const nlohmann::json& config_echo);

}  // namespace disco

#endif  // DISCO_EVALUATION_HPP_
