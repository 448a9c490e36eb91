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

#include "disco/sampler.hpp"

namespace disco {
namespace {

std::vector<double> draw_shifts(Rng& rng, int count, double eps_bar) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (double& e : out) e = uniform(rng, -eps_bar, eps_bar);
  return out;
}

nlohmann::json codes_to_json(const std::vector<LatentCode>& codes) {
  nlohmann::json out = nlohmann::json::array();
  for (const LatentCode& c : codes)
    out.push_back(std::vector<double>(c.values.data(), c.values.data() + c.values.size()));
  return out;
}

}  // namespace

std::vector<VariationSlot> BatchSpec::slots() const {
  std::vector<VariationSlot> out;
  out.reserve(queries.size() + positives.size() + negatives.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    out.push_back({queries[i], direction, query_shifts[i]});
  for (std::size_t i = 0; i < positives.size(); ++i)
    out.push_back({positives[i], direction, positive_shifts[i]});
  for (std::size_t i = 0; i < negatives.size(); ++i)
    out.push_back({negatives[i], negative_directions[i], negative_shifts[i]});
  return out;
}

nlohmann::json BatchSpec::to_json() const {
  return {{"direction", direction},
          {"negative_directions", negative_directions},
          {"query_latents", codes_to_json(queries)},
          {"positive_latents", codes_to_json(positives)},
          {"negative_latents", codes_to_json(negatives)},
          {"query_shifts", query_shifts},
          {"positive_shifts", positive_shifts},
          {"negative_shifts", negative_shifts}};
}

BatchSpec draw_spec(Rng& rng, const Generator& generator, const SamplerConfig& config) {
  if (config.directions < 2)
    throw ConfigError("sampler needs D >= 2 so that negatives exist");
  if (config.queries < 1 || config.positives < 1 || config.negatives < 1)
    throw ConfigError("B, N and M must all be >= 1");
  if (!(config.eps_bar > 0.0)) throw ConfigError("eps_bar must be > 0");

  BatchSpec spec;
  spec.direction = uniform_int(rng, 0, config.directions - 1);
  spec.negative_directions.resize(static_cast<std::size_t>(config.negatives));
  for (int& d : spec.negative_directions) {
    // Uniform over the D-1 remaining indices.
    d = uniform_int(rng, 0, config.directions - 2);
    if (d >= spec.direction) ++d;
  }
  spec.queries = generator.sample_latent(config.queries, rng);
  spec.positives = generator.sample_latent(config.positives, rng);
  spec.negatives = generator.sample_latent(config.negatives, rng);
  spec.query_shifts = draw_shifts(rng, config.queries, config.eps_bar);
  spec.positive_shifts = draw_shifts(rng, config.positives, config.eps_bar);
  spec.negative_shifts = draw_shifts(rng, config.negatives, config.eps_bar);
  return spec;
}

ContrastBatch realize_batch(BatchSpec spec, const Encoder& encoder,
                            const Generator& generator, const Navigator& navigator,
                            Rng& rng, double eps_bar, VariationMode mode) {
  ContrastBatch batch;
  const int b = static_cast<int>(spec.queries.size());
  const int n = static_cast<int>(spec.positives.size());
  for (int attempt = 0;; ++attempt) {
    const std::vector<VariationSlot> slots = spec.slots();
    VariationPass pass = VariationPass::run(encoder, generator, navigator, slots, mode);
    if (pass.degenerate_slots().empty()) {
      const Mat& v = pass.vectors();
      batch.queries = v.leftCols(b);
      batch.positives = v.middleCols(b, n);
      batch.negatives = v.rightCols(v.cols() - b - n);
      batch.pass = std::move(pass);
      break;
    }
    if (attempt + 1 >= kResampleAttempts)
      throw BatchError("degenerate variations persisted after " +
                       std::to_string(kResampleAttempts) + " resampling rounds");
    for (int slot : pass.degenerate_slots()) {
      ++batch.resampled;
      LatentCode z = generator.sample_latent(1, rng).front();
      const double eps = uniform(rng, -eps_bar, eps_bar);
      const auto s = static_cast<std::size_t>(slot);
      if (slot < b) {
        spec.queries[s] = std::move(z);
        spec.query_shifts[s] = eps;
      } else if (slot < b + n) {
        spec.positives[s - b] = std::move(z);
        spec.positive_shifts[s - b] = eps;
      } else {
        spec.negatives[s - b - n] = std::move(z);
        spec.negative_shifts[s - b - n] = eps;
      }
    }
  }
  batch.spec = std::move(spec);
  return batch;
}

}  // namespace disco
