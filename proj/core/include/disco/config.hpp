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

// Run configuration: one JSON document with sections backend, navigator,
// encoder, sampler, loss, trainer and eval. Unknown keys are rejected and
// every default is written back by to_json so a checkpoint's snapshot never
// depends on the defaults of the tool that reads it.

#ifndef DISCO_CONFIG_HPP_
#define DISCO_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disco/contrastor.hpp"
#include "disco/gen_backend.hpp"
#include "disco/losses.hpp"
#include "disco/navigator.hpp"
#include "disco/sampler.hpp"
#include "disco/trainer.hpp"

namespace disco {

struct BackendConfig {
  GeneratorKind kind = GeneratorKind::oracle_linear;
  // Oracle kinds.
  int factors = 4;
  std::uint64_t mixing_seed = 13;
  bool entangle = true;
  LatentPrior prior = LatentPrior::factor_uniform;
  ImageShape image_shape{16, 16, 1};
  // external_adapter.
  std::string checkpoint;
  std::optional<LatentSpace> latent_space_tag;
};

struct NavigatorConfig {
  NavigatorKind kind = NavigatorKind::unit_columns;
  int directions = 0;  // 0: 2K for oracles, 64 for external generators
};

struct EncoderConfig {
  EncoderPreset preset = EncoderPreset::conv4;
  int output_dim = 0;  // 0: same as the number of directions
  int hidden = 64;
  std::vector<int> conv_widths{32, 64, 128, 256};
  bool bias = true;
};

struct EvalConfig {
  std::vector<std::string> metrics{"mig", "dci"};
  int bins = 20;
  int samples = 10000;
  std::uint64_t seed = 0;
  int forest_trees = 10;
  int forest_depth = 8;
  // External datasets: CSV with factor_0..factor_{K-1} and a list of image
  // files, one per CSV row.
  std::string factors_csv;
  std::string image_list;
};

struct RunConfig {
  BackendConfig backend;
  NavigatorConfig navigator;
  EncoderConfig encoder;
  TrainConfig trainer;  // includes sampler and loss sections
  EvalConfig eval;
};

// Throws ConfigError with a path-qualified message on any schema violation.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

GeneratorHandle make_generator(const RunConfig& config);
EncoderSpec make_encoder_spec(const RunConfig& config, const Generator& generator);
TrainState make_train_state(const RunConfig& config, const Generator& generator);

}  // namespace disco

#endif  // DISCO_CONFIG_HPP_
