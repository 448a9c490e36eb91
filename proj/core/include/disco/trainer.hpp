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

// Joint optimization of the navigator and the encoder against the full
// objective. The generator is only ever read.

#ifndef DISCO_TRAINER_HPP_
#define DISCO_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disco/common.hpp"
#include "disco/contrastor.hpp"
#include "disco/gen_backend.hpp"
#include "disco/losses.hpp"
#include "disco/navigator.hpp"
#include "disco/nn.hpp"
#include "disco/sampler.hpp"
#include "disco/tensor_io.hpp"

namespace disco {

enum class OptimizerKind { sgd_momentum, adaptive_moment };
enum class AblationMode {
  contrast_variation,
  contrast_concat,
  classify_variation,
  classify_concat
};

std::string to_string(OptimizerKind k);
std::string to_string(AblationMode m);
OptimizerKind optimizer_kind_from_string(const std::string& s);
AblationMode ablation_mode_from_string(const std::string& s);

bool is_classification(AblationMode m);
VariationMode variation_mode(AblationMode m);

struct TrainConfig {
  int steps = 3000;
  double learning_rate = 1e-4;
  OptimizerKind optimizer = OptimizerKind::adaptive_moment;
  std::uint64_t seed = 0;
  SamplerConfig sampler;
  LossConfig loss;
  AblationMode ablation = AblationMode::contrast_variation;
  int checkpoint_every = 0;  // 0: final checkpoint only
};

// Named-parameter optimizer. Moments are keyed by parameter name so the
// state can be checkpointed.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate);

  struct Param {
    std::string name;
    Mat* value;
    const Mat* grad;
  };

  void step(const std::vector<Param>& params);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return learning_rate_; }
  long long iterations() const { return t_; }

  TensorMap state(const std::string& prefix) const;
  void load_state(const TensorMap& tensors, const std::string& prefix,
                  long long iterations);

 private:
  OptimizerKind kind_;
  double learning_rate_;
  long long t_ = 0;
  std::map<std::string, Mat> first_;
  std::map<std::string, Mat> second_;
};

struct TrainState {
  TrainConfig config;
  Navigator navigator;
  Encoder encoder;
  std::optional<nn::Network> classifier;  // classify_* modes only
  Optimizer optimizer;
  Rng rng;
  long long step = 0;
  long long resampled_total = 0;
};

// Builds the initial state. Parameter initialization draws from an engine
// seeded with config.seed; the returned state's rng continues from there.
TrainState init_train_state(const TrainConfig& config, const Generator& generator,
                            const EncoderSpec& encoder_spec,
                            NavigatorKind navigator_kind);

struct StepOutcome {
  LossReport report;
  int resampled = 0;
};

// One sampled batch, one loss, one update of navigator and encoder (and the
// classifier head in classify modes), followed by the navigator constraint
// projection. Dispatches to classification_head_step for classify modes.
// Throws TrainingError on a non-finite loss.
StepOutcome train_step(TrainState& state, const Generator& generator);
StepOutcome classification_head_step(TrainState& state, const Generator& generator);

// Fingerprint of navigator, encoder and classifier parameters.
std::uint64_t parameter_hash(const TrainState& state);
std::string hex(std::uint64_t v);

// ---------------------------------------------------------------------------
// Checkpoints: DIR/manifest.json plus one float64 file per named tensor.

struct CheckpointMeta {
  nlohmann::json config;  // the full run configuration snapshot
  long long step = 0;
};

void save_checkpoint(const std::filesystem::path& dir, const TrainState& state,
                     const nlohmann::json& config_snapshot);

// Reads tensors and counters into a state whose shapes already match
// (constructed from the same configuration).
CheckpointMeta read_checkpoint_meta(const std::filesystem::path& dir);
void load_checkpoint_into(const std::filesystem::path& dir, TrainState& state);

struct FitOptions {
  std::filesystem::path out_dir;  // empty: no files written
  int checkpoint_every = 0;       // 0: final checkpoint only
  nlohmann::json config_snapshot;
  std::function<void(long long step, const StepOutcome&)> on_step;
};

// Runs train_step until state.step == config.steps, appending one JSON line
// per step to out_dir/train_log.jsonl when out_dir is set.
void fit(TrainState& state, const Generator& generator, const FitOptions& options);

}  // namespace disco

#endif  // DISCO_TRAINER_HPP_
