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


#include <benchmark/benchmark.h>

#include "disco/trainer.hpp"

namespace disco {
namespace {

void run_steps(benchmark::State& state, GeneratorKind kind, EncoderPreset preset) {
  const auto gen = make_oracle_generator(4, kind, 13, true);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.sampler = {8, 16, 16, 32, 0.5};
  EncoderSpec spec;
  spec.preset = preset;
  spec.input = gen->image_shape();
  spec.output_dim = 8;
  TrainState ts = init_train_state(cfg, *gen, spec, NavigatorKind::unit_columns);
  for (auto _ : state) benchmark::DoNotOptimize(train_step(ts, *gen).report.total);
}

void BM_TrainStepLinear(benchmark::State& state) {
  run_steps(state, GeneratorKind::oracle_linear, EncoderPreset::linear);
}
BENCHMARK(BM_TrainStepLinear)->Unit(benchmark::kMillisecond);

void BM_TrainStepMlp(benchmark::State& state) {
  run_steps(state, GeneratorKind::oracle_linear, EncoderPreset::mlp);
}
BENCHMARK(BM_TrainStepMlp)->Unit(benchmark::kMillisecond);

void BM_TrainStepShapesConv(benchmark::State& state) {
  run_steps(state, GeneratorKind::oracle_shapes, EncoderPreset::conv4);
}
BENCHMARK(BM_TrainStepShapesConv)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace
}  // namespace disco
