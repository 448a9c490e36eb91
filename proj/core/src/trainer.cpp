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

#include "disco/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace disco {

namespace fs = std::filesystem;

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kMomentum = 0.9;

const char* const kCheckpointFormat = "disco-checkpoint";
constexpr int kCheckpointVersion = 1;

std::vector<Optimizer::Param> collect_params(TrainState& state,
                                             const Navigator::Gradients& nav_grads,
                                             const nn::Gradients& enc_grads,
                                             const nn::Gradients* cls_grads) {
  std::vector<Optimizer::Param> params;
  auto nav = state.navigator.parameters();
  const auto nav_names = state.navigator.parameter_names();
  for (std::size_t i = 0; i < nav.size(); ++i)
    params.push_back({"nav." + nav_names[i], nav[i], &nav_grads.values[i]});
  auto enc = state.encoder.network().parameters();
  for (std::size_t i = 0; i < enc.size(); ++i)
    params.push_back({"enc.p" + std::to_string(i), enc[i], &enc_grads[i]});
  if (cls_grads != nullptr) {
    auto cls = state.classifier->parameters();
    for (std::size_t i = 0; i < cls.size(); ++i)
      params.push_back({"cls.p" + std::to_string(i), cls[i], &(*cls_grads)[i]});
  }
  return params;
}

void check_finite(double value, const BatchSpec& spec, long long step) {
  if (std::isfinite(value)) return;
  nlohmann::json dump = {{"step", step}, {"batch", spec.to_json()}};
  throw TrainingError("non-finite loss at step " + std::to_string(step),
                      dump.dump(2));
}

Mat stack_grads(const LossValue& g) {
  Mat out(g.grad_queries.rows(),
          g.grad_queries.cols() + g.grad_positives.cols() + g.grad_negatives.cols());
  out << g.grad_queries, g.grad_positives, g.grad_negatives;
  return out;
}

ContrastBatch draw_and_realize(TrainState& state, const Generator& generator) {
  BatchSpec spec = draw_spec(state.rng, generator, state.config.sampler);
  return realize_batch(std::move(spec), state.encoder, generator, state.navigator,
                       state.rng, state.config.sampler.eps_bar,
                       variation_mode(state.config.ablation));
}

void finish_step(TrainState& state, Navigator::Gradients& nav_grads,
                 nn::Gradients& enc_grads, nn::Gradients* cls_grads) {
  state.optimizer.step(collect_params(state, nav_grads, enc_grads, cls_grads));
  if (state.navigator.is_linear()) project_constraints_in_place(state.navigator);
  ++state.step;
}

}  // namespace

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::sgd_momentum ? "sgd_momentum" : "adaptive_moment";
}

std::string to_string(AblationMode m) {
  switch (m) {
    case AblationMode::contrast_variation:
      return "contrast_variation";
    case AblationMode::contrast_concat:
      return "contrast_concat";
    case AblationMode::classify_variation:
      return "classify_variation";
    case AblationMode::classify_concat:
      return "classify_concat";
  }
  return "?";
}

OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "sgd_momentum") return OptimizerKind::sgd_momentum;
  if (s == "adaptive_moment") return OptimizerKind::adaptive_moment;
  throw ConfigError("unknown optimizer '" + s + "'");
}

AblationMode ablation_mode_from_string(const std::string& s) {
  if (s == "contrast_variation") return AblationMode::contrast_variation;
  if (s == "contrast_concat") return AblationMode::contrast_concat;
  if (s == "classify_variation") return AblationMode::classify_variation;
  if (s == "classify_concat") return AblationMode::classify_concat;
  throw ConfigError("unknown ablation mode '" + s + "'");
}

bool is_classification(AblationMode m) {
  return m == AblationMode::classify_variation || m == AblationMode::classify_concat;
}

VariationMode variation_mode(AblationMode m) {
  return (m == AblationMode::contrast_concat || m == AblationMode::classify_concat)
             ? VariationMode::concatenation
             : VariationMode::difference;
}

// ---------------------------------------------------------------------------

Optimizer::Optimizer(OptimizerKind kind, double learning_rate)
    : kind_(kind), learning_rate_(learning_rate) {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning rate must be finite and >= 0");
}

void Optimizer::step(const std::vector<Param>& params) {
  ++t_;
  const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (const Param& p : params) {
    Mat& m = first_[p.name];
    if (m.size() == 0) m = Mat::Zero(p.value->rows(), p.value->cols());
    if (kind_ == OptimizerKind::sgd_momentum) {
      m = kMomentum * m + *p.grad;
      *p.value -= learning_rate_ * m;
      continue;
    }
    Mat& v = second_[p.name];
    if (v.size() == 0) v = Mat::Zero(p.value->rows(), p.value->cols());
    m = kBeta1 * m + (1.0 - kBeta1) * *p.grad;
    v = kBeta2 * v + (1.0 - kBeta2) * p.grad->cwiseAbs2();
    *p.value -= (learning_rate_ * (m / bias1).array() /
                 ((v / bias2).array().sqrt() + kAdamEps))
                    .matrix();
  }
}

TensorMap Optimizer::state(const std::string& prefix) const {
  TensorMap out;
  for (const auto& [name, m] : first_) out[prefix + "m." + name] = m;
  for (const auto& [name, v] : second_) out[prefix + "v." + name] = v;
  return out;
}

void Optimizer::load_state(const TensorMap& tensors, const std::string& prefix,
                           long long iterations) {
  first_.clear();
  second_.clear();
  for (const auto& [name, value] : tensors) {
    if (name.rfind(prefix + "m.", 0) == 0) first_[name.substr(prefix.size() + 2)] = value;
    if (name.rfind(prefix + "v.", 0) == 0) second_[name.substr(prefix.size() + 2)] = value;
  }
  t_ = iterations;
}

// ---------------------------------------------------------------------------

TrainState init_train_state(const TrainConfig& config, const Generator& generator,
                            const EncoderSpec& encoder_spec,
                            NavigatorKind navigator_kind) {
  if (config.steps < 1) throw ConfigError("steps must be >= 1");
  if (!(config.learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  if (encoder_spec.input != generator.image_shape())
    throw ConfigError("encoder input shape does not match the generator");
  Rng rng(config.seed);
  Navigator nav = init_navigator(navigator_kind, config.sampler.directions,
                                 generator.latent_dim(), rng);
  Encoder enc(encoder_spec, rng);
  std::optional<nn::Network> classifier;
  if (is_classification(config.ablation)) {
    const int width = variation_mode(config.ablation) == VariationMode::concatenation
                          ? 2 * encoder_spec.output_dim
                          : encoder_spec.output_dim;
    classifier.emplace();
    classifier->add_dense(width, config.sampler.directions, true, rng);
  }
  return TrainState{config,
                    std::move(nav),
                    std::move(enc),
                    std::move(classifier),
                    Optimizer(config.optimizer, config.learning_rate),
                    std::move(rng),
                    0,
                    0};
}

StepOutcome train_step(TrainState& state, const Generator& generator) {
  if (is_classification(state.config.ablation))
    return classification_head_step(state, generator);

  const ContrastBatch batch = draw_and_realize(state, generator);
  LossValue grads;
  StepOutcome outcome;
  outcome.report = total_loss(batch, state.config.loss, &grads);
  outcome.resampled = batch.resampled;
  check_finite(outcome.report.total, batch.spec, state.step);

  auto enc_grads = state.encoder.network().zero_gradients();
  auto nav_grads = state.navigator.zero_gradients();
  batch.pass->backward(stack_grads(grads), &enc_grads, &nav_grads);
  finish_step(state, nav_grads, enc_grads, nullptr);
  state.resampled_total += batch.resampled;
  return outcome;
}

StepOutcome classification_head_step(TrainState& state, const Generator& generator) {
  if (!is_classification(state.config.ablation) || !state.classifier)
    throw ConfigError("classification step needs a classify_* ablation mode");

  const ContrastBatch batch = draw_and_realize(state, generator);
  const Mat& vectors = batch.pass->vectors();
  const Eigen::Index count = vectors.cols();
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < batch.spec.queries.size() + batch.spec.positives.size(); ++i)
    labels.push_back(batch.spec.direction);
  for (int d : batch.spec.negative_directions) labels.push_back(d);

  // Softmax cross-entropy averaged over every slot.
  const nn::Network::Tape tape = state.classifier->forward_tape(vectors);
  const Mat& logits = tape.values.back();
  Mat grad_logits(logits.rows(), count);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    const double m = logits.col(i).maxCoeff();
    const Vec e = (logits.col(i).array() - m).exp();
    const double s = e.sum();
    const int y = labels[static_cast<std::size_t>(i)];
    loss -= (logits(y, i) - m - std::log(s));
    grad_logits.col(i) = e / s;
    grad_logits(y, i) -= 1.0;
  }
  loss /= static_cast<double>(count);
  grad_logits /= static_cast<double>(count);

  StepOutcome outcome;
  outcome.report.contrastive_part = loss;
  outcome.report.domination_part = 0.0;
  outcome.report.total = loss;
  outcome.resampled = batch.resampled;
  check_finite(loss, batch.spec, state.step);

  auto cls_grads = state.classifier->zero_gradients();
  const Mat grad_vectors = state.classifier->backward(tape, grad_logits, &cls_grads);
  auto enc_grads = state.encoder.network().zero_gradients();
  auto nav_grads = state.navigator.zero_gradients();
  batch.pass->backward(grad_vectors, &enc_grads, &nav_grads);
  finish_step(state, nav_grads, enc_grads, &cls_grads);
  state.resampled_total += batch.resampled;
  return outcome;
}

std::uint64_t parameter_hash(const TrainState& state) {
  std::uint64_t h = fnv1a("disco", 5);
  for (const Mat* p : state.navigator.parameters()) h = hash_matrix(*p, h);
  for (const Mat* p : state.encoder.network().parameters()) h = hash_matrix(*p, h);
  if (state.classifier)
    for (const Mat* p : state.classifier->parameters()) h = hash_matrix(*p, h);
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------

void save_checkpoint(const fs::path& dir, const TrainState& state,
                     const nlohmann::json& config_snapshot) {
  fs::create_directories(dir);
  TensorMap tensors = state.navigator.tensors("nav.");
  tensors.merge(state.encoder.tensors("enc."));
  if (state.classifier) {
    const auto params = state.classifier->parameters();
    for (std::size_t i = 0; i < params.size(); ++i)
      tensors["cls.p" + std::to_string(i)] = *params[i];
  }
  tensors.merge(state.optimizer.state("opt."));

  std::ostringstream rng_state;
  rng_state << state.rng;

  nlohmann::json manifest;
  manifest["format"] = kCheckpointFormat;
  manifest["version"] = kCheckpointVersion;
  manifest["step"] = state.step;
  manifest["resampled_total"] = state.resampled_total;
  manifest["config"] = config_snapshot;
  manifest["rng_state"] = rng_state.str();
  manifest["optimizer"] = {{"kind", to_string(state.optimizer.kind())},
                           {"iterations", state.optimizer.iterations()}};
  manifest["parameter_hash"] = hex(parameter_hash(state));
  manifest["tensors"] = write_tensors(dir, tensors);

  // Write-then-rename so a reader never sees a half-written manifest.
  const fs::path tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << manifest.dump(2) << "\n";
  }
  fs::rename(tmp, dir / "manifest.json");
}

namespace {

nlohmann::json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no checkpoint manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("corrupt checkpoint manifest: " + std::string(ex.what()));
  }
  if (!manifest.is_object() || manifest.value("format", "") != kCheckpointFormat)
    throw IoError("not a checkpoint manifest: " + (dir / "manifest.json").string());
  if (manifest.value("version", 0) != kCheckpointVersion)
    throw IoError("unsupported checkpoint version");
  return manifest;
}

}  // namespace

CheckpointMeta read_checkpoint_meta(const fs::path& dir) {
  const nlohmann::json manifest = read_manifest(dir);
  try {
    return {manifest.at("config"), manifest.at("step").get<long long>()};
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("corrupt checkpoint manifest: " + std::string(ex.what()));
  }
}

void load_checkpoint_into(const fs::path& dir, TrainState& state) {
  const nlohmann::json manifest = read_manifest(dir);
  try {
    const TensorMap tensors = read_tensors(dir, manifest.at("tensors"));
    state.navigator.load_tensors(tensors, "nav.");
    state.encoder.load_tensors(tensors, "enc.");
    if (state.classifier) {
      auto params = state.classifier->parameters();
      for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string name = "cls.p" + std::to_string(i);
        auto it = tensors.find(name);
        if (it == tensors.end()) throw IoError("missing tensor " + name);
        *params[i] = it->second;
      }
    }
    state.optimizer.load_state(tensors, "opt.",
                               manifest.at("optimizer").at("iterations").get<long long>());
    std::istringstream rng_state(manifest.at("rng_state").get<std::string>());
    rng_state >> state.rng;
    if (!rng_state) throw IoError("corrupt rng state in checkpoint");
    state.step = manifest.at("step").get<long long>();
    state.resampled_total = manifest.value("resampled_total", 0LL);
    if (manifest.contains("parameter_hash") &&
        manifest.at("parameter_hash").get<std::string>() != hex(parameter_hash(state)))
      throw IoError("checkpoint parameter hash mismatch");
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("corrupt checkpoint manifest: " + std::string(ex.what()));
  }
}

void fit(TrainState& state, const Generator& generator, const FitOptions& options) {
  std::ofstream log;
  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    log.open(options.out_dir / "train_log.jsonl",
             state.step == 0 ? std::ios::trunc : std::ios::app);
    if (!log) throw IoError("cannot open training log");
  }
  const std::uint64_t generator_hash = generator.parameter_hash();
  while (state.step < state.config.steps) {
    const StepOutcome outcome = train_step(state, generator);
    if (log.is_open()) {
      nlohmann::json line = outcome.report.to_json();
      line["step"] = state.step;
      line["resampled"] = outcome.resampled;
      log << line.dump() << "\n";
    }
    if (options.on_step) options.on_step(state.step, outcome);
    if (!options.out_dir.empty() && options.checkpoint_every > 0 &&
        state.step % options.checkpoint_every == 0 && state.step < state.config.steps)
      save_checkpoint(options.out_dir, state, options.config_snapshot);
  }
  if (generator.parameter_hash() != generator_hash)
    throw Error("generator parameters changed during training");
  if (!options.out_dir.empty())
    save_checkpoint(options.out_dir, state, options.config_snapshot);
}

}  // namespace disco
