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

#include "disco/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace disco {

namespace fs = std::filesystem;

namespace {

// Reads typed keys out of one JSON object and rejects whatever is left.
class Section {
 public:
  Section(const nlohmann::json& doc, std::string path) : path_(std::move(path)) {
    if (doc.is_null()) {
      obj_ = nlohmann::json::object();
    } else if (!doc.is_object()) {
      throw ConfigError(path_ + ": expected an object");
    } else {
      obj_ = doc;
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  template <typename Enum, typename Parse>
  void read_enum(const std::string& key, Enum& out, Parse parse) {
    std::string s;
    read(key, s);
    if (!has(key)) return;
    try {
      out = parse(s);
    } catch (const ConfigError& ex) {
      throw ConfigError(path_ + "." + key + ": " + ex.what());
    }
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
  }

  const std::string& path() const { return path_; }

 private:
  nlohmann::json obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

nlohmann::json section_of(const nlohmann::json& doc, const char* name) {
  return doc.contains(name) ? doc.at(name) : nlohmann::json();
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig cfg;
  {
    static const std::set<std::string> kSections = {
        "backend", "navigator", "encoder", "sampler", "loss", "trainer", "eval"};
    for (const auto& [key, value] : doc.items())
      if (!kSections.count(key)) throw ConfigError("config: unknown section '" + key + "'");
  }

  // backend
  {
    Section s(section_of(doc, "backend"), "backend");
    BackendConfig& b = cfg.backend;
    s.read_enum("kind", b.kind, generator_kind_from_string);
    s.read("factors", b.factors);
    s.read("mixing_seed", b.mixing_seed);
    s.read("entangle", b.entangle);
    s.read_enum("prior", b.prior, latent_prior_from_string);
    std::vector<int> shape{b.image_shape.height, b.image_shape.width,
                           b.image_shape.channels};
    s.read("image_shape", shape);
    require(shape.size() == 3, "backend.image_shape: expected [height, width, channels]");
    b.image_shape = {shape[0], shape[1], shape[2]};
    s.read("checkpoint", b.checkpoint);
    if (s.has("latent_space_tag")) {
      LatentSpace tag = LatentSpace::Z;
      s.read_enum("latent_space_tag", tag, latent_space_from_string);
      b.latent_space_tag = tag;
    }
    s.finish();
    if (b.kind == GeneratorKind::external_adapter) {
      require(!b.checkpoint.empty(), "backend.checkpoint: required for external_adapter");
    } else {
      require(b.factors >= 2 && b.factors <= 8, "backend.factors: must be in [2, 8]");
      require(b.image_shape.height > 0 && b.image_shape.width > 0 &&
                  b.image_shape.channels > 0,
              "backend.image_shape: entries must be positive");
      if (b.kind == GeneratorKind::oracle_shapes) b.image_shape = {64, 64, 3};
      if (b.latent_space_tag)
        require(*b.latent_space_tag == LatentSpace::Z,
                "backend.latent_space_tag: oracles live in Z");
      b.latent_space_tag = LatentSpace::Z;
    }
  }
  const bool external = cfg.backend.kind == GeneratorKind::external_adapter;

  // navigator
  {
    Section s(section_of(doc, "navigator"), "navigator");
    s.read_enum("kind", cfg.navigator.kind, navigator_kind_from_string);
    s.read("directions", cfg.navigator.directions);
    s.finish();
    if (cfg.navigator.directions == 0)
      cfg.navigator.directions = external ? 64 : 2 * cfg.backend.factors;
    require(cfg.navigator.directions >= 2, "navigator.directions: must be >= 2");
  }

  // encoder
  {
    Section s(section_of(doc, "encoder"), "encoder");
    s.read_enum("preset", cfg.encoder.preset, encoder_preset_from_string);
    s.read("output_dim", cfg.encoder.output_dim);
    s.read("hidden", cfg.encoder.hidden);
    s.read("conv_widths", cfg.encoder.conv_widths);
    s.read("bias", cfg.encoder.bias);
    s.finish();
    if (cfg.encoder.output_dim == 0) cfg.encoder.output_dim = cfg.navigator.directions;
    require(cfg.encoder.output_dim >= 2, "encoder.output_dim: must be >= 2");
    require(cfg.encoder.hidden >= 1, "encoder.hidden: must be >= 1");
    require(!cfg.encoder.conv_widths.empty(), "encoder.conv_widths: must not be empty");
    for (int w : cfg.encoder.conv_widths) require(w >= 1, "encoder.conv_widths: must be >= 1");
  }

  // sampler
  SamplerConfig& sampler = cfg.trainer.sampler;
  {
    Section s(section_of(doc, "sampler"), "sampler");
    s.read("queries", sampler.queries);
    s.read("positives", sampler.positives);
    s.read("negatives", sampler.negatives);
    double max_shift = 0.0;
    s.read("max_shift", max_shift);
    s.finish();
    sampler.directions = cfg.navigator.directions;
    if (max_shift == 0.0) {
      const bool z_external =
          external && cfg.backend.latent_space_tag.value_or(LatentSpace::Z) == LatentSpace::Z;
      max_shift = z_external ? 6.0 : 3.0;
    }
    sampler.eps_bar = max_shift;
    require(sampler.queries >= 1 && sampler.positives >= 1 && sampler.negatives >= 1,
            "sampler: queries, positives and negatives must be >= 1");
    require(sampler.eps_bar > 0.0 && std::isfinite(sampler.eps_bar),
            "sampler.max_shift: must be > 0");
  }

  // loss
  LossConfig& loss = cfg.trainer.loss;
  {
    Section s(section_of(doc, "loss"), "loss");
    s.read_enum("variant", loss.variant, contrast_variant_from_string);
    s.read("temperature", loss.temperature);
    s.read("domination_weight", loss.domination_weight);
    s.read("flipping_enabled", loss.flipping_enabled);
    const bool explicit_threshold = s.has("flip_threshold");
    s.read("flip_threshold", loss.flip_threshold);
    s.finish();
    require(loss.temperature > 0.0, "loss.temperature: must be > 0");
    require(loss.domination_weight >= 0.0, "loss.domination_weight: must be >= 0");
    if (!explicit_threshold) loss.flip_threshold = 0.9 / loss.temperature;
  }

  // trainer
  {
    Section s(section_of(doc, "trainer"), "trainer");
    TrainConfig& t = cfg.trainer;
    s.read("steps", t.steps);
    s.read("learning_rate", t.learning_rate);
    s.read_enum("optimizer", t.optimizer, optimizer_kind_from_string);
    s.read("seed", t.seed);
    s.read_enum("ablation_mode", t.ablation, ablation_mode_from_string);
    s.read("checkpoint_every", t.checkpoint_every);
    s.finish();
    require(t.steps >= 1, "trainer.steps: must be >= 1");
    require(t.learning_rate >= 0.0 && std::isfinite(t.learning_rate),
            "trainer.learning_rate: must be finite and >= 0");
    require(t.checkpoint_every >= 0, "trainer.checkpoint_every: must be >= 0");
  }

  // eval
  {
    Section s(section_of(doc, "eval"), "eval");
    EvalConfig& e = cfg.eval;
    s.read("metrics", e.metrics);
    s.read("bins", e.bins);
    s.read("samples", e.samples);
    s.read("seed", e.seed);
    s.read("forest_trees", e.forest_trees);
    s.read("forest_depth", e.forest_depth);
    s.read("factors_csv", e.factors_csv);
    s.read("image_list", e.image_list);
    s.finish();
    for (const std::string& m : e.metrics)
      require(m == "mig" || m == "dci", "eval.metrics: unknown metric '" + m + "'");
    require(e.bins >= 2, "eval.bins: must be >= 2");
    require(e.samples >= 2, "eval.samples: must be >= 2");
    require(e.forest_trees >= 1 && e.forest_depth >= 1,
            "eval: forest_trees and forest_depth must be >= 1");
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(path.string() + ": " + ex.what());
  }
  return parse_run_config(doc);
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json backend = {
      {"kind", to_string(c.backend.kind)},
      {"factors", c.backend.factors},
      {"mixing_seed", c.backend.mixing_seed},
      {"entangle", c.backend.entangle},
      {"prior", to_string(c.backend.prior)},
      {"image_shape",
       {c.backend.image_shape.height, c.backend.image_shape.width,
        c.backend.image_shape.channels}},
      {"checkpoint", c.backend.checkpoint}};
  if (c.backend.latent_space_tag)
    backend["latent_space_tag"] = to_string(*c.backend.latent_space_tag);
  const TrainConfig& t = c.trainer;
  return {
      {"backend", backend},
      {"navigator",
       {{"kind", to_string(c.navigator.kind)}, {"directions", c.navigator.directions}}},
      {"encoder",
       {{"preset", to_string(c.encoder.preset)},
        {"output_dim", c.encoder.output_dim},
        {"hidden", c.encoder.hidden},
        {"conv_widths", c.encoder.conv_widths},
        {"bias", c.encoder.bias}}},
      {"sampler",
       {{"queries", t.sampler.queries},
        {"positives", t.sampler.positives},
        {"negatives", t.sampler.negatives},
        {"max_shift", t.sampler.eps_bar}}},
      {"loss",
       {{"variant", to_string(t.loss.variant)},
        {"temperature", t.loss.temperature},
        {"domination_weight", t.loss.domination_weight},
        {"flip_threshold", t.loss.flip_threshold},
        {"flipping_enabled", t.loss.flipping_enabled}}},
      {"trainer",
       {{"steps", t.steps},
        {"learning_rate", t.learning_rate},
        {"optimizer", to_string(t.optimizer)},
        {"seed", t.seed},
        {"ablation_mode", to_string(t.ablation)},
        {"checkpoint_every", t.checkpoint_every}}},
      {"eval",
       {{"metrics", c.eval.metrics},
        {"bins", c.eval.bins},
        {"samples", c.eval.samples},
        {"seed", c.eval.seed},
        {"forest_trees", c.eval.forest_trees},
        {"forest_depth", c.eval.forest_depth},
        {"factors_csv", c.eval.factors_csv},
        {"image_list", c.eval.image_list}}}};
}

GeneratorHandle make_generator(const RunConfig& config) {
  const BackendConfig& b = config.backend;
  if (b.kind == GeneratorKind::external_adapter) {
    GeneratorHandle g = load_external_generator(b.checkpoint);
    if (b.latent_space_tag && *b.latent_space_tag != g->latent_space())
      throw ConfigError("backend.latent_space_tag is " + to_string(*b.latent_space_tag) +
                        " but the checkpoint declares " + to_string(g->latent_space()));
    return g;
  }
  OracleOptions options;
  options.prior = b.prior;
  options.linear_shape = b.image_shape;
  return make_oracle_generator(b.factors, b.kind, b.mixing_seed, b.entangle, options);
}

EncoderSpec make_encoder_spec(const RunConfig& config, const Generator& generator) {
  EncoderSpec spec;
  spec.preset = config.encoder.preset;
  spec.output_dim = config.encoder.output_dim;
  spec.input = generator.image_shape();
  spec.bias = config.encoder.bias;
  spec.hidden = config.encoder.hidden;
  spec.conv_widths = config.encoder.conv_widths;
  return spec;
}

TrainState make_train_state(const RunConfig& config, const Generator& generator) {
  return init_train_state(config.trainer, generator, make_encoder_spec(config, generator),
                          config.navigator.kind);
}

}  // namespace disco
