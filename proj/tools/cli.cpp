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


#include "cli.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "disco/config.hpp"
#include "disco/evaluation.hpp"
#include "disco/evalviz.hpp"
#include "disco/trainer.hpp"

namespace disco::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string checkpoint;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string metrics;
  int direction = 0;
  std::string steps;
  std::optional<int> factor;
  std::string factors = "0,1,2";
  std::string seeds = "0,1,2,3,4";
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream cell(item);
    T v{};
    if (!(cell >> v) || !(cell >> std::ws).eof())
      throw ConfigError(std::string(flag) + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(std::string(flag) + ": empty list");
  return out;
}

// Writes `text` to `path` through a temporary file so readers never see a
// partial file.
void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path require_out(const Options& o) {
  if (o.out.empty()) throw ConfigError("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

// Everything a post-training command needs from a checkpoint.
struct Loaded {
  RunConfig config;
  GeneratorHandle generator;
  TrainState state;
};

Loaded load(const Options& o) {
  if (o.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  const CheckpointMeta meta = read_checkpoint_meta(o.checkpoint);
  RunConfig config = parse_run_config(meta.config);
  GeneratorHandle gen = make_generator(config);
  TrainState state = make_train_state(config, *gen);
  load_checkpoint_into(o.checkpoint, state);
  return {std::move(config), std::move(gen), std::move(state)};
}

RunConfig load_config(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  RunConfig cfg = load_run_config(o.config);
  if (o.seed) cfg.trainer.seed = *o.seed;
  return cfg;
}

std::uint64_t train_into(const RunConfig& cfg, const fs::path& dir) {
  GeneratorHandle gen = make_generator(cfg);
  TrainState state = make_train_state(cfg, *gen);
  FitOptions fo;
  fo.out_dir = dir;
  fo.checkpoint_every = cfg.trainer.checkpoint_every;
  fo.config_snapshot = to_json(cfg);
  fit(state, *gen, fo);
  return parameter_hash(state);
}

nlohmann::json evaluate(const Loaded& l, const std::vector<std::string>& metrics,
                        std::optional<std::uint64_t> seed) {
  RunConfig cfg = l.config;
  if (seed) cfg.eval.seed = *seed;
  const EvaluationSamples samples = collect_samples(cfg, l.state.encoder, *l.generator);
  return metric_report(samples, metrics, cfg.eval, to_json(cfg));
}

std::vector<std::string> metric_list(const Options& o, const RunConfig& cfg) {
  if (o.metrics.empty()) return cfg.eval.metrics;
  std::vector<std::string> out = parse_list<std::string>(o.metrics, "--metrics");
  for (const std::string& m : out)
    if (m != "mig" && m != "dci") throw ConfigError("--metrics: unknown metric '" + m + "'");
  return out;
}

int cmd_train(const Options& o, std::ostream& out) {
  const RunConfig cfg = load_config(o);
  const fs::path dir = require_out(o);
  const std::uint64_t hash = train_into(cfg, dir);
  out << "trained " << cfg.trainer.steps << " steps; parameter_hash " << hex(hash)
      << "; checkpoint " << dir.string() << "\n";
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  const nlohmann::json report = evaluate(l, metric_list(o, l.config), o.seed);
  const std::string text = report.dump(2) + "\n";
  if (!o.out.empty()) write_atomic(fs::path(o.out) / "metrics.json", text);
  out << text;
  return kExitOk;
}

int cmd_traverse(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  const fs::path dir = require_out(o);
  std::vector<double> steps;
  if (o.steps.empty()) {
    const double e = l.config.trainer.sampler.eps_bar;
    for (int i = 0; i < 7; ++i) steps.push_back(-e + i * e / 3.0);
  } else {
    steps = parse_list<double>(o.steps, "--steps");
  }
  Rng rng(o.seed.value_or(l.config.eval.seed));
  const std::vector<LatentCode> rows = l.generator->sample_latent(4, rng);
  const fs::path file = dir / ("traverse_d" + std::to_string(o.direction) + ".png");
  traversal_grid(*l.generator, l.state.navigator, rows, o.direction, steps, file);
  out << file.string() << "\n";
  return kExitOk;
}

int cmd_simmatrix(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  const fs::path dir = require_out(o);
  const Mat sim = direction_similarity_matrix(l.state.encoder, *l.generator, l.state.navigator,
                                              32, l.config.trainer.sampler.eps_bar,
                                              o.seed.value_or(l.config.eval.seed));
  write_similarity_csv(dir / "similarity.csv", sim);
  write_png(dir / "similarity.png", similarity_heatmap(sim));
  out << (dir / "similarity.csv").string() << "\n" << (dir / "similarity.png").string() << "\n";
  return kExitOk;
}

int cmd_profile(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  const fs::path dir = require_out(o);
  std::vector<int> factors;
  if (o.factor) {
    factors.push_back(*o.factor);
  } else {
    for (int k = 0; k < l.generator->factor_count(); ++k) factors.push_back(k);
  }
  if (factors.empty()) throw ConfigError("profile needs an oracle generator");
  for (int k : factors) {
    const Mat p = variation_response_profile(l.state.encoder, *l.generator, k, 21);
    const fs::path file = dir / ("profile_factor" + std::to_string(k) + ".csv");
    write_profile_csv(file, p);
    out << file.string() << "\n";
  }
  return kExitOk;
}

int cmd_scatter(const Options& o, std::ostream& out) {
  const Loaded l = load(o);
  const fs::path dir = require_out(o);
  const std::vector<int> list = parse_list<int>(o.factors, "--factors");
  if (list.size() != 3) throw ConfigError("--factors needs exactly three indices");
  if (l.generator->factor_count() < 3)
    throw ConfigError("latent scatter needs a generator with at least 3 factors");
  const std::array<int, 3> factors{list[0], list[1], list[2]};
  RunConfig cfg = l.config;
  if (o.seed) cfg.eval.seed = *o.seed;
  const EvaluationSamples s = collect_samples(cfg, l.state.encoder, *l.generator);
  const MigResult mi = mig_detailed(s.codes, s.factors, cfg.eval.bins);
  const std::array<int, 3> dims = scatter_dimensions(mi.mutual_information, factors);
  const Mat points = latent_scatter(l.state.encoder, *l.generator, factors, dims);
  const fs::path file = dir / "scatter.csv";
  write_scatter_csv(file, points, factors, dims);
  out << file.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const RunConfig base = load_config(o);
  const fs::path dir = require_out(o);
  const std::vector<std::uint64_t> seeds = parse_list<std::uint64_t>(o.seeds, "--seeds");
  const std::vector<std::string> metrics = metric_list(o, base);

  std::ostringstream rows;
  rows << "seed";
  for (const std::string& m : metrics) rows << "," << m;
  rows << ",parameter_hash\n";
  std::map<std::string, std::vector<double>> values;
  for (std::uint64_t seed : seeds) {
    RunConfig cfg = base;
    cfg.trainer.seed = seed;
    const fs::path run_dir = dir / ("seed_" + std::to_string(seed));
    train_into(cfg, run_dir);
    Options eo;
    eo.checkpoint = run_dir.string();
    const Loaded l = load(eo);
    const nlohmann::json report = evaluate(l, metrics, std::nullopt);
    write_atomic(run_dir / "metrics.json", report.dump(2) + "\n");
    rows << seed;
    for (const std::string& m : metrics) {
      const double v = report.at(m).get<double>();
      values[m].push_back(v);
      rows << "," << nlohmann::json(v).dump();
    }
    rows << "," << hex(parameter_hash(l.state)) << "\n";
  }
  write_atomic(dir / "sweep.csv", rows.str());

  // Sample variance (n - 1 denominator); 0 for a single seed.
  std::ostringstream summary;
  summary << "metric,mean,variance,runs\n";
  for (const std::string& m : metrics) {
    const std::vector<double>& v = values[m];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
    summary << m << "," << nlohmann::json(mean).dump() << "," << nlohmann::json(var).dump()
            << "," << v.size() << "\n";
  }
  write_atomic(dir / "sweep_summary.csv", summary.str());
  out << rows.str() << summary.str();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contrastive discovery of disentangled latent directions", "disco"};
  app.require_subcommand(1);
  Options o;
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Override the seed"); };
  auto add_checkpoint = [&](CLI::App* c) {
    c->add_option("--checkpoint", o.checkpoint, "Checkpoint directory")->required();
  };

  CLI::App* train = app.add_subcommand("train", "Train navigator and encoder");
  train->add_option("--config", o.config, "Run configuration (JSON)")->required();
  train->add_option("--out", o.out, "Checkpoint directory")->required();
  add_seed(train);

  CLI::App* eval = app.add_subcommand("eval", "Compute disentanglement metrics");
  add_checkpoint(eval);
  eval->add_option("--out", o.out, "Directory for metrics.json");
  eval->add_option("--metrics", o.metrics, "Comma-separated subset of mig,dci");
  add_seed(eval);

  CLI::App* traverse = app.add_subcommand("traverse", "Write a latent traversal grid");
  add_checkpoint(traverse);
  traverse->add_option("--out", o.out, "Output directory")->required();
  traverse->add_option("--direction", o.direction, "Direction index (0-based)");
  traverse->add_option("--steps", o.steps, "Comma-separated shift values");
  add_seed(traverse);

  CLI::App* sim = app.add_subcommand("simmatrix", "Write the direction similarity matrix");
  add_checkpoint(sim);
  sim->add_option("--out", o.out, "Output directory")->required();
  add_seed(sim);

  CLI::App* profile = app.add_subcommand("profile", "Write variation response profiles");
  add_checkpoint(profile);
  profile->add_option("--out", o.out, "Output directory")->required();
  profile->add_option("--factor", o.factor, "Factor index (default: all)");

  CLI::App* scatter = app.add_subcommand("scatter", "Export three code dimensions");
  add_checkpoint(scatter);
  scatter->add_option("--out", o.out, "Output directory")->required();
  scatter->add_option("--factors", o.factors, "Three comma-separated factor indices");
  add_seed(scatter);

  CLI::App* sweep = app.add_subcommand("sweep", "Train and evaluate over several seeds");
  sweep->add_option("--config", o.config, "Run configuration (JSON)")->required();
  sweep->add_option("--out", o.out, "Output directory")->required();
  sweep->add_option("--seeds", o.seeds, "Comma-separated seeds");
  sweep->add_option("--metrics", o.metrics, "Comma-separated subset of mig,dci");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (traverse->parsed()) return cmd_traverse(o, out);
    if (sim->parsed()) return cmd_simmatrix(o, out);
    if (profile->parsed()) return cmd_profile(o, out);
    if (scatter->parsed()) return cmd_scatter(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << "\n" << e.diagnostic() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace disco::cli
