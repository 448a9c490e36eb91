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


#include "disco/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "disco/png_io.hpp"

namespace disco {

namespace fs = std::filesystem;

namespace {

CodeMatrix encode_rows(const Encoder& encoder, const Mat& images) {
  CodeMatrix codes(images.cols(), encoder.output_dim());
  for (Eigen::Index start = 0; start < images.cols(); start += kEncodeChunk) {
    const Eigen::Index count = std::min<Eigen::Index>(kEncodeChunk, images.cols() - start);
    codes.middleRows(start, count) = encoder.encode(images.middleCols(start, count)).transpose();
  }
  return codes;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

EvaluationSamples collect_oracle_samples(const Encoder& encoder, const Generator& generator,
                                         int samples, std::uint64_t seed) {
  if (!generator.has_true_factors())
    throw MetricError("generator has no ground-truth factors; supply eval.factors_csv");
  if (samples < 2) throw ConfigError("evaluation needs at least two samples");
  Rng rng(seed);
  EvaluationSamples out;
  out.codes.resize(samples, encoder.output_dim());
  out.factors.resize(samples, generator.factor_count());
  for (int start = 0; start < samples; start += kEncodeChunk) {
    const int count = std::min(kEncodeChunk, samples - start);
    const std::vector<LatentCode> z = generator.sample_latent(count, rng);
    const Mat images = generator.generate(z);
    out.codes.middleRows(start, count) = encoder.encode(images).transpose();
    for (int i = 0; i < count; ++i)
      out.factors.row(start + i) = generator.true_factors(z[static_cast<std::size_t>(i)].values);
  }
  return out;
}

Mat read_factor_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty factor file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(trim(cell));
  }
  if (header.empty()) throw InputError(path.string() + ": empty header");
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] != "factor_" + std::to_string(k))
      throw InputError(path.string() + ": header column " + std::to_string(k) +
                       " must be factor_" + std::to_string(k));
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const std::string t = trim(cell);
        row.push_back(std::stod(t, &used));
        if (used != t.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": not a number");
      }
    }
    if (row.size() != header.size())
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(header.size()) + " values");
    rows.push_back(std::move(row));
  }
  Mat out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < header.size(); ++k)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return out;
}

std::vector<fs::path> read_image_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    fs::path p(t);
    if (p.is_relative()) p = path.parent_path() / p;
    out.push_back(p);
  }
  return out;
}

EvaluationSamples collect_dataset_samples(const Encoder& encoder, const fs::path& factors_csv,
                                          const fs::path& image_list) {
  EvaluationSamples out;
  out.factors = read_factor_csv(factors_csv);
  const std::vector<fs::path> files = read_image_list(image_list);
  if (static_cast<Eigen::Index>(files.size()) != out.factors.rows())
    throw InputError("image list and factor CSV have different lengths");
  const ImageShape& shape = encoder.spec().input;
  Mat images(shape.size(), static_cast<Eigen::Index>(files.size()));
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Image8 img = read_png(files[i]);
    if (!(img.shape == shape))
      throw InputError(files[i].string() + ": image shape does not match the encoder input");
    images.col(static_cast<Eigen::Index>(i)) = from_image8(img);
  }
  out.codes = encode_rows(encoder, images);
  return out;
}

EvaluationSamples collect_samples(const RunConfig& config, const Encoder& encoder,
                                  const Generator& generator) {
  const EvalConfig& e = config.eval;
  if (!e.factors_csv.empty() || !e.image_list.empty()) {
    if (e.factors_csv.empty() || e.image_list.empty())
      throw ConfigError("eval: factors_csv and image_list must be given together");
    return collect_dataset_samples(encoder, resolve_data_path(e.factors_csv),
                                   resolve_data_path(e.image_list));
  }
  return collect_oracle_samples(encoder, generator, e.samples, e.seed);
}

nlohmann::json metric_report(const EvaluationSamples& samples,
                             const std::vector<std::string>& metrics, const EvalConfig& eval,
                             const nlohmann::json& config_echo) {
  nlohmann::json report = nlohmann::json::object();
  report["samples"] = samples.codes.rows();
  for (const std::string& m : metrics) {
    if (m == "mig") {
      const MigResult r = mig_detailed(samples.codes, samples.factors, eval.bins);
      report["mig"] = r.score;
      nlohmann::json per = nlohmann::json::array();
      for (double v : r.per_factor) per.push_back(std::isnan(v) ? nlohmann::json() : nlohmann::json(v));
      report["per_factor_mig"] = per;
      report["excluded_factors"] = r.excluded;
    } else if (m == "dci") {
      ForestConfig fc;
      fc.trees = eval.forest_trees;
      fc.max_depth = eval.forest_depth;
      fc.seed = eval.seed;
      const ImportanceMatrix r = dci_importance(samples.codes, samples.factors, fc);
      report["dci"] = dci_disentanglement(r);
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index j = 0; j < r.rows(); ++j) {
        std::vector<double> row(static_cast<std::size_t>(r.cols()));
        for (Eigen::Index k = 0; k < r.cols(); ++k) row[static_cast<std::size_t>(k)] = r(j, k);
        rows.push_back(row);
      }
      report["importance_matrix"] = rows;
    } else {
      throw ConfigError("unknown metric '" + m + "'");
    }
  }
  report["config"] = config_echo;
  return report;
}

}  // namespace disco
