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


#include "disco/evalviz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

namespace disco {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

const OracleGenerator& require_oracle(const Generator& generator, const char* what) {
  const auto* oracle = dynamic_cast<const OracleGenerator*>(&generator);
  if (oracle == nullptr) throw ConfigError(std::string(what) + " needs an oracle generator");
  return *oracle;
}

Vec linspace01(int steps) {
  if (steps == 1) return Vec::Zero(1);
  return Vec::LinSpaced(steps, 0.0, 1.0);
}

}  // namespace

Image8 render_traversal_grid(const Generator& generator, const Navigator& navigator,
                             std::span<const LatentCode> rows, int direction,
                             const std::vector<double>& eps_steps) {
  if (rows.empty() || eps_steps.empty())
    throw InputError("traversal grid needs at least one row and one step");
  const ImageShape cell = generator.image_shape();
  if (cell.channels != 1 && cell.channels != 3)
    throw UnsupportedError("traversal grid supports 1- or 3-channel images");
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(eps_steps.size());
  Image8 grid;
  grid.shape = {nr * cell.height + (nr + 1) * kGridGutter,
                nc * cell.width + (nc + 1) * kGridGutter, cell.channels};
  grid.data.assign(static_cast<std::size_t>(grid.shape.size()), 255);

  std::vector<LatentCode> shifted;
  shifted.reserve(static_cast<std::size_t>(nr * nc));
  for (const LatentCode& z : rows)
    for (double eps : eps_steps)
      shifted.push_back({z.values + navigator.shift(direction, eps), z.space});
  const Mat images = generator.generate(shifted);

  for (int r = 0; r < nr; ++r) {
    for (int c = 0; c < nc; ++c) {
      const Image8 tile = to_image8(images.col(r * nc + c), cell);
      const int y0 = kGridGutter + r * (cell.height + kGridGutter);
      const int x0 = kGridGutter + c * (cell.width + kGridGutter);
      for (int y = 0; y < cell.height; ++y) {
        const auto src = tile.data.begin() + static_cast<std::ptrdiff_t>(y) * cell.width * cell.channels;
        const auto dst = grid.data.begin() +
                         (static_cast<std::ptrdiff_t>(y0 + y) * grid.shape.width + x0) * cell.channels;
        std::copy(src, src + cell.width * cell.channels, dst);
      }
    }
  }
  return grid;
}

void traversal_grid(const Generator& generator, const Navigator& navigator,
                    std::span<const LatentCode> rows, int direction,
                    const std::vector<double>& eps_steps, const fs::path& out_png) {
  write_png(out_png, render_traversal_grid(generator, navigator, rows, direction, eps_steps));
}

Mat mean_variation_vectors(const Encoder& encoder, const Generator& generator,
                           const Navigator& navigator, int samples, double eps_bar, Rng& rng) {
  if (samples < kMinSimilaritySamples)
    throw ConfigError("each direction needs at least " +
                      std::to_string(kMinSimilaritySamples) + " samples");
  if (!(eps_bar > 0.0)) throw ConfigError("eps_bar must be > 0");
  const int dirs = navigator.directions();
  Mat means = Mat::Zero(encoder.output_dim(), dirs);
  for (int d = 0; d < dirs; ++d) {
    const std::vector<LatentCode> z = generator.sample_latent(samples, rng);
    std::vector<VariationSlot> slots;
    for (const LatentCode& code : z) {
      double eps = 0.0;
      while (eps == 0.0) eps = uniform(rng, -eps_bar, eps_bar);
      slots.push_back({code, d, eps});
    }
    const VariationPass pass = VariationPass::run(encoder, generator, navigator, slots);
    const int used = samples - static_cast<int>(pass.degenerate_slots().size());
    if (used > 0) means.col(d) = pass.vectors().rowwise().sum() / used;
  }
  return means;
}

Mat similarity_from_means(const Mat& means) {
  const Eigen::Index dirs = means.cols();
  if (dirs < 2) throw InputError("similarity matrix needs at least two directions");
  Vec norms = means.colwise().norm().transpose();
  Mat out(dirs, dirs);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index a = 0; a < dirs; ++a) {
    for (Eigen::Index b = 0; b < dirs; ++b) {
      if (norms(a) <= kDegenerateNorm || norms(b) <= kDegenerateNorm) {
        out(a, b) = nan;
      } else if (a == b) {
        out(a, b) = 1.0;
      } else {
        // min/max ordering keeps the matrix exactly symmetric.
        const Eigen::Index i = std::min(a, b);
        const Eigen::Index j = std::max(a, b);
        out(a, b) = means.col(i).dot(means.col(j)) / (norms(i) * norms(j));
      }
    }
  }
  return out;
}

Mat direction_similarity_matrix(const Encoder& encoder, const Generator& generator,
                                const Navigator& navigator, int samples, double eps_bar,
                                std::uint64_t seed) {
  Rng rng(seed);
  return similarity_from_means(
      mean_variation_vectors(encoder, generator, navigator, samples, eps_bar, rng));
}

void write_similarity_csv(const fs::path& path, const Mat& similarity) {
  std::ofstream out = open_out(path);
  for (Eigen::Index b = 0; b < similarity.cols(); ++b)
    out << (b ? "," : "") << "d_" << b;
  out << "\n";
  for (Eigen::Index a = 0; a < similarity.rows(); ++a) {
    for (Eigen::Index b = 0; b < similarity.cols(); ++b) {
      out << (b ? "," : "");
      if (std::isnan(similarity(a, b)))
        out << "missing";
      else
        out << num(similarity(a, b));
    }
    out << "\n";
  }
  close_out(out, path);
}

Image8 similarity_heatmap(const Mat& similarity, int cell) {
  if (cell < 1) throw InputError("heatmap cell size must be >= 1");
  Image8 img;
  img.shape = {static_cast<int>(similarity.rows()) * cell,
               static_cast<int>(similarity.cols()) * cell, 3};
  img.data.resize(static_cast<std::size_t>(img.shape.size()));
  for (int y = 0; y < img.shape.height; ++y) {
    for (int x = 0; x < img.shape.width; ++x) {
      const double v = similarity(y / cell, x / cell);
      std::uint8_t rgb[3] = {255, 0, 0};
      if (!std::isnan(v)) {
        const auto g = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        rgb[0] = rgb[1] = rgb[2] = g;
      }
      std::copy(rgb, rgb + 3,
                img.data.begin() + (static_cast<std::ptrdiff_t>(y) * img.shape.width + x) * 3);
    }
  }
  return img;
}

Mat variation_response_profile(const Encoder& encoder, const Generator& generator, int factor,
                               int steps, double base_value) {
  const OracleGenerator& oracle = require_oracle(generator, "variation response profile");
  if (factor < 0 || factor >= oracle.factor_count())
    throw InputError("factor index out of range");
  if (steps < 2) throw InputError("a response profile needs at least two steps");
  const Vec values = linspace01(steps);
  Mat images(oracle.image_shape().size(), steps);
  for (int t = 0; t < steps; ++t) {
    Vec f = Vec::Constant(oracle.factor_count(), base_value);
    f(factor) = values(t);
    images.col(t) = oracle.render_factors(f);
  }
  const Mat codes = encoder.encode(images);
  Mat out(steps, 1 + codes.rows());
  out.col(0) = values;
  for (int t = 0; t < steps; ++t)
    out.row(t).tail(codes.rows()) = (codes.col(t) - codes.col(0)).cwiseAbs().transpose();
  return out;
}

void write_profile_csv(const fs::path& path, const Mat& profile) {
  std::ofstream out = open_out(path);
  out << "factor_value";
  for (Eigen::Index j = 1; j < profile.cols(); ++j) out << ",dim_" << (j - 1);
  out << "\n";
  for (Eigen::Index t = 0; t < profile.rows(); ++t) {
    for (Eigen::Index j = 0; j < profile.cols(); ++j) out << (j ? "," : "") << num(profile(t, j));
    out << "\n";
  }
  close_out(out, path);
}

std::array<int, 3> scatter_dimensions(const Mat& mutual_information,
                                      const std::array<int, 3>& factors) {
  std::array<int, 3> dims{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (factors[i] < 0 || factors[i] >= mutual_information.cols())
      throw ConfigError("scatter factor index out of range");
    Eigen::Index best = 0;
    mutual_information.col(factors[i]).maxCoeff(&best);
    dims[i] = static_cast<int>(best);
  }
  return dims;
}

Mat latent_scatter(const Encoder& encoder, const Generator& generator,
                   const std::array<int, 3>& factors, const std::array<int, 3>& dims,
                   int resolution) {
  if (generator.factor_count() < 3)
    throw ConfigError("latent scatter needs a generator with at least 3 factors");
  const OracleGenerator& oracle = require_oracle(generator, "latent scatter");
  if (resolution < 2) throw ConfigError("scatter resolution must be >= 2");
  for (int f : factors)
    if (f < 0 || f >= oracle.factor_count()) throw ConfigError("scatter factor out of range");
  for (int d : dims)
    if (d < 0 || d >= encoder.output_dim()) throw ConfigError("scatter dimension out of range");
  const Vec values = linspace01(resolution);
  const int count = resolution * resolution * resolution;
  Mat images(oracle.image_shape().size(), count);
  Mat out(count, 6);
  int i = 0;
  for (int a = 0; a < resolution; ++a) {
    for (int b = 0; b < resolution; ++b) {
      for (int c = 0; c < resolution; ++c, ++i) {
        Vec f = Vec::Constant(oracle.factor_count(), 0.5);
        f(factors[0]) = values(a);
        f(factors[1]) = values(b);
        f(factors[2]) = values(c);
        images.col(i) = oracle.render_factors(f);
        out(i, 0) = values(a);
        out(i, 1) = values(b);
        out(i, 2) = values(c);
      }
    }
  }
  const Mat codes = encoder.encode(images);
  for (int k = 0; k < 3; ++k) out.col(3 + k) = codes.row(dims[static_cast<std::size_t>(k)]).transpose();
  return out;
}

void write_scatter_csv(const fs::path& path, const Mat& points,
                       const std::array<int, 3>& factors, const std::array<int, 3>& dims) {
  std::ofstream out = open_out(path);
  out << "factor_" << factors[0] << ",factor_" << factors[1] << ",factor_" << factors[2]
      << ",code_" << dims[0] << ",code_" << dims[1] << ",code_" << dims[2] << "\n";
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) out << (c ? "," : "") << num(points(r, c));
    out << "\n";
  }
  close_out(out, path);
}

}  // namespace disco
