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

#include "disco/gen_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "disco/tensor_io.hpp"

namespace disco {

namespace fs = std::filesystem;

namespace {

constexpr int kShapesSide = 64;
constexpr double kEdgeSoftness = 0.5;  // pixels
constexpr double kMinSide = 0.15 * kShapesSide;
constexpr double kMaxSide = 0.5 * kShapesSide;

double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

// Haar-distributed rotation: QR of a Gaussian matrix with sign fix.
Mat random_orthogonal(int n, Rng& rng) {
  Mat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = standard_normal(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  return q;
}

// Fully saturated HSV colour for a hue in [0, 1].
Eigen::Vector3d hue_to_rgb(double h) {
  const double t = 6.0 * h;
  return {std::clamp(std::abs(t - 3.0) - 1.0, 0.0, 1.0),
          std::clamp(2.0 - std::abs(t - 2.0), 0.0, 1.0),
          std::clamp(2.0 - std::abs(t - 4.0), 0.0, 1.0)};
}

Eigen::Vector3d hue_to_rgb_derivative(double h) {
  const double t = 6.0 * h;
  auto ramp = [](double value, double slope) {
    return (value > 0.0 && value < 1.0) ? slope : 0.0;
  };
  const double r = std::abs(t - 3.0) - 1.0;
  const double g = 2.0 - std::abs(t - 2.0);
  const double b = 2.0 - std::abs(t - 4.0);
  return {ramp(r, t >= 3.0 ? 6.0 : -6.0), ramp(g, t >= 2.0 ? -6.0 : 6.0),
          ramp(b, t >= 4.0 ? -6.0 : 6.0)};
}

struct SquareGeometry {
  double cx, cy, side;
};

SquareGeometry square_geometry(const Vec& f) {
  const double margin = kMaxSide / 2.0;
  const double span = kShapesSide - 2.0 * margin;
  return {margin + f(0) * span, margin + f(1) * span,
          kMinSide + f(2) * (kMaxSide - kMinSide)};
}

// Factors beyond K are held at these defaults (x, y, size, hue).
Vec full_shape_factors(const Vec& f) {
  Vec full(4);
  full << 0.5, 0.5, 0.5, 0.0;
  full.head(f.size()) = f;
  return full;
}

// Soft 1-D box profile and its derivatives w.r.t. the centre and side.
struct Profile {
  double value, d_center, d_side;
};

Profile box_profile(double p, double center, double side) {
  const double a = (p - (center - side / 2.0)) / kEdgeSoftness;
  const double b = ((center + side / 2.0) - p) / kEdgeSoftness;
  const double sa = logistic(a);
  const double sb = logistic(b);
  const double v = sa * sb;
  return {v, v * (-(1.0 - sa) + (1.0 - sb)) / kEdgeSoftness,
          v * 0.5 * ((1.0 - sa) + (1.0 - sb)) / kEdgeSoftness};
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(path.string() + ": " + ex.what());
  }
}

nn::Network network_from_manifest(const nlohmann::json& layers,
                                  const TensorMap& tensors) {
  nn::Network net;
  Rng unused(0);
  for (const auto& spec : layers) {
    const auto type = spec.at("type").get<std::string>();
    if (type == "activation") {
      net.add_activation(nn::activation_from_string(spec.at("fn").get<std::string>()));
      continue;
    }
    if (type != "dense")
      throw UnsupportedError("external layer type '" + type + "' is not supported");
    auto find = [&](const std::string& key) -> const Mat& {
      const auto name = spec.at(key).get<std::string>();
      auto it = tensors.find(name);
      if (it == tensors.end()) throw IoError("missing tensor " + name);
      return it->second;
    };
    const Mat& w = find("weight");
    const bool has_bias = spec.contains("bias");
    net.add_dense(static_cast<int>(w.cols()), static_cast<int>(w.rows()), has_bias,
                  unused);
    net.layers().back().weight = w;
    if (has_bias) {
      const Mat& b = find("bias");
      if (b.rows() != w.rows() || b.cols() != 1)
        throw IoError("bias shape does not match its weight");
      net.layers().back().bias = b;
    }
  }
  return net;
}

nlohmann::json network_to_manifest(const nn::Network& net, const std::string& prefix,
                                   TensorMap& tensors) {
  nlohmann::json layers = nlohmann::json::array();
  int index = 0;
  for (const nn::Layer& layer : net.layers()) {
    if (layer.type == nn::Layer::Type::activation) {
      layers.push_back({{"type", "activation"}, {"fn", nn::to_string(layer.activation)}});
      continue;
    }
    if (layer.type != nn::Layer::Type::dense)
      throw UnsupportedError("only dense layers can be exported");
    const std::string base = prefix + std::to_string(index++);
    nlohmann::json spec = {{"type", "dense"}, {"weight", base + ".w"}};
    tensors[base + ".w"] = layer.weight;
    if (layer.bias.size() > 0) {
      spec["bias"] = base + ".b";
      tensors[base + ".b"] = layer.bias;
    }
    layers.push_back(spec);
  }
  return layers;
}

}  // namespace

std::string to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::external_adapter:
      return "external_adapter";
    case GeneratorKind::oracle_linear:
      return "oracle_linear";
    case GeneratorKind::oracle_shapes:
      return "oracle_shapes";
  }
  return "?";
}

std::string to_string(LatentSpace s) { return s == LatentSpace::Z ? "Z" : "W"; }

std::string to_string(LatentPrior p) {
  return p == LatentPrior::standard_normal ? "standard_normal" : "factor_uniform";
}

GeneratorKind generator_kind_from_string(const std::string& s) {
  if (s == "external_adapter") return GeneratorKind::external_adapter;
  if (s == "oracle_linear") return GeneratorKind::oracle_linear;
  if (s == "oracle_shapes") return GeneratorKind::oracle_shapes;
  throw ConfigError("unsupported generator kind '" + s + "'");
}

LatentSpace latent_space_from_string(const std::string& s) {
  if (s == "Z") return LatentSpace::Z;
  if (s == "W") return LatentSpace::W;
  throw ConfigError("latent space tag must be Z or W, got '" + s + "'");
}

LatentPrior latent_prior_from_string(const std::string& s) {
  if (s == "standard_normal") return LatentPrior::standard_normal;
  if (s == "factor_uniform") return LatentPrior::factor_uniform;
  throw ConfigError("unknown latent prior '" + s + "'");
}

// ---------------------------------------------------------------------------

Generator::Generator(GeneratorKind kind, int latent_dim, LatentSpace space,
                     ImageShape shape, LatentPrior prior, std::uint64_t seed)
    : kind_(kind),
      latent_dim_(latent_dim),
      space_(space),
      shape_(shape),
      prior_(prior),
      seed_(seed) {
  if (latent_dim <= 0) throw ConfigError("latent_dim must be positive");
  if (shape.height <= 0 || shape.width <= 0 || shape.channels <= 0)
    throw ConfigError("image shape must be positive");
}

Mat Generator::generate(std::span<const LatentCode> batch) const {
  if (batch.empty()) throw InputError("generate: empty batch");
  Mat latents(latent_dim_, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const LatentCode& code = batch[i];
    if (code.space != space_)
      throw ConfigError("latent code tagged " + to_string(code.space) +
                        " but generator expects " + to_string(space_));
    if (code.values.size() != latent_dim_)
      throw InputError("latent code has dimension " +
                       std::to_string(code.values.size()) + ", expected " +
                       std::to_string(latent_dim_));
    if (!code.values.allFinite()) throw InputError("latent code has non-finite entries");
    latents.col(static_cast<Eigen::Index>(i)) = code.values;
  }
  return render(latents);
}

std::vector<LatentCode> Generator::sample_latent(int count, Rng& rng) const {
  if (count < 1) throw InputError("sample_latent: count must be >= 1");
  std::vector<LatentCode> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back({sample_one(rng), space_});
  return out;
}

Vec Generator::sample_one(Rng& rng) const {
  Vec z(latent_dim_);
  for (int i = 0; i < latent_dim_; ++i) z(i) = standard_normal(rng);
  return z;
}

Vec Generator::true_factors(const Vec&) const {
  throw UnsupportedError("generator kind " + to_string(kind_) +
                         " has no ground-truth factors");
}

// ---------------------------------------------------------------------------

OracleGenerator::OracleGenerator(GeneratorKind kind, int factors,
                                 std::uint64_t mixing_seed, bool entangle,
                                 const OracleOptions& options)
    : Generator(kind, factors, LatentSpace::Z,
                kind == GeneratorKind::oracle_shapes
                    ? ImageShape{kShapesSide, kShapesSide, 3}
                    : options.linear_shape,
                options.prior, mixing_seed),
      factors_(factors),
      entangle_(entangle) {
  if (kind == GeneratorKind::external_adapter)
    throw UnsupportedError("external_adapter is not an oracle kind");
  if (factors < 2 || factors > 8)
    throw ConfigError("oracle factor count must be in [2, 8]");
  if (kind == GeneratorKind::oracle_shapes && factors > 4)
    throw UnsupportedError("oracle_shapes renders at most 4 factors");

  Rng rng(mixing_seed);
  if (entangle) {
    mixing_ = random_orthogonal(factors, rng);
    offset_ = -mixing_ * Vec::Constant(factors, 0.5);
  } else {
    mixing_ = Mat::Identity(factors, factors);
    offset_ = Vec::Zero(factors);
  }

  if (kind == GeneratorKind::oracle_linear) {
    const int entries = image_shape().size();
    if (entries < factors)
      throw ConfigError("linear oracle image has fewer entries than factors");
    std::vector<int> order(static_cast<std::size_t>(entries));
    std::iota(order.begin(), order.end(), 0);
    Rng pattern_rng(mixing_seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(order.begin(), order.end(), pattern_rng);
    patterns_ = Mat::Zero(entries, factors);
    for (int i = 0; i < entries; ++i)
      patterns_(order[static_cast<std::size_t>(i)], i % factors) =
          uniform(pattern_rng, 0.5, 1.0);
  }
}

Vec OracleGenerator::sample_one(Rng& rng) const {
  if (prior() == LatentPrior::standard_normal) return Generator::sample_one(rng);
  Vec f(factors_);
  for (int k = 0; k < factors_; ++k) f(k) = uniform(rng, 0.0, 1.0);
  return latent_of(f);
}

Vec OracleGenerator::latent_of(const Vec& factors) const {
  return mixing_ * factors + offset_;
}

Vec OracleGenerator::true_factors(const Vec& z) const {
  if (z.size() != factors_) throw InputError("latent dimension mismatch");
  return (mixing_.transpose() * (z - offset_)).cwiseMax(0.0).cwiseMin(1.0);
}

Vec OracleGenerator::render_factors(const Vec& factors) const {
  const Vec f = factors.cwiseMax(0.0).cwiseMin(1.0);
  if (kind() == GeneratorKind::oracle_linear) return patterns_ * f;
  return render_shapes(f);
}

Vec OracleGenerator::render_shapes(const Vec& factors) const {
  const Vec f = full_shape_factors(factors);
  const SquareGeometry sq = square_geometry(f);
  const Eigen::Vector3d rgb = hue_to_rgb(f(3));
  Vec image(image_shape().size());
  std::vector<double> xs(kShapesSide);
  for (int x = 0; x < kShapesSide; ++x)
    xs[static_cast<std::size_t>(x)] = box_profile(x + 0.5, sq.cx, sq.side).value;
  for (int y = 0; y < kShapesSide; ++y) {
    const double py = box_profile(y + 0.5, sq.cy, sq.side).value;
    for (int x = 0; x < kShapesSide; ++x) {
      const double cover = py * xs[static_cast<std::size_t>(x)];
      for (int c = 0; c < 3; ++c) image((y * kShapesSide + x) * 3 + c) = cover * rgb(c);
    }
  }
  return image;
}

Vec OracleGenerator::shapes_factor_vjp(const Vec& factors,
                                       const Eigen::Ref<const Vec>& grad) const {
  const Vec f = full_shape_factors(factors);
  const SquareGeometry sq = square_geometry(f);
  const Eigen::Vector3d rgb = hue_to_rgb(f(3));
  const Eigen::Vector3d drgb = hue_to_rgb_derivative(f(3));
  const double dcenter = kShapesSide - kMaxSide;  // d(centre)/d(x or y)
  const double dside = kMaxSide - kMinSide;

  std::vector<Profile> xs(kShapesSide);
  for (int x = 0; x < kShapesSide; ++x)
    xs[static_cast<std::size_t>(x)] = box_profile(x + 0.5, sq.cx, sq.side);
  Eigen::Vector4d g = Eigen::Vector4d::Zero();
  for (int y = 0; y < kShapesSide; ++y) {
    const Profile py = box_profile(y + 0.5, sq.cy, sq.side);
    for (int x = 0; x < kShapesSide; ++x) {
      const Profile& px = xs[static_cast<std::size_t>(x)];
      const int base = (y * kShapesSide + x) * 3;
      const double gr = grad(base) * rgb(0) + grad(base + 1) * rgb(1) +
                        grad(base + 2) * rgb(2);
      const double gdr = grad(base) * drgb(0) + grad(base + 1) * drgb(1) +
                         grad(base + 2) * drgb(2);
      g(0) += gr * px.d_center * py.value * dcenter;
      g(1) += gr * px.value * py.d_center * dcenter;
      g(2) += gr * (px.d_side * py.value + px.value * py.d_side) * dside;
      g(3) += gdr * px.value * py.value;
    }
  }
  return g.head(factors.size());
}

Mat OracleGenerator::render(const Mat& latents) const {
  Mat images(image_shape().size(), latents.cols());
  for (Eigen::Index i = 0; i < latents.cols(); ++i)
    images.col(i) = render_factors(mixing_.transpose() * (latents.col(i) - offset_));
  return images;
}

Mat OracleGenerator::render_vjp(const Mat& latents, const Mat& grad_images) const {
  Mat grad_latents(latents.rows(), latents.cols());
  for (Eigen::Index i = 0; i < latents.cols(); ++i) {
    const Vec raw = mixing_.transpose() * (latents.col(i) - offset_);
    Vec grad_f = kind() == GeneratorKind::oracle_linear
                     ? Vec(patterns_.transpose() * grad_images.col(i))
                     : shapes_factor_vjp(raw.cwiseMax(0.0).cwiseMin(1.0),
                                         grad_images.col(i));
    // Clamped factors pass no gradient.
    for (int k = 0; k < factors_; ++k)
      if (raw(k) < 0.0 || raw(k) > 1.0) grad_f(k) = 0.0;
    grad_latents.col(i) = mixing_ * grad_f;
  }
  return grad_latents;
}

std::uint64_t OracleGenerator::parameter_hash() const {
  std::uint64_t h = fnv1a(&factors_, sizeof(factors_));
  h = hash_matrix(mixing_, h);
  h = hash_matrix(offset_, h);
  return hash_matrix(patterns_, h);
}

std::shared_ptr<const OracleGenerator> make_oracle_generator(
    int factors, GeneratorKind kind, std::uint64_t mixing_seed, bool entangle,
    const OracleOptions& options) {
  return std::make_shared<const OracleGenerator>(kind, factors, mixing_seed,
                                                 entangle, options);
}

Vec oracle_true_factors(const Generator& generator, const LatentCode& z) {
  if (!generator.has_true_factors())
    throw UnsupportedError("oracle_true_factors called on " +
                           to_string(generator.kind()));
  return generator.true_factors(z.values);
}

// ---------------------------------------------------------------------------

MlpGenerator::MlpGenerator(int latent_dim, LatentSpace space, ImageShape shape,
                           LatentPrior prior, nn::Network synthesis,
                           std::optional<nn::Network> mapping)
    : Generator(GeneratorKind::external_adapter, latent_dim, space, shape, prior, 0),
      synthesis_(std::move(synthesis)),
      mapping_(std::move(mapping)) {
  if (synthesis_.in_size() != latent_dim)
    throw ConfigError("synthesis network input does not match latent_dim");
  if (synthesis_.out_size() != shape.size())
    throw ConfigError("synthesis network output does not match image_shape");
  if (space == LatentSpace::W) {
    if (!mapping_) throw ConfigError("W-space checkpoints need a mapping network");
    if (mapping_->out_size() != latent_dim)
      throw ConfigError("mapping network output does not match latent_dim");
  }
}

Mat MlpGenerator::render(const Mat& latents) const {
  return synthesis_.forward(latents).unaryExpr(
      [](double v) { return logistic(v); });
}

Mat MlpGenerator::render_vjp(const Mat& latents, const Mat& grad_images) const {
  const nn::Network::Tape tape = synthesis_.forward_tape(latents);
  const Mat s = tape.values.back().unaryExpr([](double v) { return logistic(v); });
  const Mat grad_pre = grad_images.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
  return synthesis_.backward(tape, grad_pre, nullptr);
}

Vec MlpGenerator::sample_one(Rng& rng) const {
  if (!mapping_) return Generator::sample_one(rng);
  Vec z(mapping_->in_size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
  return mapping_->forward(z);
}

std::uint64_t MlpGenerator::parameter_hash() const {
  std::uint64_t h = fnv1a("mlp", 3);
  for (const Mat* p : synthesis_.parameters()) h = hash_matrix(*p, h);
  if (mapping_)
    for (const Mat* p : mapping_->parameters()) h = hash_matrix(*p, h);
  return h;
}

fs::path resolve_data_path(const fs::path& p) {
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("DISCO_DATA_DIR"); root != nullptr && *root)
    return fs::path(root) / p;
  return p;
}

GeneratorHandle load_external_generator(const fs::path& dir_in) {
  const fs::path dir = resolve_data_path(dir_in);
  const nlohmann::json manifest = read_json(dir / "manifest.json");
  try {
    const auto kind = manifest.at("kind").get<std::string>();
    if (kind != "mlp")
      throw UnsupportedError("external backend '" + kind + "' is not available");
    const int latent_dim = manifest.at("latent_dim").get<int>();
    const LatentSpace space =
        latent_space_from_string(manifest.at("latent_space_tag").get<std::string>());
    const auto& shape_json = manifest.at("image_shape");
    const ImageShape shape{shape_json.at(0).get<int>(), shape_json.at(1).get<int>(),
                           shape_json.at(2).get<int>()};
    if (!manifest.contains("prior"))
      throw ConfigError("external manifest must declare its latent prior");
    const LatentPrior prior =
        latent_prior_from_string(manifest.at("prior").get<std::string>());
    const TensorMap tensors = read_tensors(dir, manifest.at("tensors"));
    nn::Network synthesis = network_from_manifest(manifest.at("layers"), tensors);
    std::optional<nn::Network> mapping;
    if (manifest.contains("mapping")) {
      mapping = network_from_manifest(manifest.at("mapping").at("layers"), tensors);
      if (mapping->in_size() != manifest.at("mapping").at("input_dim").get<int>())
        throw ConfigError("mapping input_dim does not match its first layer");
    }
    return std::make_shared<const MlpGenerator>(latent_dim, space, shape, prior,
                                                std::move(synthesis),
                                                std::move(mapping));
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("malformed generator manifest: " + std::string(ex.what()));
  }
}

void save_mlp_generator(const fs::path& dir, const MlpGenerator& generator) {
  fs::create_directories(dir);
  TensorMap tensors;
  nlohmann::json manifest;
  manifest["kind"] = "mlp";
  manifest["latent_dim"] = generator.latent_dim();
  manifest["latent_space_tag"] = to_string(generator.latent_space());
  manifest["image_shape"] = {generator.image_shape().height,
                             generator.image_shape().width,
                             generator.image_shape().channels};
  manifest["prior"] = to_string(generator.prior());
  manifest["layers"] = network_to_manifest(generator.synthesis(), "g", tensors);
  if (generator.mapping()) {
    manifest["mapping"] = {
        {"input_dim", generator.mapping()->in_size()},
        {"layers", network_to_manifest(*generator.mapping(), "map", tensors)}};
  }
  manifest["tensors"] = write_tensors(dir, tensors);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write generator manifest");
  out << manifest.dump(2) << "\n";
}

}  // namespace disco
