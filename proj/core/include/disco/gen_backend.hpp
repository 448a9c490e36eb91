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

// Frozen generative models G: latent -> image.
//
// Every generator is immutable after construction and can be shared between
// threads. Besides forward rendering each backend exposes a vector-Jacobian
// product with respect to its latent input, which is how navigator gradients
// pass through the frozen generator. No backend exposes its own parameters to
// an optimizer.

#ifndef DISCO_GEN_BACKEND_HPP_
#define DISCO_GEN_BACKEND_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disco/common.hpp"
#include "disco/nn.hpp"

namespace disco {

enum class GeneratorKind { external_adapter, oracle_linear, oracle_shapes };
enum class LatentSpace { Z, W };
enum class LatentPrior { standard_normal, factor_uniform };

std::string to_string(GeneratorKind k);
std::string to_string(LatentSpace s);
std::string to_string(LatentPrior p);
GeneratorKind generator_kind_from_string(const std::string& s);
LatentSpace latent_space_from_string(const std::string& s);
LatentPrior latent_prior_from_string(const std::string& s);

struct ImageShape {
  int height = 0;
  int width = 0;
  int channels = 0;

  int size() const { return height * width * channels; }
  bool operator==(const ImageShape&) const = default;
};

struct LatentCode {
  Vec values;
  LatentSpace space = LatentSpace::Z;
};

class Generator {
 public:
  virtual ~Generator() = default;

  GeneratorKind kind() const { return kind_; }
  int latent_dim() const { return latent_dim_; }
  LatentSpace latent_space() const { return space_; }
  const ImageShape& image_shape() const { return shape_; }
  LatentPrior prior() const { return prior_; }
  std::uint64_t seed() const { return seed_; }

  // Checked generation: one image column per code, pixels in [0, 1].
  // Throws ConfigError on a space-tag mismatch and InputError on non-finite
  // or mis-sized latents.
  Mat generate(std::span<const LatentCode> batch) const;

  // Unchecked rendering of latent columns.
  virtual Mat render(const Mat& latents) const = 0;
  // d(loss)/d(latents) given d(loss)/d(images) at `latents`.
  virtual Mat render_vjp(const Mat& latents, const Mat& grad_images) const = 0;

  // Draws from the declared prior. Throws InputError when count < 1.
  std::vector<LatentCode> sample_latent(int count, Rng& rng) const;

  // Fingerprint of every fixed parameter of the model.
  virtual std::uint64_t parameter_hash() const = 0;

  virtual bool has_true_factors() const { return false; }
  virtual int factor_count() const { return 0; }
  // Ground-truth factors of a latent; only oracle generators have them.
  virtual Vec true_factors(const Vec& z) const;

 protected:
  Generator(GeneratorKind kind, int latent_dim, LatentSpace space,
            ImageShape shape, LatentPrior prior, std::uint64_t seed);

  virtual Vec sample_one(Rng& rng) const;

 private:
  GeneratorKind kind_;
  int latent_dim_;
  LatentSpace space_;
  ImageShape shape_;
  LatentPrior prior_;
  std::uint64_t seed_;
};

using GeneratorHandle = std::shared_ptr<const Generator>;

// ---------------------------------------------------------------------------
// Synthetic oracles with known factors. The latent is z = R f + b with R a
// fixed rotation (identity when not entangled) and f the factor vector.

struct OracleOptions {
  LatentPrior prior = LatentPrior::factor_uniform;
  // Only used by oracle_linear; oracle_shapes is always 64x64x3.
  ImageShape linear_shape{16, 16, 1};
};

class OracleGenerator final : public Generator {
 public:
  OracleGenerator(GeneratorKind kind, int factors, std::uint64_t mixing_seed,
                  bool entangle, const OracleOptions& options);

  Mat render(const Mat& latents) const override;
  Mat render_vjp(const Mat& latents, const Mat& grad_images) const override;
  std::uint64_t parameter_hash() const override;

  bool has_true_factors() const override { return true; }
  int factor_count() const override { return factors_; }
  Vec true_factors(const Vec& z) const override;

  // Latent of a given factor vector (no clipping).
  Vec latent_of(const Vec& factors) const;

  bool entangled() const { return entangle_; }
  const Mat& mixing() const { return mixing_; }
  const Vec& offset() const { return offset_; }
  // oracle_linear only: pixels x K, disjoint supports.
  const Mat& patterns() const { return patterns_; }

  // Renders one factor vector directly (factors are clamped to [0, 1]).
  Vec render_factors(const Vec& factors) const;

 protected:
  Vec sample_one(Rng& rng) const override;

 private:
  Vec render_shapes(const Vec& f) const;
  Vec shapes_factor_vjp(const Vec& f, const Eigen::Ref<const Vec>& grad) const;

  int factors_;
  bool entangle_;
  Mat mixing_;
  Vec offset_;
  Mat patterns_;
};

std::shared_ptr<const OracleGenerator> make_oracle_generator(
    int factors, GeneratorKind kind, std::uint64_t mixing_seed, bool entangle,
    const OracleOptions& options = {});

// Throws UnsupportedError for non-oracle generators.
Vec oracle_true_factors(const Generator& generator, const LatentCode& z);

// ---------------------------------------------------------------------------
// External checkpoint adapter.
//
// A checkpoint directory holds `manifest.json`:
//   {"kind": "mlp", "latent_dim": L, "latent_space_tag": "Z"|"W",
//    "image_shape": [H, W, C], "prior": "standard_normal",
//    "layers": [{"type": "dense", "weight": NAME, "bias": NAME} |
//               {"type": "activation", "fn": "tanh"|...}, ...],
//    "mapping": {"input_dim": M, "layers": [...]},     // W space only
//    "tensors": [tensor entries, see tensor_io.hpp]}
// The synthesis network's last activation is followed by a sigmoid so that
// pixels land in [0, 1]. For W-space checkpoints, sampling pushes standard
// normal draws through the mapping network.

class MlpGenerator final : public Generator {
 public:
  MlpGenerator(int latent_dim, LatentSpace space, ImageShape shape,
               LatentPrior prior, nn::Network synthesis,
               std::optional<nn::Network> mapping);

  Mat render(const Mat& latents) const override;
  Mat render_vjp(const Mat& latents, const Mat& grad_images) const override;
  std::uint64_t parameter_hash() const override;

  const nn::Network& synthesis() const { return synthesis_; }
  const std::optional<nn::Network>& mapping() const { return mapping_; }

 protected:
  Vec sample_one(Rng& rng) const override;

 private:
  nn::Network synthesis_;
  std::optional<nn::Network> mapping_;
};

// Resolves relative paths against $DISCO_DATA_DIR when it is set.
std::filesystem::path resolve_data_path(const std::filesystem::path& p);

GeneratorHandle load_external_generator(const std::filesystem::path& dir);
void save_mlp_generator(const std::filesystem::path& dir,
                        const MlpGenerator& generator);

}  // namespace disco

#endif  // DISCO_GEN_BACKEND_HPP_
