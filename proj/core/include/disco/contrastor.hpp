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

// Shared-weight encoder and the difference operator that maps an image pair
// to a unit-norm, non-negative vector in the Variation Space:
//
//   v(z, d, eps) = normalize(|E(G(z + A(eps e_d))) - E(G(z))|)

#ifndef DISCO_CONTRASTOR_HPP_
#define DISCO_CONTRASTOR_HPP_

#include <span>
#include <string>
#include <vector>

#include "disco/common.hpp"
#include "disco/gen_backend.hpp"
#include "disco/navigator.hpp"
#include "disco/nn.hpp"
#include "disco/tensor_io.hpp"

namespace disco {

enum class EncoderPreset { linear, mlp, conv4 };

std::string to_string(EncoderPreset p);
EncoderPreset encoder_preset_from_string(const std::string& s);

struct EncoderSpec {
  EncoderPreset preset = EncoderPreset::conv4;
  int output_dim = 8;
  ImageShape input;
  bool bias = true;
  int hidden = 64;                              // mlp preset
  std::vector<int> conv_widths{32, 64, 128, 256};  // conv4 preset
};

class Encoder {
 public:
  Encoder(const EncoderSpec& spec, Rng& rng);

  const EncoderSpec& spec() const { return spec_; }
  int output_dim() const { return spec_.output_dim; }

  // Columns are flattened images; throws InputError on a size mismatch.
  Mat encode(const Mat& images) const;

  const nn::Network& network() const { return net_; }
  nn::Network& network() { return net_; }

  TensorMap tensors(const std::string& prefix) const;
  void load_tensors(const TensorMap& tensors, const std::string& prefix);

 private:
  EncoderSpec spec_;
  nn::Network net_;
};

enum class VariationMode { difference, concatenation };

struct VariationSlot {
  LatentCode z;
  int direction = 0;
  double eps = 0.0;
};

// Pre-normalization norms at or below this count as a vanished variation.
inline constexpr double kDegenerateNorm = 1e-12;

// Batched forward pass over many (z, d, eps) slots, keeping what the
// backward pass needs. The generator only supplies a vector-Jacobian product;
// it never receives gradients of its own.
class VariationPass {
 public:
  static VariationPass run(const Encoder& encoder, const Generator& generator,
                           const Navigator& navigator,
                           std::span<const VariationSlot> slots,
                           VariationMode mode = VariationMode::difference);

  // One unit-norm column per slot (n rows for difference, 2n for concat).
  // Degenerate slots hold zeros.
  const Mat& vectors() const { return vectors_; }
  const std::vector<int>& degenerate_slots() const { return degenerate_; }

  // Adds encoder and navigator gradients given d(loss)/d(vectors).
  // Either accumulator may be null.
  void backward(const Mat& grad_vectors, nn::Gradients* encoder_grads,
                Navigator::Gradients* navigator_grads) const;

 private:
  const Encoder* encoder_ = nullptr;
  const Generator* generator_ = nullptr;
  const Navigator* navigator_ = nullptr;
  VariationMode mode_ = VariationMode::difference;
  std::vector<int> directions_;
  std::vector<double> eps_;
  Mat shifted_latents_;
  nn::Network::Tape tape_;  // encoder over [shifted | base] images
  Mat raw_;                 // |diff| or the concatenation, pre-normalization
  Mat signs_;               // sign(h' - h), difference mode
  Vec norms_;
  Mat vectors_;
  std::vector<int> degenerate_;
};

Mat encode(const Encoder& encoder, const Mat& images);

// Single-slot conveniences. Both throw DegenerateError on a vanished
// variation and InputError when eps == 0.
Vec variation(const Encoder& encoder, const Generator& generator,
              const Navigator& navigator, const LatentCode& z, int d, double eps);
Vec concat_variation(const Encoder& encoder, const Generator& generator,
                     const Navigator& navigator, const LatentCode& z, int d,
                     double eps);

}  // namespace disco

#endif  // DISCO_CONTRASTOR_HPP_
