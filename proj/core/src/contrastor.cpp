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

#include "disco/contrastor.hpp"

#include <cmath>

namespace disco {

std::string to_string(EncoderPreset p) {
  switch (p) {
    case EncoderPreset::linear:
      return "linear";
    case EncoderPreset::mlp:
      return "mlp";
    case EncoderPreset::conv4:
      return "conv4";
  }
  return "?";
}

EncoderPreset encoder_preset_from_string(const std::string& s) {
  if (s == "linear") return EncoderPreset::linear;
  if (s == "mlp") return EncoderPreset::mlp;
  if (s == "conv4") return EncoderPreset::conv4;
  throw ConfigError("unknown encoder preset '" + s + "'");
}

Encoder::Encoder(const EncoderSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.output_dim < 1) throw ConfigError("encoder output_dim must be >= 1");
  const int in = spec.input.size();
  if (in <= 0) throw ConfigError("encoder input shape must be positive");
  switch (spec.preset) {
    case EncoderPreset::linear:
      net_.add_dense(in, spec.output_dim, spec.bias, rng);
      break;
    case EncoderPreset::mlp:
      if (spec.hidden < 1) throw ConfigError("encoder hidden width must be >= 1");
      net_.add_dense(in, spec.hidden, spec.bias, rng);
      net_.add_activation(nn::Activation::leaky_relu);
      net_.add_dense(spec.hidden, spec.output_dim, spec.bias, rng);
      break;
    case EncoderPreset::conv4: {
      if (spec.conv_widths.empty()) throw ConfigError("conv4 needs at least one width");
      nn::ConvGeometry g;
      g.in_h = spec.input.height;
      g.in_w = spec.input.width;
      g.in_c = spec.input.channels;
      for (int width : spec.conv_widths) {
        g.out_c = width;
        net_.add_conv(g, spec.bias, rng);
        net_.add_activation(nn::Activation::leaky_relu);
        g = nn::ConvGeometry{g.out_h(), g.out_w(), width, 0, g.kernel, g.stride, g.pad};
      }
      net_.add_dense(g.in_h * g.in_w * g.in_c, spec.output_dim, spec.bias, rng);
      break;
    }
  }
}

Mat Encoder::encode(const Mat& images) const {
  if (images.rows() != spec_.input.size())
    throw InputError("encoder expects images with " +
                     std::to_string(spec_.input.size()) + " entries, got " +
                     std::to_string(images.rows()));
  return net_.forward(images);
}

TensorMap Encoder::tensors(const std::string& prefix) const {
  TensorMap out;
  const auto params = net_.parameters();
  for (std::size_t i = 0; i < params.size(); ++i)
    out[prefix + "p" + std::to_string(i)] = *params[i];
  return out;
}

void Encoder::load_tensors(const TensorMap& tensors, const std::string& prefix) {
  auto params = net_.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string name = prefix + "p" + std::to_string(i);
    auto it = tensors.find(name);
    if (it == tensors.end()) throw IoError("missing tensor " + name);
    if (it->second.rows() != params[i]->rows() || it->second.cols() != params[i]->cols())
      throw IoError("tensor " + name + " has the wrong shape");
    *params[i] = it->second;
  }
}

Mat encode(const Encoder& encoder, const Mat& images) { return encoder.encode(images); }

VariationPass VariationPass::run(const Encoder& encoder, const Generator& generator,
                                 const Navigator& navigator,
                                 std::span<const VariationSlot> slots,
                                 VariationMode mode) {
  if (slots.empty()) throw InputError("variation pass over an empty slot list");
  if (navigator.latent_dim() != generator.latent_dim())
    throw ConfigError("navigator latent_dim does not match the generator");
  if (encoder.spec().input != generator.image_shape())
    throw InputError("encoder input shape does not match the generator image shape");

  VariationPass pass;
  pass.encoder_ = &encoder;
  pass.generator_ = &generator;
  pass.navigator_ = &navigator;
  pass.mode_ = mode;

  const auto count = static_cast<Eigen::Index>(slots.size());
  Mat base(generator.latent_dim(), count);
  pass.shifted_latents_.resize(generator.latent_dim(), count);
  std::vector<LatentCode> checked;
  checked.reserve(slots.size());
  for (Eigen::Index i = 0; i < count; ++i) {
    const VariationSlot& slot = slots[static_cast<std::size_t>(i)];
    if (!(std::abs(slot.eps) > 0.0)) throw InputError("variation needs |eps| > 0");
    checked.push_back(slot.z);
    base.col(i) = slot.z.values;
    pass.shifted_latents_.col(i) = slot.z.values + navigator.shift(slot.direction, slot.eps);
    pass.directions_.push_back(slot.direction);
    pass.eps_.push_back(slot.eps);
  }
  const Mat base_images = generator.generate(checked);  // validates tags and values
  if (!pass.shifted_latents_.allFinite()) throw InputError("shifted latent is not finite");
  const Mat shifted_images = generator.render(pass.shifted_latents_);

  Mat stacked(base_images.rows(), 2 * count);
  stacked << shifted_images, base_images;
  if (stacked.rows() != encoder.spec().input.size())
    throw InputError("generator images do not match the encoder input");
  pass.tape_ = encoder.network().forward_tape(stacked);
  const Mat& codes = pass.tape_.values.back();
  const Eigen::Index n = codes.rows();

  if (mode == VariationMode::difference) {
    const Mat diff = codes.leftCols(count) - codes.rightCols(count);
    pass.raw_ = diff.cwiseAbs();
    pass.signs_ = diff.unaryExpr([](double v) {
      return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    });
  } else {
    pass.raw_.resize(2 * n, count);
    pass.raw_ << codes.leftCols(count), codes.rightCols(count);
  }

  pass.norms_ = pass.raw_.colwise().norm().transpose();
  pass.vectors_ = Mat::Zero(pass.raw_.rows(), count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(pass.norms_(i) > kDegenerateNorm)) {
      pass.degenerate_.push_back(static_cast<int>(i));
      continue;
    }
    pass.vectors_.col(i) = pass.raw_.col(i) / pass.norms_(i);
  }
  return pass;
}

void VariationPass::backward(const Mat& grad_vectors, nn::Gradients* encoder_grads,
                             Navigator::Gradients* navigator_grads) const {
  const Eigen::Index count = vectors_.cols();
  if (grad_vectors.rows() != vectors_.rows() || grad_vectors.cols() != count)
    throw InputError("gradient shape does not match the variation vectors");

  // Through the normalization.
  Mat grad_raw = Mat::Zero(raw_.rows(), count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(norms_(i) > kDegenerateNorm)) continue;
    const auto v = vectors_.col(i);
    const auto g = grad_vectors.col(i);
    grad_raw.col(i) = (g - v * v.dot(g)) / norms_(i);
  }

  const Eigen::Index n = tape_.values.back().rows();
  Mat grad_codes(n, 2 * count);
  if (mode_ == VariationMode::difference) {
    const Mat grad_diff = grad_raw.cwiseProduct(signs_);
    grad_codes << grad_diff, -grad_diff;
  } else {
    grad_codes << grad_raw.topRows(n), grad_raw.bottomRows(n);
  }

  const Mat grad_images = encoder_->network().backward(tape_, grad_codes, encoder_grads);
  if (navigator_grads == nullptr) return;
  // Only the shifted half depends on the navigator.
  const Mat grad_shift =
      generator_->render_vjp(shifted_latents_, grad_images.leftCols(count));
  for (Eigen::Index i = 0; i < count; ++i)
    navigator_->shift_backward(directions_[static_cast<std::size_t>(i)],
                               eps_[static_cast<std::size_t>(i)],
                               grad_shift.col(i), *navigator_grads);
}

namespace {

Vec single_slot(const Encoder& encoder, const Generator& generator,
                const Navigator& navigator, const LatentCode& z, int d, double eps,
                VariationMode mode) {
  const VariationSlot slot{z, d, eps};
  const VariationPass pass =
      VariationPass::run(encoder, generator, navigator, {&slot, 1}, mode);
  if (!pass.degenerate_slots().empty())
    throw DegenerateError("variation vanished: encodings are identical");
  return pass.vectors().col(0);
}

}  // namespace

Vec variation(const Encoder& encoder, const Generator& generator,
              const Navigator& navigator, const LatentCode& z, int d, double eps) {
  return single_slot(encoder, generator, navigator, z, d, eps,
                     VariationMode::difference);
}

Vec concat_variation(const Encoder& encoder, const Generator& generator,
                     const Navigator& navigator, const LatentCode& z, int d,
                     double eps) {
  return single_slot(encoder, generator, navigator, z, d, eps,
                     VariationMode::concatenation);
}

}  // namespace disco
