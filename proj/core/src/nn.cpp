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

#include "disco/nn.hpp"

#include <cmath>

namespace disco::nn {
namespace {

constexpr double kLeakySlope = 0.2;

double activation_derivative(Activation a, double input, double output) {
  switch (a) {
    case Activation::identity:
      return 1.0;
    case Activation::leaky_relu:
      return input > 0.0 ? 1.0 : kLeakySlope;
    case Activation::tanh:
      return 1.0 - output * output;
    case Activation::sigmoid:
      return output * (1.0 - output);
  }
  return 1.0;
}

// Columns of `patches` are output positions, rows are (ky, kx, c).
void im2col(const ConvGeometry& g, const double* image, Mat& patches) {
  const int oh = g.out_h();
  const int ow = g.out_w();
  patches.setZero(g.patch_size(), oh * ow);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int col = oy * ow + ox;
      for (int ky = 0; ky < g.kernel; ++ky) {
        const int iy = oy * g.stride - g.pad + ky;
        if (iy < 0 || iy >= g.in_h) continue;
        for (int kx = 0; kx < g.kernel; ++kx) {
          const int ix = ox * g.stride - g.pad + kx;
          if (ix < 0 || ix >= g.in_w) continue;
          const double* src = image + (iy * g.in_w + ix) * g.in_c;
          const int row = (ky * g.kernel + kx) * g.in_c;
          for (int c = 0; c < g.in_c; ++c) patches(row + c, col) = src[c];
        }
      }
    }
  }
}

void col2im_add(const ConvGeometry& g, const Mat& patches, double* image) {
  const int oh = g.out_h();
  const int ow = g.out_w();
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int col = oy * ow + ox;
      for (int ky = 0; ky < g.kernel; ++ky) {
        const int iy = oy * g.stride - g.pad + ky;
        if (iy < 0 || iy >= g.in_h) continue;
        for (int kx = 0; kx < g.kernel; ++kx) {
          const int ix = ox * g.stride - g.pad + kx;
          if (ix < 0 || ix >= g.in_w) continue;
          double* dst = image + (iy * g.in_w + ix) * g.in_c;
          const int row = (ky * g.kernel + kx) * g.in_c;
          for (int c = 0; c < g.in_c; ++c) dst[c] += patches(row + c, col);
        }
      }
    }
  }
}

Mat random_weight(int rows, int cols, int fan_in, Rng& rng) {
  // He-style scale for leaky activations.
  const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
  Mat w(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) w(i, j) = scale * standard_normal(rng);
  return w;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity:
      return "identity";
    case Activation::leaky_relu:
      return "leaky_relu";
    case Activation::tanh:
      return "tanh";
    case Activation::sigmoid:
      return "sigmoid";
  }
  return "identity";
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "leaky_relu") return Activation::leaky_relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "sigmoid") return Activation::sigmoid;
  throw ConfigError("unknown activation '" + s + "'");
}

double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::identity:
      return x;
    case Activation::leaky_relu:
      return x > 0.0 ? x : kLeakySlope * x;
    case Activation::tanh:
      return std::tanh(x);
    case Activation::sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                      : std::exp(x) / (1.0 + std::exp(x));
  }
  return x;
}

int Layer::in_size() const {
  switch (type) {
    case Type::dense:
      return static_cast<int>(weight.cols());
    case Type::conv2d:
      return conv.in_size();
    case Type::activation:
      return -1;
  }
  return -1;
}

int Layer::out_size() const {
  switch (type) {
    case Type::dense:
      return static_cast<int>(weight.rows());
    case Type::conv2d:
      return conv.out_size();
    case Type::activation:
      return -1;
  }
  return -1;
}

void Network::add_dense(int in, int out, bool bias, Rng& rng) {
  if (in < 1 || out < 1) throw ConfigError("dense layer sizes must be positive");
  if (!empty() && out_size() > 0 && out_size() != in)
    throw ConfigError("dense layer input does not match the previous layer");
  Layer layer;
  layer.type = Layer::Type::dense;
  layer.weight = random_weight(out, in, in, rng);
  if (bias) layer.bias = Mat::Zero(out, 1);
  layers_.push_back(std::move(layer));
}

void Network::add_conv(const ConvGeometry& geometry, bool bias, Rng& rng) {
  if (geometry.out_h() <= 0 || geometry.out_w() <= 0)
    throw ConfigError("convolution output would be empty");
  if (!empty() && out_size() > 0 && out_size() != geometry.in_size())
    throw ConfigError("conv layer input does not match the previous layer");
  Layer layer;
  layer.type = Layer::Type::conv2d;
  layer.conv = geometry;
  layer.weight = random_weight(geometry.out_c, geometry.patch_size(),
                               geometry.patch_size(), rng);
  if (bias) layer.bias = Mat::Zero(geometry.out_c, 1);
  layers_.push_back(std::move(layer));
}

void Network::add_activation(Activation a) {
  Layer layer;
  layer.type = Layer::Type::activation;
  layer.activation = a;
  layers_.push_back(std::move(layer));
}

int Network::in_size() const {
  for (const Layer& l : layers_)
    if (l.has_params()) return l.in_size();
  return -1;
}

int Network::out_size() const {
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
    if (it->has_params()) return it->out_size();
  return -1;
}

Mat Network::forward(const Mat& x) const {
  Tape tape = forward_tape(x);
  return std::move(tape.values.back());
}

Network::Tape Network::forward_tape(const Mat& x) const {
  Tape tape;
  tape.values.reserve(layers_.size() + 1);
  tape.values.push_back(x);
  for (const Layer& layer : layers_) {
    const Mat& in = tape.values.back();
    Mat out;
    switch (layer.type) {
      case Layer::Type::dense:
        if (in.rows() != layer.weight.cols())
          throw InputError("dense layer input size mismatch");
        out = layer.weight * in;
        if (layer.bias.size() > 0) out.colwise() += layer.bias.col(0);
        break;
      case Layer::Type::conv2d: {
        const ConvGeometry& g = layer.conv;
        if (in.rows() != g.in_size())
          throw InputError("conv layer input size mismatch");
        out.resize(g.out_size(), in.cols());
        Mat patches;
        for (Eigen::Index s = 0; s < in.cols(); ++s) {
          im2col(g, in.col(s).data(), patches);
          Eigen::Map<Mat> o(out.col(s).data(), g.out_c, g.out_h() * g.out_w());
          o.noalias() = layer.weight * patches;
          if (layer.bias.size() > 0) o.colwise() += layer.bias.col(0);
        }
        break;
      }
      case Layer::Type::activation:
        out = in.unaryExpr(
            [a = layer.activation](double v) { return apply_activation(a, v); });
        break;
    }
    tape.values.push_back(std::move(out));
  }
  return tape;
}

Mat Network::backward(const Tape& tape, const Mat& grad_out,
                      Gradients* grads) const {
  Mat grad = grad_out;
  // Walk parameter slots in reverse alongside the layers.
  int slot = 0;
  for (const Layer& l : layers_)
    if (l.has_params()) slot += l.bias.size() > 0 ? 2 : 1;

  for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
    const Layer& layer = layers_[i];
    const Mat& in = tape.values[i];
    const Mat& out = tape.values[i + 1];
    switch (layer.type) {
      case Layer::Type::activation: {
        for (Eigen::Index c = 0; c < grad.cols(); ++c)
          for (Eigen::Index r = 0; r < grad.rows(); ++r)
            grad(r, c) *= activation_derivative(layer.activation, in(r, c),
                                                out(r, c));
        break;
      }
      case Layer::Type::dense: {
        const bool has_bias = layer.bias.size() > 0;
        slot -= has_bias ? 2 : 1;
        if (grads != nullptr) {
          (*grads)[slot].noalias() += grad * in.transpose();
          if (has_bias) (*grads)[slot + 1] += grad.rowwise().sum();
        }
        grad = layer.weight.transpose() * grad;
        break;
      }
      case Layer::Type::conv2d: {
        const ConvGeometry& g = layer.conv;
        const bool has_bias = layer.bias.size() > 0;
        slot -= has_bias ? 2 : 1;
        Mat grad_in = Mat::Zero(g.in_size(), grad.cols());
        Mat patches;
        Mat grad_patches;
        const int positions = g.out_h() * g.out_w();
        for (Eigen::Index s = 0; s < grad.cols(); ++s) {
          Eigen::Map<const Mat> go(grad.col(s).data(), g.out_c, positions);
          if (grads != nullptr) {
            im2col(g, in.col(s).data(), patches);
            (*grads)[slot].noalias() += go * patches.transpose();
            if (has_bias) (*grads)[slot + 1] += go.rowwise().sum();
          }
          grad_patches.noalias() = layer.weight.transpose() * go;
          col2im_add(g, grad_patches, grad_in.col(s).data());
        }
        grad = std::move(grad_in);
        break;
      }
    }
  }
  return grad;
}

std::vector<Mat*> Network::parameters() {
  std::vector<Mat*> out;
  for (Layer& l : layers_) {
    if (!l.has_params()) continue;
    out.push_back(&l.weight);
    if (l.bias.size() > 0) out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Mat*> Network::parameters() const {
  std::vector<const Mat*> out;
  for (const Layer& l : layers_) {
    if (!l.has_params()) continue;
    out.push_back(&l.weight);
    if (l.bias.size() > 0) out.push_back(&l.bias);
  }
  return out;
}

Gradients Network::zero_gradients() const {
  Gradients g;
  for (const Mat* p : parameters()) g.push_back(Mat::Zero(p->rows(), p->cols()));
  return g;
}

}  // namespace disco::nn
