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

// Minimal feed-forward network with hand-written reverse mode. Samples are
// matrix columns. Images are flattened height-major, channels last:
// index = (y * width + x) * channels + c.

#ifndef DISCO_NN_HPP_
#define DISCO_NN_HPP_

#include <string>
#include <vector>

#include "disco/common.hpp"

namespace disco::nn {

enum class Activation { identity, leaky_relu, tanh, sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct ConvGeometry {
  int in_h = 0;
  int in_w = 0;
  int in_c = 0;
  int out_c = 0;
  int kernel = 4;
  int stride = 2;
  int pad = 1;

  int out_h() const { return (in_h + 2 * pad - kernel) / stride + 1; }
  int out_w() const { return (in_w + 2 * pad - kernel) / stride + 1; }
  int in_size() const { return in_h * in_w * in_c; }
  int out_size() const { return out_h() * out_w() * out_c; }
  int patch_size() const { return kernel * kernel * in_c; }
};

struct Layer {
  enum class Type { dense, conv2d, activation };

  Type type = Type::dense;
  // dense: weight is out x in. conv2d: weight is out_c x (k*k*in_c).
  Mat weight;
  Mat bias;  // out x 1, empty when bias-free
  ConvGeometry conv;
  Activation activation = Activation::identity;

  int in_size() const;
  int out_size() const;
  bool has_params() const { return type != Type::activation; }
};

// Per-parameter gradient buffers, same order as Network::parameters().
using Gradients = std::vector<Mat>;

class Network {
 public:
  struct Tape {
    std::vector<Mat> values;  // values[0] is the input, values[i+1] the output of layer i
  };

  Network() = default;

  void add_dense(int in, int out, bool bias, Rng& rng);
  void add_conv(const ConvGeometry& geometry, bool bias, Rng& rng);
  void add_activation(Activation a);

  int in_size() const;
  int out_size() const;
  bool empty() const { return layers_.empty(); }

  Mat forward(const Mat& x) const;
  Tape forward_tape(const Mat& x) const;

  // Returns d(loss)/d(input) and adds parameter gradients into `grads`
  // (which may be null when only the input gradient is wanted).
  Mat backward(const Tape& tape, const Mat& grad_out, Gradients* grads) const;

  // Weight then bias for each parametrized layer.
  std::vector<Mat*> parameters();
  std::vector<const Mat*> parameters() const;
  Gradients zero_gradients() const;

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

 private:
  std::vector<Layer> layers_;
};

double apply_activation(Activation a, double x);

}  // namespace disco::nn

#endif  // DISCO_NN_HPP_
