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

#ifndef DISCO_NAVIGATOR_HPP_
#define DISCO_NAVIGATOR_HPP_

#include <string>
#include <vector>

#include "disco/common.hpp"
#include "disco/tensor_io.hpp"

namespace disco {

enum class NavigatorKind { unit_columns, orthonormal, mlp3 };

std::string to_string(NavigatorKind k);
NavigatorKind navigator_kind_from_string(const std::string& s);

// Learnable map from (direction index d, shift eps) to a latent displacement
// A(eps * e_d). Linear kinds hold a latent_dim x D matrix whose columns are
// the directions. mlp3 is three bias-free dense layers (D -> latent_dim ->
// latent_dim -> latent_dim) with tanh on the two hidden layers.
class Navigator {
 public:
  struct Gradients {
    std::vector<Mat> values;  // same order as parameters()
  };

  Navigator(NavigatorKind kind, int directions, int latent_dim);

  NavigatorKind kind() const { return kind_; }
  int directions() const { return directions_; }
  int latent_dim() const { return latent_dim_; }
  bool is_linear() const { return kind_ != NavigatorKind::mlp3; }

  // Directions are 0-based. Throws InputError when d is out of range or eps
  // is not finite.
  Vec shift(int d, double eps) const;

  // Adds d(loss)/d(params) for one shift given d(loss)/d(shift).
  void shift_backward(int d, double eps, const Vec& grad_shift,
                      Gradients& grads) const;

  std::vector<Mat*> parameters();
  std::vector<const Mat*> parameters() const;
  std::vector<std::string> parameter_names() const;
  Gradients zero_gradients() const;

  // Linear kinds only.
  const Mat& matrix() const;
  void set_matrix(Mat m);

  TensorMap tensors(const std::string& prefix) const;
  void load_tensors(const TensorMap& tensors, const std::string& prefix);

 private:
  NavigatorKind kind_;
  int directions_;
  int latent_dim_;
  // Linear kinds use layers_[0] as the direction matrix.
  std::vector<Mat> layers_;
};

// unit_columns: each column rescaled to unit norm (DegenerateError on a zero
// column). orthonormal: nearest matrix with orthonormal columns (polar
// factor). Throws UnsupportedError for mlp3.
Navigator project_constraints(const Navigator& navigator);
void project_constraints_in_place(Navigator& navigator);

// Random init followed by the constraint projection for linear kinds.
// ConfigError when an orthonormal navigator asks for D > latent_dim.
Navigator init_navigator(NavigatorKind kind, int directions, int latent_dim,
                         Rng& rng);

// Largest violation of the declared column constraint (0 for mlp3).
double constraint_violation(const Navigator& navigator);

}  // namespace disco

#endif  // DISCO_NAVIGATOR_HPP_
