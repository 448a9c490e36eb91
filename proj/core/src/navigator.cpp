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

#include "disco/navigator.hpp"

#include <cmath>

namespace disco {

std::string to_string(NavigatorKind k) {
  switch (k) {
    case NavigatorKind::unit_columns:
      return "unit_columns";
    case NavigatorKind::orthonormal:
      return "orthonormal";
    case NavigatorKind::mlp3:
      return "mlp3";
  }
  return "?";
}

NavigatorKind navigator_kind_from_string(const std::string& s) {
  if (s == "unit_columns") return NavigatorKind::unit_columns;
  if (s == "orthonormal") return NavigatorKind::orthonormal;
  if (s == "mlp3") return NavigatorKind::mlp3;
  throw ConfigError("unknown navigator kind '" + s + "'");
}

Navigator::Navigator(NavigatorKind kind, int directions, int latent_dim)
    : kind_(kind), directions_(directions), latent_dim_(latent_dim) {
  if (directions < 1 || latent_dim < 1)
    throw ConfigError("navigator needs D >= 1 and latent_dim >= 1");
  if (is_linear()) {
    layers_.push_back(Mat::Zero(latent_dim, directions));
  } else {
    layers_.push_back(Mat::Zero(latent_dim, directions));
    layers_.push_back(Mat::Zero(latent_dim, latent_dim));
    layers_.push_back(Mat::Zero(latent_dim, latent_dim));
  }
}

Vec Navigator::shift(int d, double eps) const {
  if (d < 0 || d >= directions_)
    throw InputError("direction index " + std::to_string(d) + " outside [0, " +
                     std::to_string(directions_) + ")");
  if (!std::isfinite(eps)) throw InputError("shift scalar must be finite");
  if (is_linear()) return eps * layers_[0].col(d);
  const Vec h1 = (eps * layers_[0].col(d)).array().tanh();
  const Vec h2 = (layers_[1] * h1).array().tanh();
  return layers_[2] * h2;
}

void Navigator::shift_backward(int d, double eps, const Vec& grad_shift,
                               Gradients& grads) const {
  if (is_linear()) {
    grads.values[0].col(d) += eps * grad_shift;
    return;
  }
  const Vec a1 = eps * layers_[0].col(d);
  const Vec h1 = a1.array().tanh();
  const Vec h2 = (layers_[1] * h1).array().tanh();
  grads.values[2] += grad_shift * h2.transpose();
  const Vec g2 = (layers_[2].transpose() * grad_shift).cwiseProduct(
      (1.0 - h2.array().square()).matrix());
  grads.values[1] += g2 * h1.transpose();
  const Vec g1 = (layers_[1].transpose() * g2).cwiseProduct(
      (1.0 - h1.array().square()).matrix());
  // a1 = eps * W1 e_d, so only column d of W1 receives gradient.
  grads.values[0].col(d) += eps * g1;
}

std::vector<Mat*> Navigator::parameters() {
  std::vector<Mat*> out;
  for (Mat& m : layers_) out.push_back(&m);
  return out;
}

std::vector<const Mat*> Navigator::parameters() const {
  std::vector<const Mat*> out;
  for (const Mat& m : layers_) out.push_back(&m);
  return out;
}

std::vector<std::string> Navigator::parameter_names() const {
  if (is_linear()) return {"matrix"};
  return {"w1", "w2", "w3"};
}

Navigator::Gradients Navigator::zero_gradients() const {
  Gradients g;
  for (const Mat& m : layers_) g.values.push_back(Mat::Zero(m.rows(), m.cols()));
  return g;
}

const Mat& Navigator::matrix() const {
  if (!is_linear()) throw UnsupportedError("mlp3 navigator has no direction matrix");
  return layers_[0];
}

void Navigator::set_matrix(Mat m) {
  if (!is_linear()) throw UnsupportedError("mlp3 navigator has no direction matrix");
  if (m.rows() != latent_dim_ || m.cols() != directions_)
    throw InputError("navigator matrix has the wrong shape");
  layers_[0] = std::move(m);
}

TensorMap Navigator::tensors(const std::string& prefix) const {
  TensorMap out;
  const auto names = parameter_names();
  for (std::size_t i = 0; i < layers_.size(); ++i) out[prefix + names[i]] = layers_[i];
  return out;
}

void Navigator::load_tensors(const TensorMap& tensors, const std::string& prefix) {
  const auto names = parameter_names();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto it = tensors.find(prefix + names[i]);
    if (it == tensors.end()) throw IoError("missing tensor " + prefix + names[i]);
    if (it->second.rows() != layers_[i].rows() || it->second.cols() != layers_[i].cols())
      throw IoError("tensor " + prefix + names[i] + " has the wrong shape");
    layers_[i] = it->second;
  }
}

void project_constraints_in_place(Navigator& navigator) {
  if (!navigator.is_linear())
    throw UnsupportedError("project_constraints applies to linear navigators only");
  Mat m = navigator.matrix();
  if (navigator.kind() == NavigatorKind::unit_columns) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double norm = m.col(j).norm();
      if (!(norm > 0.0) || !std::isfinite(norm))
        throw DegenerateError("navigator column " + std::to_string(j) +
                              " has zero norm");
      m.col(j) /= norm;
    }
  } else {
    // Polar factor U V^T of the thin SVD.
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() <= 0.0)
      throw DegenerateError("navigator matrix is rank deficient");
    m = svd.matrixU() * svd.matrixV().transpose();
  }
  navigator.set_matrix(std::move(m));
}

Navigator project_constraints(const Navigator& navigator) {
  Navigator out = navigator;
  project_constraints_in_place(out);
  return out;
}

Navigator init_navigator(NavigatorKind kind, int directions, int latent_dim, Rng& rng) {
  if (kind == NavigatorKind::orthonormal && directions > latent_dim)
    throw ConfigError("orthonormal navigator needs D <= latent_dim (D = " +
                      std::to_string(directions) +
                      ", latent_dim = " + std::to_string(latent_dim) + ")");
  Navigator nav(kind, directions, latent_dim);
  for (Mat* p : nav.parameters()) {
    const double scale = kind == NavigatorKind::mlp3
                             ? 1.0 / std::sqrt(static_cast<double>(p->cols()))
                             : 1.0;
    for (Eigen::Index j = 0; j < p->cols(); ++j)
      for (Eigen::Index i = 0; i < p->rows(); ++i)
        (*p)(i, j) = scale * standard_normal(rng);
  }
  if (nav.is_linear()) project_constraints_in_place(nav);
  return nav;
}

double constraint_violation(const Navigator& navigator) {
  if (!navigator.is_linear()) return 0.0;
  const Mat& m = navigator.matrix();
  if (navigator.kind() == NavigatorKind::unit_columns)
    return (m.colwise().norm().array() - 1.0).abs().maxCoeff();
  return (m.transpose() * m - Mat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

}  // namespace disco
