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


// Shared fixtures for the unit tests.

#ifndef DISCO_TESTS_SUPPORT_HPP_
#define DISCO_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "disco/common.hpp"
#include "disco/contrastor.hpp"
#include "disco/gen_backend.hpp"
#include "disco/navigator.hpp"

namespace disco::testing {

// G(z) = z, laid out as a dim x 1 x 1 image.
class IdentityGenerator final : public Generator {
 public:
  explicit IdentityGenerator(int dim, LatentSpace space = LatentSpace::Z)
      : Generator(GeneratorKind::external_adapter, dim, space, ImageShape{dim, 1, 1},
                  LatentPrior::standard_normal, 0) {}

  Mat render(const Mat& latents) const override { return latents; }
  Mat render_vjp(const Mat&, const Mat& grad_images) const override { return grad_images; }
  std::uint64_t parameter_hash() const override { return 42; }
};

// Bias-free linear encoder whose weight is the identity.
inline Encoder identity_encoder(int dim) {
  EncoderSpec spec;
  spec.preset = EncoderPreset::linear;
  spec.output_dim = dim;
  spec.input = {dim, 1, 1};
  spec.bias = false;
  Rng rng(0);
  Encoder e(spec, rng);
  e.network().layers()[0].weight = Mat::Identity(dim, dim);
  return e;
}

inline Navigator identity_navigator(int dim) {
  Navigator nav(NavigatorKind::unit_columns, dim, dim);
  nav.set_matrix(Mat::Identity(dim, dim));
  return nav;
}

inline Mat random_unit_columns(int rows, int cols, Rng& rng, bool non_negative = false) {
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double v = standard_normal(rng);
      m(i, j) = non_negative ? std::abs(v) : v;
    }
    m.col(j).normalize();
  }
  return m;
}

// Relative error with a small floor so entries that are zero in both
// estimates do not divide by zero.
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / scale;
}

inline constexpr double kFiniteStep = 1e-5;

// Central difference of f with respect to *x.
inline double central_difference(double* x, const std::function<double()>& f,
                                  double h = kFiniteStep) {
  const double saved = *x;
  *x = saved + h;
  const double up = f();
  *x = saved - h;
  const double down = f();
  *x = saved;
  return (up - down) / (2.0 * h);
}

// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("disco_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace disco::testing

#endif  // DISCO_TESTS_SUPPORT_HPP_
