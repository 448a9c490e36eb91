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


// File-emitting diagnostics: latent traversal grids, direction similarity
// matrices, per-dimension response profiles and 3D code scatter exports.
// Every output is a pure function of its inputs and seed.

#ifndef DISCO_EVALVIZ_HPP_
#define DISCO_EVALVIZ_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "disco/common.hpp"
#include "disco/contrastor.hpp"
#include "disco/gen_backend.hpp"
#include "disco/navigator.hpp"
#include "disco/png_io.hpp"

namespace disco {

// Grid layout: row-major cells, 2 white pixels between cells and around the
// border.
inline constexpr int kGridGutter = 2;

// Row r, column c shows G(z_r + A(eps_c e_d)). Throws InputError on empty
// rows or steps.
Image8 render_traversal_grid(const Generator& generator, const Navigator& navigator,
                             std::span<const LatentCode> rows, int direction,
                             const std::vector<double>& eps_steps);
void traversal_grid(const Generator& generator, const Navigator& navigator,
                    std::span<const LatentCode> rows, int direction,
                    const std::vector<double>& eps_steps,
                    const std::filesystem::path& out_png);

inline constexpr int kMinSimilaritySamples = 16;

// n x D matrix whose column d is the mean of `samples` variation vectors of
// direction d, with latents from the prior and shifts uniform on
// [-eps_bar, eps_bar]. Degenerate draws are skipped; a direction with no
// usable draw keeps a zero column. ConfigError when samples < 16.
Mat mean_variation_vectors(const Encoder& encoder, const Generator& generator,
                           const Navigator& navigator, int samples, double eps_bar,
                           Rng& rng);

// D x D cosine similarities of the columns. Entries involving a column of
// (near) zero norm are NaN, meaning missing. The diagonal of every other
// column is exactly 1.
Mat similarity_from_means(const Mat& means);

Mat direction_similarity_matrix(const Encoder& encoder, const Generator& generator,
                                const Navigator& navigator, int samples, double eps_bar,
                                std::uint64_t seed);

// CSV with header d_0..d_{D-1}; missing entries are written as "missing".
void write_similarity_csv(const std::filesystem::path& path, const Mat& similarity);
// Cells of `cell` pixels, gray level = similarity clamped to [0, 1], missing
// entries red.
Image8 similarity_heatmap(const Mat& similarity, int cell = 8);

// steps x (1 + n): the swept factor value followed by |E(x_t) - E(x_0)| per
// code dimension. Other factors sit at `base_value`. Oracle generators only
// (ConfigError otherwise).
Mat variation_response_profile(const Encoder& encoder, const Generator& generator,
                               int factor, int steps, double base_value = 0.5);
void write_profile_csv(const std::filesystem::path& path, const Mat& profile);

// For each requested factor, the code dimension with the largest mutual
// information in an n x K matrix (see MigResult::mutual_information).
std::array<int, 3> scatter_dimensions(const Mat& mutual_information,
                                      const std::array<int, 3>& factors);

// resolution^3 rows: the three factor values followed by the three selected
// code values. Other factors sit at 0.5. ConfigError when the generator has
// fewer than 3 factors or is not an oracle.
Mat latent_scatter(const Encoder& encoder, const Generator& generator,
                   const std::array<int, 3>& factors, const std::array<int, 3>& dims,
                   int resolution = 10);
void write_scatter_csv(const std::filesystem::path& path, const Mat& points,
                       const std::array<int, 3>& factors, const std::array<int, 3>& dims);

}  // namespace disco

#endif  // DISCO_EVALVIZ_HPP_
