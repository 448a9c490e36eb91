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


// 8-bit PNG encode/decode for image grids, heatmaps and dataset images.
// Pixels are HWC-flattened doubles in [0, 1].

#ifndef DISCO_PNG_IO_HPP_
#define DISCO_PNG_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "disco/common.hpp"
#include "disco/gen_backend.hpp"

namespace disco {

struct Image8 {
  ImageShape shape;                // channels 1 (gray) or 3 (RGB)
  std::vector<std::uint8_t> data;  // HWC
};

// Rounds clamp(x, 0, 1) * 255.
Image8 to_image8(const Eigen::Ref<const Vec>& pixels, const ImageShape& shape);
Vec from_image8(const Image8& image);

// Both throw IoError on failure.
void write_png(const std::filesystem::path& path, const Image8& image);
Image8 read_png(const std::filesystem::path& path);

}  // namespace disco

#endif  // DISCO_PNG_IO_HPP_
