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


#include "disco/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <png.h>

namespace disco {

Image8 to_image8(const Eigen::Ref<const Vec>& pixels, const ImageShape& shape) {
  if (pixels.size() != shape.size())
    throw InputError("pixel count does not match the image shape");
  if (shape.channels != 1 && shape.channels != 3)
    throw InputError("only 1- and 3-channel images are supported");
  Image8 out{shape, std::vector<std::uint8_t>(static_cast<std::size_t>(shape.size()))};
  for (Eigen::Index i = 0; i < pixels.size(); ++i) {
    const double x = std::isfinite(pixels(i)) ? std::clamp(pixels(i), 0.0, 1.0) : 0.0;
    out.data[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(std::lround(x * 255.0));
  }
  return out;
}

Vec from_image8(const Image8& image) {
  Vec v(static_cast<Eigen::Index>(image.data.size()));
  for (std::size_t i = 0; i < image.data.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = image.data[i] / 255.0;
  return v;
}

void write_png(const std::filesystem::path& path, const Image8& image) {
  const ImageShape& s = image.shape;
  if (s.channels != 1 && s.channels != 3)
    throw IoError("only 1- and 3-channel images can be written");
  if (image.data.size() != static_cast<std::size_t>(s.size()))
    throw IoError("image buffer does not match its shape");
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(s.width);
  img.height = static_cast<png_uint_32>(s.height);
  img.format = s.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot write " + path.string() + ": " + msg);
  }
}

Image8 read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw IoError("cannot read " + path.string() + ": " + img.message);
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  Image8 out;
  out.shape = {static_cast<int>(img.height), static_cast<int>(img.width), color ? 3 : 1};
  out.data.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot decode " + path.string() + ": " + msg);
  }
  return out;
}

}  // namespace disco
