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

#include "disco/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace disco {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "tensor files are written in host byte order");

void write_tensor_file(const fs::path& path, const Mat& m) {
  std::vector<double> row_major(static_cast<std::size_t>(m.size()));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) row_major[k++] = m(r, c);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(row_major.data()),
            static_cast<std::streamsize>(row_major.size() * sizeof(double)));
  if (!out) throw IoError("short write to " + path.string());
}

Mat read_tensor_file(const fs::path& path, Eigen::Index rows,
                     Eigen::Index cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  const auto expected = static_cast<std::size_t>(rows * cols) * sizeof(double);
  if (bytes != expected)
    throw IoError(path.string() + ": expected " + std::to_string(expected) +
                  " bytes, found " + std::to_string(bytes));
  in.seekg(0);
  std::vector<double> buf(static_cast<std::size_t>(rows * cols));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(expected));
  if (!in) throw IoError("short read from " + path.string());
  Mat m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = buf[k++];
  return m;
}

nlohmann::json write_tensors(const fs::path& dir, const TensorMap& tensors) {
  fs::create_directories(dir);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [name, value] : tensors) {
    const std::string file = name + ".bin";
    write_tensor_file(dir / file, value);
    entries.push_back({{"name", name},
                       {"file", file},
                       {"shape", {value.rows(), value.cols()}},
                       {"dtype", "float64"},
                       {"byte_order", "little"},
                       {"layout", "row_major"}});
  }
  return entries;
}

TensorMap read_tensors(const fs::path& dir, const nlohmann::json& entries) {
  if (!entries.is_array()) throw IoError("tensor list must be an array");
  TensorMap out;
  for (const auto& e : entries) {
    try {
      const auto name = e.at("name").get<std::string>();
      const auto file = e.at("file").get<std::string>();
      const auto shape = e.at("shape");
      if (e.value("dtype", "float64") != "float64")
        throw IoError("tensor " + name + ": only float64 is supported");
      if (file.find('/') != std::string::npos || file.find("..") != std::string::npos)
        throw IoError("tensor " + name + ": file must be a bare name");
      out[name] = read_tensor_file(dir / file, shape.at(0).get<Eigen::Index>(),
                                   shape.at(1).get<Eigen::Index>());
    } catch (const nlohmann::json::exception& ex) {
      throw IoError(std::string("malformed tensor entry: ") + ex.what());
    }
  }
  return out;
}

}  // namespace disco
