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

// Named tensors on disk: one flat little-endian float64 file per tensor,
// row-major, with shape metadata kept in a JSON manifest entry.

#ifndef DISCO_TENSOR_IO_HPP_
#define DISCO_TENSOR_IO_HPP_

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "disco/common.hpp"

namespace disco {

using TensorMap = std::map<std::string, Mat>;

void write_tensor_file(const std::filesystem::path& path, const Mat& m);
Mat read_tensor_file(const std::filesystem::path& path, Eigen::Index rows,
                     Eigen::Index cols);

// Writes every tensor into `dir` and returns the manifest entries
// [{name, file, shape: [rows, cols], dtype: "float64", byte_order: "little",
//   layout: "row_major"}].
nlohmann::json write_tensors(const std::filesystem::path& dir,
                             const TensorMap& tensors);
TensorMap read_tensors(const std::filesystem::path& dir,
                       const nlohmann::json& entries);

}  // namespace disco

#endif  // DISCO_TENSOR_IO_HPP_
