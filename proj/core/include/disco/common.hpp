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

#ifndef DISCO_COMMON_HPP_
#define DISCO_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace disco {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// All randomness in the toolkit flows through explicitly passed engines so a
// run is a pure function of its seed. The engine state is serializable with
// operator<< / operator>>.
using Rng = std::mt19937_64;

// Error hierarchy. The CLI maps ConfigError to exit code 2 and every other
// Error to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A variation vector whose pre-normalization norm vanished.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class BatchError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss during optimization. `diagnostic` holds a JSON dump of the
// offending batch specification.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::string diagnostic)
      : Error(what), diagnostic_(std::move(diagnostic)) {}
  const std::string& diagnostic() const { return diagnostic_; }

 private:
  std::string diagnostic_;
};

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

// Uniform integer on [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// FNV-1a over raw bytes; used for parameter fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                           std::uint64_t seed = 1469598103934665603ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t hash_matrix(const Mat& m, std::uint64_t seed) {
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  seed = fnv1a(dims, sizeof(dims), seed);
  return fnv1a(m.data(), sizeof(double) * m.size(), seed);
}

}  // namespace disco

#endif  // DISCO_COMMON_HPP_
