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

// Bagged CART regression trees with mean-decrease-in-impurity importances.
// Every feature is scanned at every split, which keeps the importances
// invariant to a reordering of the feature columns.

#ifndef DISCO_FOREST_HPP_
#define DISCO_FOREST_HPP_

#include <cstdint>
#include <vector>

#include "disco/common.hpp"

namespace disco {

struct ForestConfig {
  int trees = 10;
  int max_depth = 8;
  int min_leaf = 5;
  std::uint64_t seed = 0;
};

class RegressionForest {
 public:
  // `features` is S x F, `target` has S entries.
  static RegressionForest fit(const Mat& features, const Vec& target,
                              const ForestConfig& config);

  double predict(const Eigen::Ref<const Vec>& x) const;

  // Total weighted variance reduction attributed to each feature, averaged
  // over trees (unnormalized).
  const Vec& importances() const { return importances_; }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
  };
  struct Tree {
    std::vector<Node> nodes;
  };

  std::vector<Tree> trees_;
  Vec importances_;

  friend class TreeBuilder;
};

}  // namespace disco

#endif  // DISCO_FOREST_HPP_
