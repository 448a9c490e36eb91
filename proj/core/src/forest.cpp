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

#include "disco/forest.hpp"

#include <algorithm>
#include <numeric>

namespace disco {

class TreeBuilder {
 public:
  TreeBuilder(const Mat& x, const Vec& y, const ForestConfig& config, Vec& importances)
      : x_(x), y_(y), config_(config), importances_(importances) {}

  RegressionForest::Tree build(std::vector<int> rows) {
    RegressionForest::Tree tree;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  struct Split {
    std::vector<int> features;  // every feature inducing the chosen partition
    double threshold = 0.0;     // for features.front()
    double gain = 0.0;
  };

  // Gains closer than this (relative) are treated as equal.
  static constexpr double kTieTolerance = 1e-9;

  int grow(RegressionForest::Tree& tree, std::vector<int>& rows, int depth) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum = 0.0;
    for (int r : rows) sum += y_(r);
    tree.nodes[static_cast<std::size_t>(index)].value =
        sum / static_cast<double>(rows.size());

    if (depth >= config_.max_depth ||
        static_cast<int>(rows.size()) < 2 * config_.min_leaf)
      return index;
    const Split split = best_split(rows);
    if (split.features.empty() || !(split.gain > 0.0)) return index;

    // Features that cut the node identically share the credit, so the
    // importances do not depend on column order.
    for (int f : split.features)
      importances_(f) += split.gain / static_cast<double>(split.features.size());
    const int feature = split.features.front();
    std::vector<int> left;
    std::vector<int> right;
    for (int r : rows) (x_(r, feature) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[static_cast<std::size_t>(index)].feature = feature;
    tree.nodes[static_cast<std::size_t>(index)].threshold = split.threshold;
    const int l = grow(tree, left, depth + 1);
    const int r = grow(tree, right, depth + 1);
    tree.nodes[static_cast<std::size_t>(index)].left = l;
    tree.nodes[static_cast<std::size_t>(index)].right = r;
    return index;
  }

  struct Candidate {
    double gain = 0.0;
    double threshold = 0.0;
  };

  // Best threshold on one feature. Gain is the reduction in summed squared
  // error (n * variance).
  Candidate best_on_feature(const std::vector<int>& rows, Eigen::Index f,
                            double total) const {
    std::vector<int> order(rows);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double xa = x_(a, f);
      const double xb = x_(b, f);
      return xa < xb || (xa == xb && a < b);
    });
    const auto n = static_cast<double>(rows.size());
    Candidate best;
    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      left_sum += y_(order[i]);
      const double xv = x_(order[i], f);
      const double next = x_(order[i + 1], f);
      const auto nl = static_cast<double>(i + 1);
      const double nr = n - nl;
      if (xv == next || nl < config_.min_leaf || nr < config_.min_leaf) continue;
      const double right_sum = total - left_sum;
      const double gap = left_sum / nl - right_sum / nr;
      const double gain = nl * nr / n * gap * gap;
      if (gain > best.gain) {
        best.gain = gain;
        best.threshold = 0.5 * (xv + next);
      }
    }
    return best;
  }

  // Row indices going left, in canonical order.
  std::vector<int> left_set(const std::vector<int>& rows, int f, double threshold) const {
    std::vector<int> out;
    for (int r : rows)
      if (x_(r, f) <= threshold) out.push_back(r);
    std::sort(out.begin(), out.end());
    return out;
  }

  Split best_split(const std::vector<int>& rows) const {
    double total = 0.0;
    for (int r : rows) total += y_(r);
    std::vector<Candidate> candidates;
    double top = 0.0;
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      candidates.push_back(best_on_feature(rows, f, total));
      top = std::max(top, candidates.back().gain);
    }
    Split best;
    if (!(top > 0.0)) return best;
    std::vector<int> tied;
    for (int f = 0; f < static_cast<int>(candidates.size()); ++f)
      if (candidates[static_cast<std::size_t>(f)].gain >= top * (1.0 - kTieTolerance))
        tied.push_back(f);
    // Among near-equal gains keep the largest; exact ties go to the
    // lexicographically smallest partition so column order never matters.
    int lead = tied.front();
    std::vector<int> partition =
        left_set(rows, lead, candidates[static_cast<std::size_t>(lead)].threshold);
    for (int f : tied) {
      const double g = candidates[static_cast<std::size_t>(f)].gain;
      const double lead_gain = candidates[static_cast<std::size_t>(lead)].gain;
      if (g < lead_gain) continue;
      std::vector<int> mine = left_set(rows, f, candidates[static_cast<std::size_t>(f)].threshold);
      if (g > lead_gain || mine < partition) {
        lead = f;
        partition = std::move(mine);
      }
    }
    // Features that reproduce the chosen partition exactly join the split.
    for (int f : tied)
      if (f == lead ||
          left_set(rows, f, candidates[static_cast<std::size_t>(f)].threshold) == partition)
        best.features.push_back(f);
    best.threshold = candidates[static_cast<std::size_t>(lead)].threshold;
    std::swap(*std::find(best.features.begin(), best.features.end(), lead),
              best.features.front());
    best.gain = candidates[static_cast<std::size_t>(lead)].gain;
    return best;
  }

  const Mat& x_;
  const Vec& y_;
  const ForestConfig& config_;
  Vec& importances_;
};

RegressionForest RegressionForest::fit(const Mat& features, const Vec& target,
                                       const ForestConfig& config) {
  if (features.rows() != target.size() || features.rows() < 2)
    throw MetricError("forest needs at least two aligned samples");
  if (config.trees < 1 || config.max_depth < 1 || config.min_leaf < 1)
    throw ConfigError("forest trees, depth and min_leaf must be >= 1");
  if (!features.allFinite() || !target.allFinite())
    throw MetricError("forest inputs must be finite");

  RegressionForest forest;
  forest.importances_ = Vec::Zero(features.cols());
  Rng rng(config.seed);
  const int s = static_cast<int>(features.rows());
  for (int t = 0; t < config.trees; ++t) {
    std::vector<int> rows(static_cast<std::size_t>(s));
    for (int& r : rows) r = uniform_int(rng, 0, s - 1);
    TreeBuilder builder(features, target, config, forest.importances_);
    forest.trees_.push_back(builder.build(std::move(rows)));
  }
  forest.importances_ /= static_cast<double>(config.trees);
  return forest;
}

double RegressionForest::predict(const Eigen::Ref<const Vec>& x) const {
  double sum = 0.0;
  for (const Tree& tree : trees_) {
    int i = 0;
    while (tree.nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const Node& node = tree.nodes[static_cast<std::size_t>(i)];
      i = x(node.feature) <= node.threshold ? node.left : node.right;
    }
    sum += tree.nodes[static_cast<std::size_t>(i)].value;
  }
  return sum / static_cast<double>(trees_.size());
}

}  // namespace disco
