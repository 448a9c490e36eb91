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

#include "disco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

namespace disco {
namespace {

void check_aligned(const Mat& codes, const Mat& factors) {
  if (codes.rows() != factors.rows())
    throw InputError("codes and factors must have the same number of rows");
  if (codes.rows() < 2) throw InputError("metrics need at least two samples");
  if (codes.cols() < 1 || factors.cols() < 1)
    throw InputError("metrics need at least one code and one factor column");
  if (!codes.allFinite() || !factors.allFinite())
    throw InputError("codes and factors must be finite");
}

}  // namespace

std::vector<int> discretize(const Eigen::Ref<const Vec>& column, int bins) {
  if (bins < 2) throw ConfigError("discretize needs at least 2 bins");
  std::vector<int> out(static_cast<std::size_t>(column.size()), 0);
  if (column.size() == 0) return out;
  const double lo = column.minCoeff();
  const double hi = column.maxCoeff();
  if (!(hi > lo)) return out;
  const double width = (hi - lo) / bins;
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    const int b = static_cast<int>(std::floor((column(i) - lo) / width));
    out[static_cast<std::size_t>(i)] = std::clamp(b, 0, bins - 1);
  }
  return out;
}

double entropy_discrete(const std::vector<int>& x) {
  if (x.empty()) throw InputError("entropy of an empty sample");
  std::map<int, double> counts;
  for (int v : x) counts[v] += 1.0;
  const auto n = static_cast<double>(x.size());
  double h = 0.0;
  for (const auto& [v, c] : counts) h -= (c / n) * std::log(c / n);
  return h;
}

double mutual_info_discrete(const std::vector<int>& x, const std::vector<int>& y) {
  if (x.empty() || y.empty()) throw InputError("mutual information of an empty sample");
  if (x.size() != y.size()) throw InputError("mutual information inputs differ in length");
  std::map<int, double> px;
  std::map<int, double> py;
  std::map<std::pair<int, int>, double> pxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    px[x[i]] += 1.0;
    py[y[i]] += 1.0;
    pxy[{x[i], y[i]}] += 1.0;
  }
  // Terms c_xy/n * log(n c_xy / (c_x c_y)) are summed in sorted order so the
  // result is bitwise symmetric in (x, y).
  const auto n = static_cast<double>(x.size());
  std::vector<double> terms;
  terms.reserve(pxy.size());
  for (const auto& [key, c] : pxy)
    terms.push_back((c / n) * std::log(n * c / (px[key.first] * py[key.second])));
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double t : terms) mi += t;
  return std::max(mi, 0.0);
}

MigResult mig_detailed(const CodeMatrix& codes, const FactorMatrix& factors, int bins) {
  check_aligned(codes, factors);
  const Eigen::Index n = codes.cols();
  const Eigen::Index k = factors.cols();
  std::vector<std::vector<int>> code_bins;
  for (Eigen::Index j = 0; j < n; ++j) code_bins.push_back(discretize(codes.col(j), bins));

  MigResult result;
  result.mutual_information = Mat::Zero(n, k);
  result.per_factor.assign(static_cast<std::size_t>(k),
                           std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int used = 0;
  for (Eigen::Index f = 0; f < k; ++f) {
    const std::vector<int> fb = discretize(factors.col(f), bins);
    const double h = entropy_discrete(fb);
    for (Eigen::Index j = 0; j < n; ++j)
      result.mutual_information(j, f) =
          mutual_info_discrete(code_bins[static_cast<std::size_t>(j)], fb);
    if (!(h > 0.0)) {
      result.excluded.push_back(static_cast<int>(f));
      std::cerr << "warning: factor " << f << " has zero entropy; excluded from MIG\n";
      continue;
    }
    std::vector<double> col(result.mutual_information.col(f).data(),
                            result.mutual_information.col(f).data() + n);
    std::sort(col.begin(), col.end(), std::greater<>());
    const double second = col.size() > 1 ? col[1] : 0.0;
    const double gap = (col[0] - second) / h;
    result.per_factor[static_cast<std::size_t>(f)] = gap;
    sum += gap;
    ++used;
  }
  if (used == 0) throw MetricError("every factor has zero entropy; MIG is undefined");
  result.score = sum / used;
  return result;
}

double mig(const CodeMatrix& codes, const FactorMatrix& factors, int bins) {
  return mig_detailed(codes, factors, bins).score;
}

ImportanceMatrix dci_importance(const CodeMatrix& codes, const FactorMatrix& factors,
                                const ForestConfig& config) {
  check_aligned(codes, factors);
  ImportanceMatrix r = ImportanceMatrix::Zero(codes.cols(), factors.cols());
  for (Eigen::Index f = 0; f < factors.cols(); ++f) {
    const RegressionForest forest =
        RegressionForest::fit(codes, factors.col(f), config);
    const Vec& imp = forest.importances();
    const double total = imp.sum();
    if (!std::isfinite(total)) throw MetricError("regressor produced non-finite importances");
    // A factor the forest cannot split on keeps an all-zero column.
    if (total > 0.0) r.col(f) = imp / total;
  }
  return r;
}

double dci_disentanglement(const ImportanceMatrix& importance) {
  if (importance.size() == 0) throw MetricError("empty importance matrix");
  if ((importance.array() < 0.0).any() || !importance.allFinite())
    throw MetricError("importance entries must be finite and non-negative");
  const double total = importance.sum();
  if (!(total > 0.0)) throw MetricError("importance matrix is all zero");
  const auto k = static_cast<double>(importance.cols());
  double score = 0.0;
  for (Eigen::Index j = 0; j < importance.rows(); ++j) {
    const double row_sum = importance.row(j).sum();
    if (!(row_sum > 0.0)) continue;
    double h = 0.0;
    if (importance.cols() > 1) {
      for (Eigen::Index f = 0; f < importance.cols(); ++f) {
        const double p = importance(j, f) / row_sum;
        if (p > 0.0) h -= p * std::log(p) / std::log(k);
      }
    }
    score += (row_sum / total) * (1.0 - h);
  }
  return score;
}

}  // namespace disco
