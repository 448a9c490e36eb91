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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "disco/metrics.hpp"
#include "support.hpp"

namespace disco {
namespace {

// MI by brute-force summation over an explicit joint count table.
double table_mi(const std::vector<std::vector<double>>& counts) {
  double n = 0.0;
  std::vector<double> rows(counts.size(), 0.0), cols(counts[0].size(), 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      n += counts[i][j];
      rows[i] += counts[i][j];
      cols[j] += counts[i][j];
    }
  double mi = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      if (counts[i][j] == 0.0) continue;
      const double p = counts[i][j] / n;
      mi += p * std::log(p / ((rows[i] / n) * (cols[j] / n)));
    }
  return mi;
}

// Expands a count table into paired samples.
void samples_from_table(const std::vector<std::vector<double>>& counts, std::vector<int>& x,
                        std::vector<int>& y) {
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts[i].size(); ++j)
      for (int c = 0; c < static_cast<int>(counts[i][j]); ++c) {
        x.push_back(static_cast<int>(i));
        y.push_back(static_cast<int>(j));
      }
}

Mat uniform_matrix(int rows, int cols, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = uniform(rng, 0.0, 1.0);
  return m;
}

// Full factorial grid of `levels` values per factor in [0, 1].
Mat factorial_grid(int factors, int levels) {
  int rows = 1;
  for (int k = 0; k < factors; ++k) rows *= levels;
  Mat out(rows, factors);
  for (int r = 0; r < rows; ++r) {
    int rest = r;
    for (int k = 0; k < factors; ++k) {
      out(r, k) = static_cast<double>(rest % levels) / (levels - 1);
      rest /= levels;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

TEST(Discretize, TopEdgeFallsIntoLastBin) {
  Vec v(3);
  v << 0.0, 0.5, 1.0;
  EXPECT_EQ(discretize(v, 2), (std::vector<int>{0, 1, 1}));
}

TEST(Discretize, ConstantColumn) {
  EXPECT_EQ(discretize(Vec::Constant(5, 3.3), 20), std::vector<int>(5, 0));
}

TEST(Discretize, UniformOccupancyWithinThreeSigma) {
  // Twenty simultaneous 3-sigma checks fail together about 5% of the time;
  // the seed is fixed so the outcome is reproducible.
  Rng rng(2);
  const int s = 10000, bins = 20;
  Vec v(s);
  for (int i = 0; i < s; ++i) v(i) = uniform(rng, 0.0, 1.0);
  std::vector<int> counts(bins, 0);
  for (int b : discretize(v, bins)) ++counts[b];
  const double p = 1.0 / bins;
  const double sigma = std::sqrt(s * p * (1.0 - p));
  for (int b = 0; b < bins; ++b) EXPECT_LT(std::abs(counts[b] - s * p), 3.0 * sigma) << b;

  // Same assignment as direct scaling by the observed range.
  const std::vector<int> assigned = discretize(v, bins);
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  int mismatches = 0;
  for (int i = 0; i < s; ++i) {
    const int direct = std::min(bins - 1, static_cast<int>((v(i) - lo) / (hi - lo) * bins));
    mismatches += direct != assigned[i];
  }
  EXPECT_LE(mismatches, 2);  // rounding at exact bin edges only
}

TEST(Discretize, RejectsTooFewBins) {
  EXPECT_THROW(discretize(Vec::Zero(3), 1), ConfigError);
}

TEST(MutualInfo, IdenticalBalancedBinary) {
  const std::vector<int> x{0, 1, 0, 1, 1, 0};
  EXPECT_NEAR(mutual_info_discrete(x, x), std::log(2.0), 1e-15);
}

TEST(MutualInfo, IndependentCoins) {
  std::vector<int> x, y;
  samples_from_table({{25, 25}, {25, 25}}, x, y);
  EXPECT_EQ(mutual_info_discrete(x, y), 0.0);
}

TEST(MutualInfo, ThreeByThreeTable) {
  const std::vector<std::vector<double>> t{{10, 2, 3}, {1, 12, 4}, {5, 0, 8}};
  std::vector<int> x, y;
  samples_from_table(t, x, y);
  EXPECT_NEAR(mutual_info_discrete(x, y), table_mi(t), 1e-12);
}

TEST(MutualInfo, SymmetricAndBounded) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int size = 5 + trial;
    std::vector<int> x(size), y(size);
    for (int i = 0; i < size; ++i) {
      x[i] = uniform_int(rng, 0, 4);
      y[i] = (trial % 3 == 0) ? x[i] : uniform_int(rng, 0, 3);
    }
    const double a = mutual_info_discrete(x, y);
    EXPECT_EQ(a, mutual_info_discrete(y, x));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, std::min(entropy_discrete(x), entropy_discrete(y)) + 1e-12);
  }
}

TEST(MutualInfo, InputErrors) {
  EXPECT_THROW(mutual_info_discrete({}, {}), InputError);
  EXPECT_THROW(mutual_info_discrete({1, 2}, {1}), InputError);
}

// ---------------------------------------------------------------------------

TEST(Mig, PerfectCodesScoreOne) {
  const Mat f = factorial_grid(3, 5);
  const MigResult r = mig_detailed(f, f, 20);
  EXPECT_NEAR(r.score, 1.0, 1e-12);
  // Independent check of the gap on factor 0 from the explicit MI table.
  const double h = entropy_discrete(discretize(f.col(0), 20));
  EXPECT_NEAR(r.mutual_information(0, 0), h, 1e-12);
  EXPECT_NEAR(r.mutual_information(1, 0), 0.0, 1e-12);
}

TEST(Mig, IndependentCodesScoreNearZero) {
  Rng rng(3);
  const Mat f = uniform_matrix(10000, 4, rng);
  const Mat c = uniform_matrix(10000, 6, rng);
  EXPECT_LT(mig(c, f), 0.05);
}

TEST(Mig, SingleCodeUsesZeroSecondBest) {
  Rng rng(4);
  const Mat f = uniform_matrix(2000, 2, rng);
  const Mat c = f.col(0);
  const MigResult r = mig_detailed(c, f, 20);
  const double h0 = entropy_discrete(discretize(f.col(0), 20));
  const double h1 = entropy_discrete(discretize(f.col(1), 20));
  EXPECT_NEAR(r.per_factor[0], r.mutual_information(0, 0) / h0, 1e-15);
  EXPECT_NEAR(r.per_factor[1], r.mutual_information(0, 1) / h1, 1e-15);
}

TEST(Mig, ZeroEntropyFactorExcluded) {
  Mat f = factorial_grid(3, 5);
  f.col(1).setConstant(0.4);
  const MigResult r = mig_detailed(f, f, 20);
  EXPECT_EQ(r.excluded, std::vector<int>{1});
  EXPECT_TRUE(std::isnan(r.per_factor[1]));
  EXPECT_NEAR(r.score, 1.0, 1e-12);
  Mat all = Mat::Constant(f.rows(), 2, 0.1);
  EXPECT_THROW(mig(f, all), MetricError);
}

TEST(Mig, InRange) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat f = uniform_matrix(300, 3, rng);
    Mat c = uniform_matrix(300, 4, rng);
    c.col(trial % 4) += (trial % 5) * f.col(trial % 3);
    const double m = mig(c, f);
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
  }
}

TEST(Mig, PermutationInvariant) {
  Rng rng(7);
  const Mat f = uniform_matrix(2000, 3, rng);
  Mat c(2000, 4);
  c << f.col(2) + 0.1 * uniform_matrix(2000, 1, rng), f.col(0) * 2.0,
      uniform_matrix(2000, 1, rng), f.col(1) - f.col(0);
  std::vector<int> order{3, 1, 0, 2};
  Mat p(2000, 4);
  for (int j = 0; j < 4; ++j) p.col(j) = c.col(order[j]);
  EXPECT_NEAR(mig(c, f), mig(p, f), 1e-10);
}

TEST(Mig, NoiseDimensionsNeverHelp) {
  Rng rng(8);
  const Mat f = uniform_matrix(3000, 3, rng);
  Mat c = f + 0.05 * uniform_matrix(3000, 3, rng);
  double previous = mig(c, f);
  for (int extra = 0; extra < 5; ++extra) {
    Mat wider(3000, c.cols() + 1);
    wider << c, uniform_matrix(3000, 1, rng);
    c = wider;
    const double now = mig(c, f);
    EXPECT_LE(now, previous + 1e-15);
    previous = now;
  }
}

TEST(Mig, MisalignedInputs) {
  EXPECT_THROW(mig(Mat::Zero(3, 2), Mat::Zero(4, 2)), InputError);
  EXPECT_THROW(mig(Mat::Zero(1, 2), Mat::Zero(1, 2)), InputError);
}

// ---------------------------------------------------------------------------

TEST(Dci, IdentityImportanceIsOne) {
  EXPECT_NEAR(dci_disentanglement(Mat::Identity(4, 4)), 1.0, 1e-15);
}

TEST(Dci, UniformImportanceIsZero) {
  EXPECT_NEAR(dci_disentanglement(Mat::Constant(3, 4, 0.7)), 0.0, 1e-15);
}

TEST(Dci, TwoByTwoFixture) {
  Mat r(2, 2);
  r << 0.9, 0.1, 0.1, 0.9;
  const double h2 = -(0.9 * std::log2(0.9) + 0.1 * std::log2(0.1));
  EXPECT_NEAR(dci_disentanglement(r), 1.0 - h2, 1e-12);
  EXPECT_NEAR(dci_disentanglement(r), 0.5310044064, 1e-9);
}

TEST(Dci, AllZeroIsMetricError) {
  EXPECT_THROW(dci_disentanglement(Mat::Zero(3, 3)), MetricError);
  Mat neg = Mat::Identity(2, 2);
  neg(0, 1) = -0.1;
  EXPECT_THROW(dci_disentanglement(neg), MetricError);
}

TEST(Dci, ImportanceColumnsSumToOne) {
  Rng rng(9);
  const Mat f = uniform_matrix(800, 3, rng);
  Mat c(800, 4);
  c << f.col(1), f.col(0), uniform_matrix(800, 1, rng), f.col(2);
  const Mat r = dci_importance(c, f);
  EXPECT_GE(r.minCoeff(), 0.0);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(r.col(k).sum(), 1.0, 1e-12);
  const double d = dci_disentanglement(r);
  EXPECT_GT(d, 0.9);
  EXPECT_LE(d, 1.0 + 1e-12);
}

TEST(Dci, PermutationInvariant) {
  Rng rng(10);
  const Mat f = uniform_matrix(600, 2, rng);
  Mat c(600, 3);
  c << f.col(0) + 0.2 * f.col(1), uniform_matrix(600, 1, rng), f.col(1);
  Mat p(600, 3);
  p << c.col(2), c.col(0), c.col(1);
  const double a = dci_disentanglement(dci_importance(c, f));
  const double b = dci_disentanglement(dci_importance(p, f));
  EXPECT_NEAR(a, b, 1e-10);
}

TEST(Dci, ForestIsDeterministicAndPredicts) {
  Rng rng(11);
  const Mat x = uniform_matrix(500, 2, rng);
  const Vec y = (x.col(0).array() > 0.5).cast<double>();
  ForestConfig cfg;
  const RegressionForest a = RegressionForest::fit(x, y, cfg);
  const RegressionForest b = RegressionForest::fit(x, y, cfg);
  EXPECT_EQ(a.importances(), b.importances());
  Vec probe(2);
  probe << 0.9, 0.5;
  EXPECT_GT(a.predict(probe), 0.9);
  probe << 0.1, 0.5;
  EXPECT_LT(a.predict(probe), 0.1);
  EXPECT_GT(a.importances()(0), 10.0 * a.importances()(1));
}

}  // namespace
}  // namespace disco
