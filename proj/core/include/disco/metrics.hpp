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

// Disentanglement scores over aligned (code, factor) sample matrices:
// discretized mutual information, the Mutual Information Gap, and DCI
// disentanglement from random-forest importances.

#ifndef DISCO_METRICS_HPP_
#define DISCO_METRICS_HPP_

#include <string>
#include <vector>

#include "disco/common.hpp"
#include "disco/forest.hpp"

namespace disco {

// S x n codes and S x K factors; rows are samples.
using CodeMatrix = Mat;
using FactorMatrix = Mat;
// n x K, non-negative.
using ImportanceMatrix = Mat;

// Equal-width bins over [min, max]; the top edge falls into the last bin.
// A constant column maps to all zeros.
std::vector<int> discretize(const Eigen::Ref<const Vec>& column, int bins);

// Plug-in estimate in nats. Throws InputError on empty or unequal inputs.
double mutual_info_discrete(const std::vector<int>& x, const std::vector<int>& y);
double entropy_discrete(const std::vector<int>& x);

struct MigResult {
  double score = 0.0;
  std::vector<double> per_factor;   // NaN for excluded factors
  std::vector<int> excluded;        // factors with zero entropy
  Mat mutual_information;           // n x K
};

MigResult mig_detailed(const CodeMatrix& codes, const FactorMatrix& factors, int bins);
double mig(const CodeMatrix& codes, const FactorMatrix& factors, int bins = 20);

ImportanceMatrix dci_importance(const CodeMatrix& codes, const FactorMatrix& factors,
                                const ForestConfig& config = {});
double dci_disentanglement(const ImportanceMatrix& importance);

}  // namespace disco

#endif  // DISCO_METRICS_HPP_
