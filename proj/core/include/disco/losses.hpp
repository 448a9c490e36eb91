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

// Contrastive objectives over Variation Space samples. Vector sets are
// matrices with one sample per column: Q is n x B, K+ is n x N, K- is n x M.
// Everything is in minimization form and returns analytic gradients with
// respect to every input column.

#ifndef DISCO_LOSSES_HPP_
#define DISCO_LOSSES_HPP_

#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "disco/common.hpp"
#include "disco/sampler.hpp"

namespace disco {

enum class ContrastVariant { nce, bce_logits };

std::string to_string(ContrastVariant v);
ContrastVariant contrast_variant_from_string(const std::string& s);

struct LossConfig {
  double temperature = 0.1;       // tau
  double domination_weight = 1.0; // lambda
  double flip_threshold = 9.0;    // T, in logit (post-temperature) units
  bool flipping_enabled = true;
  ContrastVariant variant = ContrastVariant::bce_logits;
};

struct LossValue {
  double value = 0.0;
  Mat grad_queries;
  Mat grad_positives;
  Mat grad_negatives;  // empty for domination_loss
  int flipped = 0;
};

struct LossReport {
  double total = 0.0;
  double contrastive_part = 0.0;
  double domination_part = 0.0;
  int flipped_count = 0;

  nlohmann::json to_json() const;
};

// -(1/B) sum_i [ logsumexp_j(q_i.k+_j / tau) - logsumexp_m(q_i.k-_m / tau) ]
LossValue nce_loss(const Mat& queries, const Mat& positives, const Mat& negatives,
                   double temperature);

// -(1/B) sum_i [ sum_j log sig(q_i.k+_j / tau) + sum_m log(1 - sig(q_i.k-_m / tau)) ]
LossValue bce_logits_loss(const Mat& queries, const Mat& positives,
                          const Mat& negatives, double temperature);

// Shannon entropy of softmax(mean of Q and K+). grad_negatives is empty.
LossValue domination_loss(const Mat& queries, const Mat& positives);

// BCE where negatives with logit alpha >= threshold become pseudo-positives
// with weight clamp(alpha * tau, 0, 1). threshold = +inf gives exactly
// bce_logits_loss.
LossValue flipped_bce_loss(const Mat& queries, const Mat& positives,
                           const Mat& negatives, double temperature,
                           double threshold);

// Returns the report and fills `grads` (if non-null) with the gradient of
// total = contrastive_part + lambda * domination_part.
LossReport total_loss(const Mat& queries, const Mat& positives, const Mat& negatives,
                      const LossConfig& config, LossValue* grads = nullptr);

LossReport total_loss(const ContrastBatch& batch, const LossConfig& config,
                      LossValue* grads = nullptr);

// Numerically stable log(sigmoid(x)).
double log_sigmoid(double x);
double sigmoid(double x);

}  // namespace disco

#endif  // DISCO_LOSSES_HPP_
