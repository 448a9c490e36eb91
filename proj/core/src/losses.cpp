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

#include "disco/losses.hpp"

#include <algorithm>
#include <cmath>

namespace disco {
namespace {

void check_sets(const Mat& q, const Mat& kp, const Mat& kn, double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (q.cols() == 0 || kp.cols() == 0 || kn.cols() == 0)
    throw InputError("query, positive and negative sets must be non-empty");
  if (kp.rows() != q.rows() || kn.rows() != q.rows())
    throw InputError("all vectors must have the same dimension");
}

// Stable log-sum-exp of a row and its softmax weights.
double log_sum_exp(const Eigen::Ref<const Vec>& x, Vec* softmax) {
  const double m = x.maxCoeff();
  const Vec e = (x.array() - m).exp();
  const double s = e.sum();
  if (softmax != nullptr) *softmax = e / s;
  return m + std::log(s);
}

}  // namespace

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

std::string to_string(ContrastVariant v) {
  return v == ContrastVariant::nce ? "nce" : "bce_logits";
}

ContrastVariant contrast_variant_from_string(const std::string& s) {
  if (s == "nce") return ContrastVariant::nce;
  if (s == "bce_logits") return ContrastVariant::bce_logits;
  throw ConfigError("unknown loss variant '" + s + "'");
}

nlohmann::json LossReport::to_json() const {
  return {{"total", total},
          {"contrastive_part", contrastive_part},
          {"domination_part", domination_part},
          {"flipped_count", flipped_count}};
}

LossValue nce_loss(const Mat& q, const Mat& kp, const Mat& kn, double temperature) {
  check_sets(q, kp, kn, temperature);
  const double inv_t = 1.0 / temperature;
  const double inv_b = 1.0 / static_cast<double>(q.cols());
  const Mat pos_logits = (q.transpose() * kp) * inv_t;  // B x N
  const Mat neg_logits = (q.transpose() * kn) * inv_t;  // B x M

  LossValue out;
  Mat d_pos(pos_logits.rows(), pos_logits.cols());
  Mat d_neg(neg_logits.rows(), neg_logits.cols());
  Vec w;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double lp = log_sum_exp(pos_logits.row(i).transpose(), &w);
    d_pos.row(i) = -inv_b * w.transpose();
    const double ln = log_sum_exp(neg_logits.row(i).transpose(), &w);
    d_neg.row(i) = inv_b * w.transpose();
    out.value -= inv_b * (lp - ln);
  }
  d_pos *= inv_t;
  d_neg *= inv_t;
  out.grad_queries = kp * d_pos.transpose() + kn * d_neg.transpose();
  out.grad_positives = q * d_pos;
  out.grad_negatives = q * d_neg;
  return out;
}

LossValue flipped_bce_loss(const Mat& q, const Mat& kp, const Mat& kn,
                           double temperature, double threshold) {
  check_sets(q, kp, kn, temperature);
  if (std::isnan(threshold)) throw ConfigError("flip threshold must not be NaN");
  const double inv_t = 1.0 / temperature;
  const double inv_b = 1.0 / static_cast<double>(q.cols());
  const Mat pos_logits = (q.transpose() * kp) * inv_t;
  const Mat neg_logits = (q.transpose() * kn) * inv_t;

  LossValue out;
  // d(loss)/d(logit), then chained through logit = q.k / tau.
  Mat d_pos(pos_logits.rows(), pos_logits.cols());
  Mat d_neg(neg_logits.rows(), neg_logits.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < pos_logits.cols(); ++j) {
      const double a = pos_logits(i, j);
      row += log_sigmoid(a);
      d_pos(i, j) = -inv_b * (1.0 - sigmoid(a));
    }
    for (Eigen::Index m = 0; m < neg_logits.cols(); ++m) {
      const double a = neg_logits(i, m);
      if (a >= threshold) {
        ++out.flipped;
        const double cosine = a * temperature;
        const double weight = std::clamp(cosine, 0.0, 1.0);
        const double d_weight = (cosine > 0.0 && cosine < 1.0) ? temperature : 0.0;
        const double ls = log_sigmoid(a);
        row += weight * ls;
        d_neg(i, m) = -inv_b * (d_weight * ls + weight * (1.0 - sigmoid(a)));
      } else {
        row += log_sigmoid(-a);  // log(1 - sig(a))
        d_neg(i, m) = inv_b * sigmoid(a);
      }
    }
    total += row;
  }
  out.value = -inv_b * total;
  d_pos *= inv_t;
  d_neg *= inv_t;
  out.grad_queries = kp * d_pos.transpose() + kn * d_neg.transpose();
  out.grad_positives = q * d_pos;
  out.grad_negatives = q * d_neg;
  return out;
}

LossValue bce_logits_loss(const Mat& q, const Mat& kp, const Mat& kn,
                          double temperature) {
  check_sets(q, kp, kn, temperature);
  const double inv_t = 1.0 / temperature;
  const double inv_b = 1.0 / static_cast<double>(q.cols());
  const Mat pos_logits = (q.transpose() * kp) * inv_t;
  const Mat neg_logits = (q.transpose() * kn) * inv_t;

  // log sig(a) for positives, log(1 - sig(a)) = log sig(-a) for negatives.
  const Mat pos_terms = pos_logits.unaryExpr([](double a) { return log_sigmoid(a); });
  const Mat neg_terms = neg_logits.unaryExpr([](double a) { return log_sigmoid(-a); });
  double total = 0.0;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < pos_terms.cols(); ++j) row += pos_terms(i, j);
    for (Eigen::Index m = 0; m < neg_terms.cols(); ++m) row += neg_terms(i, m);
    total += row;
  }

  LossValue out;
  out.value = -inv_b * total;
  const Mat d_pos =
      pos_logits.unaryExpr([](double a) { return sigmoid(a) - 1.0; }) * (inv_b * inv_t);
  const Mat d_neg = neg_logits.unaryExpr([](double a) { return sigmoid(a); }) * (inv_b * inv_t);
  out.grad_queries = kp * d_pos.transpose() + kn * d_neg.transpose();
  out.grad_positives = q * d_pos;
  out.grad_negatives = q * d_neg;
  return out;
}

LossValue domination_loss(const Mat& q, const Mat& kp) {
  if (q.cols() == 0 || kp.cols() == 0)
    throw InputError("domination loss needs non-empty Q and K+");
  if (kp.rows() != q.rows()) throw InputError("all vectors must have the same dimension");
  if (q.rows() < 2) throw ConfigError("domination loss needs n >= 2");

  const double inv_count = 1.0 / static_cast<double>(q.cols() + kp.cols());
  const Vec c = (q.rowwise().sum() + kp.rowwise().sum()) * inv_count;
  Vec p;
  const double lse = log_sum_exp(c, &p);
  const Vec log_p = c.array() - lse;
  const double entropy = -p.dot(log_p);
  // dH/dc_j = -p_j (log p_j + H)
  const Vec d_c = -p.cwiseProduct((log_p.array() + entropy).matrix());

  LossValue out;
  out.value = entropy;
  out.grad_queries = (d_c * inv_count).replicate(1, q.cols());
  out.grad_positives = (d_c * inv_count).replicate(1, kp.cols());
  return out;
}

LossReport total_loss(const ContrastBatch& batch, const LossConfig& config,
                      LossValue* grads) {
  return total_loss(batch.queries, batch.positives, batch.negatives, config, grads);
}

LossReport total_loss(const Mat& q, const Mat& kp, const Mat& kn,
                      const LossConfig& config, LossValue* grads) {
  if (!(config.domination_weight >= 0.0))
    throw ConfigError("domination weight must be >= 0");
  LossValue contrast;
  switch (config.variant) {
    case ContrastVariant::nce:
      contrast = nce_loss(q, kp, kn, config.temperature);
      break;
    case ContrastVariant::bce_logits:
      contrast = config.flipping_enabled
                     ? flipped_bce_loss(q, kp, kn, config.temperature,
                                        config.flip_threshold)
                     : bce_logits_loss(q, kp, kn, config.temperature);
      break;
  }
  const LossValue dom = domination_loss(q, kp);

  LossReport report;
  report.contrastive_part = contrast.value;
  report.domination_part = dom.value;
  report.total = contrast.value + config.domination_weight * dom.value;
  report.flipped_count = contrast.flipped;
  if (grads != nullptr) {
    grads->value = report.total;
    grads->flipped = contrast.flipped;
    grads->grad_queries = contrast.grad_queries + config.domination_weight * dom.grad_queries;
    grads->grad_positives =
        contrast.grad_positives + config.domination_weight * dom.grad_positives;
    grads->grad_negatives = contrast.grad_negatives;
  }
  return report;
}

}  // namespace disco
