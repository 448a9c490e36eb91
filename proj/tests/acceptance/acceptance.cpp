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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "disco/config.hpp"
#include "disco/evaluation.hpp"
#include "disco/losses.hpp"
#include "disco/metrics.hpp"
#include "disco/navigator.hpp"
#include "disco/sampler.hpp"
#include "disco/trainer.hpp"
#include "loss_oracles.hpp"
#include "support.hpp"

namespace disco {
namespace {

namespace fs = std::filesystem;
using testing::central_difference;
using testing::random_unit_columns;
using testing::relative_error;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& text) { notes.push_back(text); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Mat col(std::initializer_list<double> v) {
  Mat m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

// ---------------------------------------------------------------------------
// 1. Loss values against hand and term-by-term computations.

Outcome loss_oracles() {
  Outcome o;
  double worst = 0.0;
  auto near = [&](double got, double want, const std::string& what) {
    const double err = std::abs(got - want);
    worst = std::max(worst, err);
    o.check(err <= 1e-10, what + " (" + fmt("%.3g", err) + ")");
  };

  // Hand values.
  near(nce_loss(col({1, 0}), col({1, 0}), col({0, 1}), 1.0).value, -1.0, "nce unit gap");
  near(bce_logits_loss(col({1, 0}), col({1, 0}), col({0, 1}), 1.0).value,
       std::log1p(std::exp(-1.0)) + std::log(2.0), "bce unit logit");
  near(domination_loss(col({1, 0, 0}), col({1, 0, 0})).value,
       std::log(std::exp(1.0) + 2.0) - std::exp(1.0) / (std::exp(1.0) + 2.0), "entropy (1,0,0)");
  near(domination_loss(col({1, 0, 0, 0}), col({1, 0, 0, 0})).value, 1.2683014942, "entropy 4");
  // One negative at cosine 0.8 flipped at T = 1 (tau = 1): weight 0.8.
  near(flipped_bce_loss(col({1, 0}), col({1, 0}), col({0.8, 0.6}), 1.0, 0.5).value,
       std::log1p(std::exp(-1.0)) + 0.8 * std::log1p(std::exp(-0.8)), "flipped single");

  // Random fixtures with up to three elements per set.
  Rng rng(2026);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = uniform_int(rng, 2, 3);
    const Mat q = random_unit_columns(dim, uniform_int(rng, 1, 3), rng, trial % 2 == 0);
    const Mat kp = random_unit_columns(dim, uniform_int(rng, 1, 3), rng, trial % 2 == 0);
    Mat kn = random_unit_columns(dim, uniform_int(rng, 1, 3), rng, trial % 2 == 0);
    kn.col(0) = (q.col(0) + 0.2 * kn.col(0)).normalized();
    const double tau = uniform(rng, 0.1, 1.0);
    const double t = uniform(rng, 0.5, 1.0) / tau;
    near(nce_loss(q, kp, kn, tau).value, testing::naive_nce(q, kp, kn, tau), "nce random");
    near(bce_logits_loss(q, kp, kn, tau).value, testing::naive_bce(q, kp, kn, tau), "bce random");
    near(flipped_bce_loss(q, kp, kn, tau, t).value, testing::naive_flipped(q, kp, kn, tau, t),
         "flipped random");
    near(domination_loss(q, kp).value, testing::naive_entropy(q, kp), "domination random");
  }
  o.note("max abs error " + fmt("%.2g", worst));
  return o;
}

// ---------------------------------------------------------------------------
// 2. Gradients against central differences.

enum class Objective { nce, bce, flipped, domination, total };

double objective(Objective which, const Mat& q, const Mat& kp, const Mat& kn, LossValue* g) {
  constexpr double tau = 0.5;
  constexpr double threshold = 1.2;
  LossValue v;
  switch (which) {
    case Objective::nce: v = nce_loss(q, kp, kn, tau); break;
    case Objective::bce: v = bce_logits_loss(q, kp, kn, tau); break;
    case Objective::flipped: v = flipped_bce_loss(q, kp, kn, tau, threshold); break;
    case Objective::domination:
      v = domination_loss(q, kp);
      v.grad_negatives = Mat::Zero(kn.rows(), kn.cols());
      break;
    case Objective::total:
      total_loss(q, kp, kn, LossConfig{tau, 0.7, threshold, true, ContrastVariant::bce_logits},
                 &v);
      break;
  }
  if (g != nullptr) *g = v;
  return v.value;
}

Outcome gradient_suite() {
  Outcome o;
  double worst = 0.0;
  const char* names[] = {"nce", "bce", "flipped", "domination", "total"};
  for (int w = 0; w < 5; ++w) {
    const auto which = static_cast<Objective>(w);
    Rng rng(100 + w);
    int probes = 0;
    while (probes < 100) {
      Mat q = random_unit_columns(4, 3, rng);
      Mat kp = random_unit_columns(4, 2, rng);
      Mat kn = random_unit_columns(4, 4, rng);
      kn.col(0) = (q.col(0) + 0.3 * kn.col(0)).normalized();
      // The flipped objective has kinks at the threshold and at the weight
      // clamp edges; keep probes off them.
      bool near_kink = false;
      for (int i = 0; i < q.cols(); ++i)
        for (int k = 0; k < kn.cols(); ++k) {
          const double c = q.col(i).dot(kn.col(k));
          near_kink |= std::abs(c - 0.6) < 1e-3 || std::abs(c) < 1e-3 || std::abs(c - 1) < 1e-3;
        }
      if (near_kink) continue;
      LossValue g;
      objective(which, q, kp, kn, &g);
      for (int trial = 0; trial < 10; ++trial, ++probes) {
        const int set = uniform_int(rng, 0, 2);
        Mat& m = set == 0 ? q : set == 1 ? kp : kn;
        const Mat& gm = set == 0 ? g.grad_queries : set == 1 ? g.grad_positives : g.grad_negatives;
        const int r = uniform_int(rng, 0, static_cast<int>(m.rows()) - 1);
        const int c = uniform_int(rng, 0, static_cast<int>(m.cols()) - 1);
        const double numeric =
            central_difference(&m(r, c), [&] { return objective(which, q, kp, kn, nullptr); });
        const double err = relative_error(gm(r, c), numeric);
        worst = std::max(worst, err);
        o.check(err < 1e-4, std::string(names[w]) + " gradient " + fmt("%.3g", err));
      }
    }
  }

  for (NavigatorKind kind :
       {NavigatorKind::unit_columns, NavigatorKind::orthonormal, NavigatorKind::mlp3}) {
    Rng rng(200 + static_cast<int>(kind));
    Navigator nav = init_navigator(kind, 6, 6, rng);
    int probes = 0;
    while (probes < 100) {
      const int d = uniform_int(rng, 0, 5);
      const double eps = uniform(rng, -2.0, 2.0);
      Vec w(6);
      for (int i = 0; i < 6; ++i) w(i) = standard_normal(rng);
      Navigator::Gradients g = nav.zero_gradients();
      nav.shift_backward(d, eps, w, g);
      std::vector<Mat*> params = nav.parameters();
      for (int trial = 0; trial < 10; ++trial, ++probes) {
        const auto k = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(params.size()) - 1));
        Mat& m = *params[k];
        const int r = uniform_int(rng, 0, static_cast<int>(m.rows()) - 1);
        const int c = uniform_int(rng, 0, static_cast<int>(m.cols()) - 1);
        const double numeric =
            central_difference(&m(r, c), [&] { return nav.shift(d, eps).dot(w); });
        const double err = relative_error(g.values[k](r, c), numeric);
        worst = std::max(worst, err);
        o.check(err < 1e-4, "navigator " + to_string(kind) + " gradient " + fmt("%.3g", err));
      }
    }
  }
  o.note("800 probes, worst relative error " + fmt("%.2g", worst));
  return o;
}

// ---------------------------------------------------------------------------
// 3. Reduction identities.

Outcome reduction_identities() {
  Outcome o;
  Rng rng(3);
  double worst_flip = 0.0, worst_total = 0.0, worst_proj = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Mat q = random_unit_columns(5, 4, rng, trial % 2 == 0);
    const Mat kp = random_unit_columns(5, 4, rng, trial % 2 == 0);
    const Mat kn = random_unit_columns(5, 8, rng, trial % 2 == 0);
    const double tau = uniform(rng, 0.05, 1.0);
    const LossValue f = flipped_bce_loss(q, kp, kn, tau, kInf);
    const LossValue b = bce_logits_loss(q, kp, kn, tau);
    worst_flip = std::max({worst_flip, std::abs(f.value - b.value),
                           (f.grad_queries - b.grad_queries).cwiseAbs().maxCoeff(),
                           (f.grad_negatives - b.grad_negatives).cwiseAbs().maxCoeff()});

    LossConfig cfg;
    cfg.temperature = tau;
    cfg.domination_weight = uniform(rng, 0.0, 300.0);
    cfg.flip_threshold = uniform(rng, 0.3, 1.0) / tau;
    cfg.flipping_enabled = trial % 3 != 0;
    const LossReport r = total_loss(q, kp, kn, cfg);
    const double contrast = cfg.flipping_enabled
                                ? flipped_bce_loss(q, kp, kn, tau, cfg.flip_threshold).value
                                : bce_logits_loss(q, kp, kn, tau).value;
    const double dom = domination_loss(q, kp).value;
    worst_total = std::max({worst_total, std::abs(r.total - (contrast + cfg.domination_weight * dom)),
                            std::abs(r.contrastive_part - contrast),
                            std::abs(r.domination_part - dom)});

    for (NavigatorKind kind : {NavigatorKind::unit_columns, NavigatorKind::orthonormal}) {
      Navigator nav(kind, 4, 6);
      Mat m(6, 4);
      for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = standard_normal(rng) * 3.0;
      nav.set_matrix(m);
      const Navigator once = project_constraints(nav);
      const Navigator twice = project_constraints(once);
      worst_proj = std::max(worst_proj, (once.matrix() - twice.matrix()).cwiseAbs().maxCoeff());
      o.check(constraint_violation(once) < 1e-10, "projection satisfies the constraint");
    }
  }
  o.check(worst_flip <= 1e-12, "flipped(T=inf) vs bce " + fmt("%.3g", worst_flip));
  o.check(worst_total <= 1e-10, "total decomposition " + fmt("%.3g", worst_total));
  o.check(worst_proj <= 1e-10, "projection idempotence " + fmt("%.3g", worst_proj));
  o.note("flip " + fmt("%.2g", worst_flip) + ", total " + fmt("%.2g", worst_total) +
         ", projection " + fmt("%.2g", worst_proj));
  return o;
}

// ---------------------------------------------------------------------------
// 4. Sampler properties.

Outcome sampler_properties() {
  Outcome o;
  testing::IdentityGenerator gen(3);
  SamplerConfig cfg;
  cfg.directions = 8;
  cfg.queries = 1;
  cfg.positives = 1;
  cfg.negatives = 4;
  cfg.eps_bar = 1.0;
  Rng rng(4);
  constexpr int kDraws = 100000;
  std::vector<double> counts(8, 0.0);
  long long violations = 0;
  for (int i = 0; i < kDraws; ++i) {
    const BatchSpec s = draw_spec(rng, gen, cfg);
    counts[static_cast<std::size_t>(s.direction)] += 1.0;
    for (int d : s.negative_directions) violations += d == s.direction;
  }
  o.check(violations == 0, std::to_string(violations) + " exclusion violations");
  double chi2 = 0.0;
  const double expected = kDraws / 8.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 1% point of chi-square with 7 degrees of freedom.
  o.check(chi2 < 18.475, "chi-square " + fmt("%.3f", chi2));

  // Seeded reproducibility of specs and realized batches.
  auto g = make_oracle_generator(4, GeneratorKind::oracle_linear, 13, true);
  Rng init(0);
  EncoderSpec es;
  es.preset = EncoderPreset::mlp;
  es.input = g->image_shape();
  es.output_dim = 8;
  es.hidden = 16;
  const Encoder enc(es, init);
  const Navigator nav = init_navigator(NavigatorKind::unit_columns, 8, 4, init);
  SamplerConfig bc;
  bc.directions = 8;
  bc.queries = 4;
  bc.positives = 4;
  bc.negatives = 8;
  bc.eps_bar = 0.5;
  bool same = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng a(seed), b(seed);
    for (int i = 0; i < 20; ++i) {
      const ContrastBatch x = realize_batch(draw_spec(a, *g, bc), enc, *g, nav, a, bc.eps_bar);
      const ContrastBatch y = realize_batch(draw_spec(b, *g, bc), enc, *g, nav, b, bc.eps_bar);
      same &= x.spec.to_json().dump() == y.spec.to_json().dump();
      same &= x.queries.cwiseEqual(y.queries).all() && x.positives.cwiseEqual(y.positives).all() &&
              x.negatives.cwiseEqual(y.negatives).all();
    }
  }
  o.check(same, "seeded batches are bit-exact");
  o.note("10^5 draws, 0 violations, chi-square " + fmt("%.2f", chi2) + " (7 dof)");
  return o;
}

// ---------------------------------------------------------------------------
// 5. Metric oracles.

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

Outcome metric_oracles() {
  Outcome o;
  Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 50 + 40 * static_cast<std::size_t>(trial);
    std::vector<int> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = uniform_int(rng, 0, 5);
      y[i] = uniform(rng, 0.0, 1.0) < 0.5 ? x[i] % 4 : uniform_int(rng, 0, 3);
    }
    // Direct joint-table summation.
    Mat joint = Mat::Zero(6, 4);
    for (std::size_t i = 0; i < n; ++i) joint(x[i], y[i]) += 1.0;
    joint /= static_cast<double>(n);
    const Vec px = joint.rowwise().sum();
    const Vec py = joint.colwise().sum().transpose();
    double mi = 0.0;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 4; ++b)
        if (joint(a, b) > 0) mi += joint(a, b) * std::log(joint(a, b) / (px(a) * py(b)));
    worst = std::max(worst, std::abs(mutual_info_discrete(x, y) - mi));
  }
  o.check(worst <= 1e-12, "mutual information vs joint table " + fmt("%.3g", worst));

  const Mat grid = factorial_grid(4, 10);  // S = 10^4
  const double mig_identity = mig(grid, grid, 20);
  o.check(std::abs(mig_identity - 1.0) < 1e-12, "MIG on identity codes " + fmt("%.12f", mig_identity));

  Mat f(10000, 4), c(10000, 6);
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = uniform(rng, 0.0, 1.0);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = uniform(rng, 0.0, 1.0);
  const double mig_noise = mig(c, f, 20);
  o.check(mig_noise < 0.05, "MIG on independent noise " + fmt("%.4f", mig_noise));

  const double d_id = dci_disentanglement(Mat::Identity(5, 5));
  const double d_uni = dci_disentanglement(Mat::Constant(5, 5, 0.2));
  Mat r(2, 2);
  r << 0.9, 0.1, 0.1, 0.9;
  const double d_fix = dci_disentanglement(r);
  o.check(std::abs(d_id - 1.0) < 1e-12, "DCI identity " + fmt("%.6f", d_id));
  o.check(std::abs(d_uni) < 1e-12, "DCI uniform " + fmt("%.6f", d_uni));
  o.check(std::abs(d_fix - 0.531) < 1e-3, "DCI fixture " + fmt("%.6f", d_fix));
  o.note("MI error " + fmt("%.2g", worst) + ", MIG identity " + fmt("%.6f", mig_identity) +
         ", MIG noise " + fmt("%.4f", mig_noise) + ", DCI fixture " + fmt("%.6f", d_fix));
  return o;
}

// ---------------------------------------------------------------------------
// 6. End-to-end direction recovery on the entangled linear oracle.

struct Variant {
  const char* name;
  AblationMode mode;
  bool flipping;
  double lambda;
};

constexpr Variant kFull{"full", AblationMode::contrast_variation, true, 300.0};
constexpr Variant kNoFlip{"no-flipping", AblationMode::contrast_variation, false, 300.0};
constexpr Variant kNoDom{"no-domination", AblationMode::contrast_variation, true, 0.0};
constexpr Variant kClassify{"classify_variation", AblationMode::classify_variation, true, 300.0};
constexpr Variant kConcat{"contrast_concat", AblationMode::contrast_concat, true, 300.0};

constexpr int kFactors = 4;
constexpr int kDirections = 8;
constexpr int kSteps = 5000;
constexpr int kEvalSamples = 5000;

std::shared_ptr<const OracleGenerator> acceptance_oracle() {
  return make_oracle_generator(kFactors, GeneratorKind::oracle_linear, 13, true);
}

TrainConfig acceptance_config(const Variant& v, std::uint64_t seed) {
  TrainConfig c;
  c.steps = kSteps;
  c.learning_rate = 0.01;
  c.optimizer = OptimizerKind::adaptive_moment;
  c.seed = seed;
  c.sampler.directions = kDirections;
  c.sampler.queries = 16;
  c.sampler.positives = 16;
  c.sampler.negatives = 32;
  c.sampler.eps_bar = 0.5;
  c.loss.temperature = 0.1;
  c.loss.flip_threshold = 0.9 / 0.1;
  c.loss.flipping_enabled = v.flipping;
  c.loss.domination_weight = v.lambda;
  c.loss.variant = ContrastVariant::bce_logits;
  c.ablation = v.mode;
  return c;
}

struct RunResult {
  Mat directions;
  double mig = 0.0;
  double dci = 0.0;
  double seconds = 0.0;
};

RunResult train_and_score(const Generator& gen, const Variant& v, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  EncoderSpec spec;
  spec.preset = EncoderPreset::linear;
  spec.input = gen.image_shape();
  spec.output_dim = kDirections;
  TrainState state = init_train_state(acceptance_config(v, seed), gen, spec,
                                      NavigatorKind::unit_columns);
  fit(state, gen, FitOptions{});
  const EvaluationSamples s = collect_oracle_samples(state.encoder, gen, kEvalSamples, 0);
  RunResult r;
  r.directions = state.navigator.matrix();
  r.mig = mig(s.codes, s.factors, 20);
  r.dci = dci_disentanglement(dci_importance(s.codes, s.factors));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Outcome direction_recovery() {
  Outcome o;
  const auto gen = acceptance_oracle();
  const RunResult main = train_and_score(*gen, kFull, 0);

  // (a) every factor direction has a learned match.
  const Mat& mixing = gen->mixing();
  double weakest = 1.0;
  for (int k = 0; k < kFactors; ++k) {
    double best = 0.0;
    for (int d = 0; d < kDirections; ++d)
      best = std::max(best, std::abs(main.directions.col(d).normalized().dot(
                                mixing.col(k).normalized())));
    weakest = std::min(weakest, best);
    o.check(best >= 0.95, "factor " + std::to_string(k) + " best |cosine| " + fmt("%.4f", best));
  }
  // (b) metrics of the trained encoder.
  o.check(main.mig >= 0.6, "MIG " + fmt("%.4f", main.mig) + " >= 0.6");
  o.check(main.dci >= 0.7, "DCI " + fmt("%.4f", main.dci) + " >= 0.7");
  o.check(main.seconds < 600.0, "training time " + fmt("%.1f", main.seconds) + " s");
  o.note("(a) weakest best |cosine| " + fmt("%.4f", weakest) + "; (b) MIG " +
         fmt("%.4f", main.mig) + ", DCI " + fmt("%.4f", main.dci) + " in " +
         fmt("%.0f", main.seconds) + " s");

  // (c) ablation ordering on MIG, mean over five seeds.
  std::vector<std::pair<const Variant*, double>> means;
  for (const Variant* v : {&kFull, &kNoFlip, &kNoDom, &kClassify, &kConcat}) {
    double sum = 0.0;
    std::string per;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const double m = (v == &kFull && seed == 0) ? main.mig : train_and_score(*gen, *v, seed).mig;
      sum += m;
      per += (seed ? " " : "") + fmt("%.3f", m);
    }
    means.emplace_back(v, sum / 5.0);
    o.note(std::string("(c) ") + v->name + " mean MIG " + fmt("%.4f", sum / 5.0) + " [" + per + "]");
  }
  auto mean_of = [&](const Variant& v) {
    for (const auto& [p, m] : means)
      if (p == &v) return m;
    return 0.0;
  };
  auto order = [&](const Variant& a, const Variant& b) {
    o.check(mean_of(a) >= mean_of(b), std::string(a.name) + " >= " + b.name);
  };
  order(kFull, kNoFlip);
  order(kNoFlip, kNoDom);
  order(kNoDom, kClassify);
  order(kFull, kConcat);
  return o;
}

// ---------------------------------------------------------------------------
// 7. README disclosure.

Outcome readme_disclosure() {
  Outcome o;
  std::ifstream in(fs::path(DISCO_SOURCE_DIR) / "README.md");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  o.check(!text.empty(), "README.md exists");
  o.check(text.find("0.512 ± 0.068") != std::string::npos, "quotes the Shapes3D GAN MIG value");
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  o.check(lower.find("not reproducible") != std::string::npos, "states non-reproducibility");
  o.check(lower.find("stylegan2") != std::string::npos, "names the pretrained generator");
  o.check(lower.find("25 runs") != std::string::npos, "names the run count");
  o.check(lower.find("criterion 6") != std::string::npos, "points to criterion 6");
  return o;
}

// ---------------------------------------------------------------------------
// 8. Determinism through the command line.

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out != nullptr) *out = o.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = testing::scratch_dir("acceptance_determinism");
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({
      "backend": {"kind": "oracle_linear", "factors": 4, "image_shape": [16, 16, 1]},
      "navigator": {"directions": 8},
      "encoder": {"preset": "mlp", "hidden": 32},
      "sampler": {"queries": 8, "positives": 8, "negatives": 16, "max_shift": 0.5},
      "trainer": {"steps": 200, "learning_rate": 0.01, "seed": 7},
      "eval": {"samples": 2000}
    })";
  }
  const std::string cfg = (dir / "config.json").string();
  o.check(cli({"train", "--config", cfg, "--out", (dir / "a").string()}) == 0, "first train");
  o.check(cli({"train", "--config", cfg, "--out", (dir / "b").string()}) == 0, "second train");
  const auto hash = [&](const char* run) {
    try {
      return nlohmann::json::parse(slurp(dir / run / "manifest.json")).at("parameter_hash").get<std::string>();
    } catch (const std::exception&) {
      return std::string("unreadable");
    }
  };
  const std::string ha = hash("a"), hb = hash("b");
  o.check(ha == hb && ha != "unreadable", "parameter hashes " + ha + " / " + hb);
  const std::string ck = (dir / "a").string();
  o.check(cli({"eval", "--checkpoint", ck, "--out", (dir / "e1").string()}) == 0, "first eval");
  o.check(cli({"eval", "--checkpoint", ck, "--out", (dir / "e2").string()}) == 0, "second eval");
  const std::string r1 = slurp(dir / "e1" / "metrics.json");
  o.check(!r1.empty() && r1 == slurp(dir / "e2" / "metrics.json"), "byte-identical reports");
  o.note("parameter_hash " + ha + ", report " + std::to_string(r1.size()) + " bytes");
  return o;
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  // 0: none
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace disco

int main() {
  using namespace disco;
  const std::vector<Criterion> criteria{
      {1, "loss formula oracles", 1.0, loss_oracles},
      {2, "gradient suite", 30.0, gradient_suite},
      {3, "reduction identities", 0.0, reduction_identities},
      {4, "sampler properties", 0.0, sampler_properties},
      {5, "metric oracles", 60.0, metric_oracles},
      {6, "end-to-end direction recovery", 0.0, direction_recovery},
      {7, "README disclosure", 0.0, readme_disclosure},
      {8, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0)
      o.check(secs < c.budget_seconds, "runtime " + fmt("%.2f", secs) + " s over budget");
    for (const std::string& n : o.notes) std::printf("    %s\n", n.c_str());
    std::printf("criterion %d %s: %s (%.2f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
