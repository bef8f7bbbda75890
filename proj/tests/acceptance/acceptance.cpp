// Copyright 2026 The hglove Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "hglove/analogy.hpp"
#include "hglove/corpus.hpp"
#include "hglove/evaluation.hpp"
#include "hglove/hyperbolicity.hpp"
#include "hglove/hypernymy.hpp"
#include "hglove/manifold.hpp"
#include "hglove/trainer.hpp"
#include "synthetic_corpus.hpp"
#include "test_util.hpp"

namespace hglove {
namespace {

using testing::max_abs_diff;
using testing::random_ball_point;
using testing::random_vector;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed check once; later failures are only counted.
  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << "failed: " << what << "; ";
    pass = false;
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------

void gyrovector_suite(Outcome& out) {
  const Stopwatch clock;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  double cancel = 0.0, ortho = 0.0, linear = 0.0, explog = 0.0, transport = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const auto a = random_ball_point(rng, 2, 0.99);
    const auto b = random_ball_point(rng, 2, 0.99);
    cancel = std::max(cancel, max_abs_diff(mobius_add(mobius_neg(a), mobius_add(a, b)), b));

    const auto u = random_ball_point(rng, 3, 0.99);
    const auto v = random_ball_point(rng, 3, 0.99);
    const auto w1 = random_vector(rng, 3, 1.0);
    const auto w2 = random_vector(rng, 3, 1.0);
    const double al = coef(rng);
    const auto g1 = gyration(u, v, w1);
    const auto g2 = gyration(u, v, w2);
    ortho = std::max(ortho, std::abs(norm(g1) - norm(w1)) / (1.0 + norm(w1)));
    Vector combo(3), rhs(3);
    for (int i = 0; i < 3; ++i) {
      combo[i] = al * w1[i] + w2[i];
      rhs[i] = al * g1[i] + g2[i];
    }
    linear = std::max(linear, max_abs_diff(gyration(u, v, combo), rhs));

    const auto x = random_ball_point(rng, 3, 0.9);
    auto t = random_ball_point(rng, 3, 5.0);
    for (auto& c : t) c /= conformal_factor(x);
    explog = std::max(explog, max_abs_diff(log_map(x, exp_map(x, t)), t));

    const auto p = random_ball_point(rng, 2, 0.95);
    const auto q = random_ball_point(rng, 2, 0.95);
    const auto tv = random_vector(rng, 2, 1.0);
    transport = std::max(transport, max_abs_diff(parallel_transport(q, p, parallel_transport(p, q, tv)), tv));
  }
  const double secs = clock.seconds();
  out.check(cancel <= 1e-9, "left cancellation " + fmt(cancel));
  out.check(ortho <= 1e-10, "gyration norm " + fmt(ortho));
  out.check(linear <= 1e-10, "gyration linearity " + fmt(linear));
  out.check(explog <= 1e-8, "exp/log inversion " + fmt(explog));
  out.check(transport <= 1e-9, "transport round trip " + fmt(transport));
  out.check(secs < 10.0, "runtime " + fmt(secs) + " s");
  out.detail << "max errors: cancel " << fmt(cancel) << ", gyr norm " << fmt(ortho) << ", gyr linear "
             << fmt(linear) << ", exp/log " << fmt(explog) << ", transport " << fmt(transport) << "; "
             << fmt(secs) << " s";
}

void isometry_suite(Outcome& out) {
  std::mt19937_64 rng(102);
  double dist = 0.0, round = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const auto x = random_ball_point(rng, 2, 0.95);
    const auto y = random_ball_point(rng, 2, 0.95);
    const auto px = disk_to_halfplane(x);
    dist = std::max(dist, std::abs(halfplane_distance(px, disk_to_halfplane(y)) - ball_distance(x, y)));
    round = std::max(round, max_abs_diff(halfplane_to_disk(px), x));
  }
  const double ln3 = std::log(3.0);
  const double dd = ball_distance(Vector{0.0, 0.0}, Vector{0.5, 0.0});
  const auto img = disk_to_halfplane(Vector{0.5, 0.0});
  const double dh = halfplane_distance({0.0, 1.0}, {0.8, 0.6});
  out.check(dist <= 1e-9, "distance " + fmt(dist));
  out.check(round <= 1e-10, "round trip " + fmt(round));
  out.check(std::abs(dd - ln3) <= 1e-12 && std::abs(dh - ln3) <= 1e-12, "ln 3 chain");
  out.check(std::abs(img.a - 0.8) <= 1e-12 && std::abs(img.y - 0.6) <= 1e-12, "image of (0.5, 0)");
  out.detail << "max |dH - dD| " << fmt(dist) << ", round trip " << fmt(round) << ", d_D(0,(0.5,0)) - ln3 "
             << fmt(dd - ln3) << ", d_H((0,1),(0.8,0.6)) - ln3 " << fmt(dh - ln3);
}

void fisher_consistency(Outcome& out) {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> gauss;
  double scaled = 0.0, local = 0.0;
  for (int n = 0; n < 2000; ++n) {
    Vector data;
    for (int i = 0; i < 8; ++i) {
      const auto f = random_ball_point(rng, 2, 0.95);
      data.insert(data.end(), f.begin(), f.end());
    }
    const PointTable table{data, 2, 2};
    GenericSpecificSets sets;
    sets.generic = {0};
    sets.specific = {1};
    const auto t = fit_isometry(table, sets);
    const auto gx = to_gaussian(table.row(2), t);
    const auto gy = to_gaussian(table.row(3), t);
    // Per-factor half-plane distance of the transformed points.
    const auto mx = apply_isometry(table.row(2), t);
    const auto my = apply_isometry(table.row(3), t);
    double sum = 0.0;
    for (std::size_t f = 0; f < 2; ++f) {
      const auto hx = disk_to_halfplane(std::span<const double>(mx).subspan(2 * f, 2));
      const auto hy = disk_to_halfplane(std::span<const double>(my).subspan(2 * f, 2));
      const double d = halfplane_distance(hx, hy);
      sum += d * d;
    }
    scaled = std::max(scaled, std::abs(fisher_distance(gx, gy) - std::numbers::sqrt2 * std::sqrt(sum)));

    const double mu = gauss(rng), sigma = std::exp(gauss(rng));
    double dm = gauss(rng), ds = gauss(rng);
    const double len = std::hypot(dm, ds);
    dm *= 1e-2 / len;
    ds *= 1e-2 / len;
    const GaussianEmbedding p{{mu}, {sigma}};
    const GaussianEmbedding q{{mu + dm * sigma}, {sigma * std::exp(ds)}};
    const double df = fisher_distance(p, q);
    local = std::max(local, std::abs(2.0 * kl_1d(mu, sigma, q.mu[0], q.sigma[0]) / (df * df) - 1.0));
  }
  out.check(scaled <= 1e-9, "fisher scaling " + fmt(scaled));
  out.check(local <= 5e-2, "local KL " + fmt(local));
  out.detail << "max |d_F - sqrt2 d_H| " << fmt(scaled) << ", max |2KL/d_F^2 - 1| " << fmt(local);
}

void gradient_check(Outcome& out) {
  const Stopwatch clock;
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> count(0.5, 300.0);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (const auto& h : {HFunction::square(), HFunction::cosh_pow(2)}) {
    for (int n = 0; n < 100; ++n) {
      EmbeddingTable t(3, 3, 2, h);
      for (Vector* data : {&t.target_data(), &t.context_data()}) {
        for (std::size_t off = 0; off < data->size(); off += 2) {
          const auto x = random_ball_point(rng, 2, 0.7);
          std::copy(x.begin(), x.end(), data->begin() + static_cast<std::ptrdiff_t>(off));
        }
      }
      for (auto& b : t.bias_target_data()) b = gauss(rng);
      for (auto& b : t.bias_context_data()) b = gauss(rng);
      const CoocEntry e{static_cast<WordId>(n % 3), static_cast<WordId>((n + 1) % 3), count(rng)};
      const WeightParams wp;
      const auto g = euclidean_gradients(e, t, h, wp);
      const double step = 1e-6;
      const auto diff = [&](double& p) {
        const double saved = p;
        p = saved + step;
        const double up = loss_term(e, t, h, wp);
        p = saved - step;
        const double down = loss_term(e, t, h, wp);
        p = saved;
        return (up - down) / (2 * step);
      };
      double num = 0.0, den = 0.0;
      const auto add = [&](double analytic, double fd) {
        num += (analytic - fd) * (analytic - fd);
        den += fd * fd;
      };
      for (std::size_t c = 0; c < t.width(); ++c) add(g.target[c], diff(t.target(e.i)[c]));
      for (std::size_t c = 0; c < t.width(); ++c) add(g.context[c], diff(t.context(e.j)[c]));
      add(g.bias_target, diff(t.bias_target(e.i)));
      add(g.bias_context, diff(t.bias_context(e.j)));
      worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-12));
    }
  }
  const double secs = clock.seconds();
  out.check(worst <= 1e-4, "relative error " + fmt(worst));
  out.check(secs < 5.0, "runtime " + fmt(secs) + " s");
  out.detail << "max relative error " << fmt(worst) << " over 200 instances; " << fmt(secs) << " s";
}

ProductPoint random_product(std::mt19937_64& rng, std::size_t p, std::size_t k, double r) {
  Vector v;
  for (std::size_t i = 0; i < p; ++i) {
    const auto f = random_ball_point(rng, k, r);
    v.insert(v.end(), f.begin(), f.end());
  }
  return ProductPoint(p, k, std::move(v));
}

void analogy_algebra(Outcome& out) {
  std::mt19937_64 rng(105);
  double eq6 = 0.0, mid = 0.0, limit = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const auto a = random_ball_point(rng, 2, 0.9);
    const auto b = random_ball_point(rng, 2, 0.9);
    const auto c = random_ball_point(rng, 2, 0.9);
    const auto d1 = mobius_add(c, gyration(c, mobius_neg(a), mobius_add(mobius_neg(a), b)));
    const auto ref = exp_map(c, parallel_transport(a, c, log_map(a, b)));
    eq6 = std::max(eq6, max_abs_diff(d1, ref));

    const auto pa = random_product(rng, 2, 2, 0.9);
    const auto pb = random_product(rng, 2, 2, 0.9);
    const auto pc = random_product(rng, 2, 2, 0.9);
    const auto [v1, v2] = gyro_parallelogram(pa, pb, pc);
    const auto m = analogy_answer(pa, pb, pc, 0.5);
    const auto swapped = factorwise(v2, v1, [](auto x, auto y) { return geodesic_point(x, y, 0.5); });
    mid = std::max(mid, max_abs_diff(m.coords(), swapped.coords()));
    mid = std::max(mid, std::abs(product_distance(m, v1) - product_distance(m, v2)));

    const auto ea = random_product(rng, 2, 2, 1e-2);
    const auto eb = random_product(rng, 2, 2, 1e-2);
    const auto ec = random_product(rng, 2, 2, 1e-2);
    const auto [e1, e2] = gyro_parallelogram(ea, eb, ec);
    Vector flat(4);
    for (int i = 0; i < 4; ++i) flat[i] = ec.coords()[i] + eb.coords()[i] - ea.coords()[i];
    Vector diff(4);
    for (int i = 0; i < 4; ++i) diff[i] = e1.coords()[i] - flat[i];
    limit = std::max(limit, norm(diff));
  }

  // Planted fixture: every gold word sits at the t = 0.3 point, with one
  // distractor at each other grid value.
  Vector data;
  std::vector<AnalogyQuery> queries;
  WordId next = 0;
  const auto add = [&](const ProductPoint& p) {
    data.insert(data.end(), p.coords().begin(), p.coords().end());
    return next++;
  };
  for (int n = 0; n < 60; ++n) {
    const auto a = random_product(rng, 2, 2, 0.7);
    const auto b = random_product(rng, 2, 2, 0.7);
    const auto c = random_product(rng, 2, 2, 0.7);
    AnalogyQuery q;
    q.a = add(a);
    q.b = add(b);
    q.c = add(c);
    for (int g = 0; g <= 10; ++g) {
      const WordId id = add(analogy_answer(a, b, c, g / 10.0));
      if (g == 3) q.gold = id;
    }
    queries.push_back(q);
  }
  const auto grid = default_t_grid();
  const auto cv = cross_validate_t(queries, PointTable{data, 2, 2}, grid, 7);

  out.check(eq6 <= 1e-8, "transport formulation " + fmt(eq6));
  out.check(mid <= 1e-9, "midpoint symmetry " + fmt(mid));
  out.check(limit <= 1e-5, "euclidean limit " + fmt(limit));
  out.check(cv.selected_t[0] == 0.3 && cv.selected_t[1] == 0.3, "cross-validated t");
  out.detail << "max errors: formulation " << fmt(eq6) << ", midpoint " << fmt(mid) << ", euclidean limit "
             << fmt(limit) << "; selected t " << fmt(cv.selected_t[0]) << " / " << fmt(cv.selected_t[1]);
}

// ---------------------------------------------------------------------------
// Corpus-backed criteria

struct Pipeline {
  testing::Taxonomy taxonomy = testing::make_taxonomy();
  Vocab vocab;
  CoocMatrix cooc;
};

// Writes the generated corpus to disk and counts it back from the file.
Pipeline corpus_pipeline(std::size_t megabytes, const std::filesystem::path& dir) {
  Pipeline p;
  testing::CorpusOptions opt;
  opt.target_bytes = megabytes << 20;
  const auto file = dir / ("corpus_" + std::to_string(megabytes) + "mb.txt");
  testing::write_corpus(testing::make_corpus(p.taxonomy, opt), file);
  {
    std::ifstream in(file, std::ios::binary);
    p.vocab = build_vocab(in, 1);
  }
  std::ifstream in(file, std::ios::binary);
  p.cooc = count_cooccurrences(in, p.vocab, 5, Weighting::harmonic);
  return p;
}

void delta_hyperbolicity(Outcome& out, const std::filesystem::path& dir) {
  const auto star = [](std::size_t i, std::size_t j, std::size_t&) -> std::optional<double> {
    if (i == j) return 0.0;
    return (i == 0 || j == 0) ? 1.0 : 2.0;
  };
  DeltaOptions small;
  small.n_tuples = 20000;
  small.n_pairs = 20000;
  const auto st = estimate_delta(8, star, small);
  out.check(st.delta_avg == 0.0, "star tree delta " + fmt(st.delta_avg));

  const double s2 = std::numbers::sqrt2;
  const double square = tuple_delta({1.0, 1.0, s2, s2, 1.0, 1.0});
  out.check(std::abs(square - (s2 - 1.0)) <= 1e-12, "unit square");

  std::mt19937_64 rng(106);
  std::vector<Vector> pts;
  for (int n = 0; n < 2000; ++n) pts.push_back(random_ball_point(rng, 2, 0.95));
  const auto disk = [&](double c) {
    return [&pts, c](std::size_t i, std::size_t j, std::size_t&) -> std::optional<double> {
      return c * ball_distance(pts[i], pts[j]);
    };
  };
  DeltaOptions opt;
  opt.n_tuples = 50000;
  opt.n_pairs = 20000;
  const auto base = estimate_delta(pts.size(), disk(1.0), opt);
  const double bound = std::log(1.0 + s2) + 0.05;
  out.check(base.delta_max <= bound, "disk max delta " + fmt(base.delta_max));
  bool exact = true;
  for (double c : {0.125, 0.5, 4.0, 1024.0}) {
    exact = exact && estimate_delta(pts.size(), disk(c), opt).ratio == base.ratio;
  }
  out.check(exact, "ratio scaling");

  const auto p = corpus_pipeline(5, dir);
  DeltaOptions copt;
  copt.seed = 7;
  double ratio[3];
  const int ks[3] = {1, 2, 4};
  for (int n = 0; n < 3; ++n) {
    const InducedMetric metric{&p.cooc, HFunction::cosh_pow(ks[n]), Smoothing::none, 0};
    ratio[n] = estimate_delta(metric, copt).ratio;
  }
  out.check(ratio[0] >= ratio[1] && ratio[1] >= ratio[2], "cosh^k ratio trend");
  out.detail << "star " << fmt(st.delta_avg) << ", square " << fmt(square) << ", disk max " << fmt(base.delta_max)
             << " (bound " << fmt(bound) << "), corpus ratio k=1,2,4: " << fmt(ratio[0]) << ", " << fmt(ratio[1])
             << ", " << fmt(ratio[2]);
}

void hypernymy_score(Outcome& out) {
  const Stopwatch clock;
  std::mt19937_64 rng(107);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> pow2(-8, 8);
  const auto random_gaussian = [&](std::size_t p) {
    GaussianEmbedding g;
    for (std::size_t i = 0; i < p; ++i) {
      g.mu.push_back(gauss(rng));
      g.sigma.push_back(std::exp(2.0 * gauss(rng)));
    }
    return g;
  };
  bool anti = true, additive = true, rescale = true;
  for (int n = 0; n < 10000; ++n) {
    const auto a = random_gaussian(10), b = random_gaussian(10), c = random_gaussian(10);
    anti = anti && isa_score(a, b) == -isa_score(b, a);
    additive = additive && isa_score(a, c) == isa_score(a, b) + isa_score(b, c);
    const int k = pow2(rng);
    auto as = a, bs = b;
    for (auto& s : as.sigma) s = std::ldexp(s, k);
    for (auto& s : bs.sigma) s = std::ldexp(s, k);
    rescale = rescale && isa_score(as, bs) == isa_score(a, b);
  }
  out.check(anti, "antisymmetry");
  out.check(additive, "transitive additivity");
  out.check(rescale, "rescaling invariance");

  testing::CorpusOptions copt;
  copt.target_bytes = 3u << 20;
  const auto tax = testing::make_taxonomy();
  const auto lines = testing::make_corpus(tax, copt);
  const auto vocab = build_vocab(lines, 1);
  const auto cooc = count_cooccurrences(lines, vocab, 5, Weighting::harmonic);
  TrainConfig cfg;
  cfg.factors = 10;
  cfg.dim = 2;
  cfg.h = HFunction::cosh_pow(2);
  cfg.lr = 0.05;
  cfg.epochs = 40;
  cfg.weight.x_max = 10.0;
  const auto model = train(cooc, cfg).table;
  const auto points = target_points(model);
  const auto sets = select_sets_unsupervised(vocab.size(), 50, 1000);
  const auto gaussians = gaussians_for(points, fit_isometry(points, sets));
  std::size_t positive = 0;
  const auto edges = tax.edges();
  for (const auto& [child, parent] : edges) {
    positive += isa_score(gaussians[*vocab.find(child)], gaussians[*vocab.find(parent)]) > 0.0 ? 1 : 0;
  }
  const double frac = static_cast<double>(positive) / static_cast<double>(edges.size());
  const double secs = clock.seconds();
  out.check(frac >= 0.8, "positive edge fraction " + fmt(frac));
  out.check(secs < 300.0, "runtime " + fmt(secs) + " s");
  out.detail << "isa(child, parent) > 0 on " << positive << "/" << edges.size() << " gold edges (" << fmt(frac)
             << ") over " << vocab.size() << " words; " << fmt(secs) << " s";
}

void training_smoke(Outcome& out, const std::filesystem::path& dir) {
  const Stopwatch clock;
  const auto p = corpus_pipeline(10, dir);
  TrainConfig cfg;
  cfg.factors = 10;
  cfg.dim = 2;
  cfg.h = HFunction::cosh_pow(2);
  cfg.lr = 0.05;
  cfg.epochs = 15;
  cfg.threads = 1;
  cfg.mode = TrainMode::deterministic;
  const auto res = train(p.cooc, cfg);
  bool decreasing = true;
  for (std::size_t e = 1; e + 1 < res.epoch_loss.size(); ++e) {
    decreasing = decreasing && res.epoch_loss[e + 1] < res.epoch_loss[e];
  }
  double max_norm = 0.0;
  for (const Vector* data : {&res.table.target_data(), &res.table.context_data()}) {
    for (std::size_t off = 0; off < data->size(); off += 2) {
      max_norm = std::max(max_norm, norm(std::span<const double>(*data).subspan(off, 2)));
    }
  }
  const auto rows = testing::tree_similarity_rows(p.taxonomy, 2000, 3);
  const auto lookup = [&](std::string_view w) { return p.vocab.find(w); };
  const double trained = *eval_similarity(rows, target_points(res.table), lookup).spearman;
  const auto init = fresh_table(p.vocab.size(), 10, 2, cfg.h, 12345);
  const double baseline = *eval_similarity(rows, target_points(init), lookup).spearman;
  const double secs = clock.seconds();
  out.check(decreasing, "epoch loss not strictly decreasing after epoch 2");
  out.check(max_norm <= 1.0 - kBallEps, "point outside ball " + fmt(max_norm));
  out.check(trained - baseline >= 0.15, "similarity gain " + fmt(trained - baseline));
  out.check(secs < 600.0, "runtime " + fmt(secs) + " s");
  out.detail << "loss " << fmt(res.epoch_loss.front()) << " -> " << fmt(res.epoch_loss.back()) << ", max factor norm "
             << fmt(max_norm) << ", spearman " << fmt(trained) << " vs random init " << fmt(baseline) << "; "
             << fmt(secs) << " s";
}

struct RunArtifacts {
  std::vector<char> model;
  double similarity = 0.0;
  double hyperlex = 0.0;
  double wbless = 0.0;
  DeltaEstimate delta;
};

RunArtifacts determinism_run(const std::filesystem::path& dir) {
  const auto p = corpus_pipeline(1, dir);
  TrainConfig cfg;
  cfg.factors = 4;
  cfg.dim = 2;
  cfg.lr = 0.05;
  cfg.epochs = 3;
  cfg.seed = 11;
  const auto model = train(p.cooc, cfg).table;
  const auto lookup = [&](std::string_view w) { return p.vocab.find(w); };
  RunArtifacts r;
  r.model = encode_model(model);
  const auto points = target_points(model);
  r.similarity = *eval_similarity(testing::tree_similarity_rows(p.taxonomy, 500, 4), points, lookup).spearman;
  const auto sets = select_sets_unsupervised(p.vocab.size(), 50, 1000);
  const auto gaussians = gaussians_for(points, fit_isometry(points, sets));
  std::vector<WordPairRow> graded, binary;
  for (const auto& [child, parent] : p.taxonomy.edges()) {
    graded.push_back({child, parent, 1.0});
    graded.push_back({parent, child, 0.0});
    binary.push_back({child, parent, 1.0});
    binary.push_back({parent, child, 0.0});
  }
  r.hyperlex = *eval_hyperlex(graded, gaussians, lookup).spearman;
  WblessOptions wopt;
  wopt.repeats = 100;
  r.wbless = eval_wbless(binary, gaussians, lookup, wopt).mean_accuracy;
  DeltaOptions dopt;
  dopt.n_tuples = 20000;
  dopt.n_pairs = 20000;
  r.delta = estimate_delta(InducedMetric{&p.cooc, HFunction::cosh_pow(2), Smoothing::none, 0}, dopt);
  return r;
}

void determinism(Outcome& out, const std::filesystem::path& dir) {
  const auto a = determinism_run(dir);
  const auto b = determinism_run(dir);
  out.check(a.model == b.model, "model bytes differ");
  out.check(a.similarity == b.similarity && a.hyperlex == b.hyperlex && a.wbless == b.wbless, "metrics differ");
  out.check(a.delta.delta_avg == b.delta.delta_avg && a.delta.d_avg == b.delta.d_avg &&
                a.delta.ratio == b.delta.ratio && a.delta.n_samples == b.delta.n_samples,
            "delta estimates differ");
  out.detail << "model " << a.model.size() << " bytes identical: " << (a.model == b.model ? "yes" : "no")
             << "; similarity " << fmt(a.similarity) << ", hyperlex " << fmt(a.hyperlex) << ", wbless "
             << fmt(a.wbless) << ", delta ratio " << fmt(a.delta.ratio);
}

}  // namespace
}  // namespace hglove

int main(int argc, char** argv) {
  using namespace hglove;
  const auto dir = testing::scratch_dir("acceptance");
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"gyrovector algebra", gyrovector_suite},
      {"disk/half-plane isometry", isometry_suite},
      {"fisher/half-plane consistency", fisher_consistency},
      {"gradient check", gradient_check},
      {"analogy algebra", analogy_algebra},
      {"delta-hyperbolicity", [&](Outcome& o) { delta_hyperbolicity(o, dir); }},
      {"hypernymy score", hypernymy_score},
      {"end-to-end training", [&](Outcome& o) { training_smoke(o, dir); }},
      {"determinism", [&](Outcome& o) { determinism(o, dir); }},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  bool all = true;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    const int id = static_cast<int>(n + 1);
    if (!only.empty() && !only.count(id)) continue;
    Outcome out;
    try {
      criteria[n].second(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    all = all && out.pass;
    std::printf("%s %d %s: %s\n", out.pass ? "PASS" : "FAIL", id, criteria[n].first.c_str(), out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::filesystem::remove_all(dir);
  return all ? 0 : 1;
}
