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

// Word analogies "a : b :: c : ?" in products of Poincare balls.
//
// The two hyperbolic parallelogram completions are
//
//   d1 = c (+) gyr[c, -a](-a (+) b)      (generalizes c + (b - a))
//   d2 = b (+) gyr[b, -a](-a (+) c)      (generalizes b + (c - a))
//
// and the answer is the point at fraction t on the geodesic from d1 to d2.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hglove/corpus.hpp"
#include "hglove/embedding.hpp"
#include "hglove/error.hpp"
#include "hglove/manifold.hpp"
#include "hglove/random.hpp"

namespace hglove {

namespace detail {

inline Vector parallelogram_vertex(std::span<const double> a, std::span<const double> b,
                                   std::span<const double> c) {
  const Vector neg_a = mobius_neg(a);
  return mobius_add(c, gyration(c, neg_a, mobius_add_unprojected(neg_a, b)));
}

}  // namespace detail

/// Both parallelogram completions (d1, d2), computed factor-wise.
inline std::pair<ProductPoint, ProductPoint> gyro_parallelogram(const ProductPoint& a,
                                                                const ProductPoint& b,
                                                                const ProductPoint& c) {
  if (a.factors() != b.factors() || a.factors() != c.factors() || a.dim() != b.dim() ||
      a.dim() != c.dim()) {
    throw StructuralError("gyro_parallelogram: shape mismatch");
  }
  Vector d1, d2;
  d1.reserve(a.coords().size());
  d2.reserve(a.coords().size());
  for (std::size_t i = 0; i < a.factors(); ++i) {
    const auto v1 = detail::parallelogram_vertex(a.factor(i), b.factor(i), c.factor(i));
    const auto v2 = detail::parallelogram_vertex(a.factor(i), c.factor(i), b.factor(i));
    d1.insert(d1.end(), v1.begin(), v1.end());
    d2.insert(d2.end(), v2.begin(), v2.end());
  }
  return {ProductPoint(a.factors(), a.dim(), std::move(d1)),
          ProductPoint(a.factors(), a.dim(), std::move(d2))};
}

/// m^t between d1 and d2; t in [0, 1].
inline ProductPoint analogy_answer(const ProductPoint& a, const ProductPoint& b,
                                   const ProductPoint& c, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw StructuralError("analogy_answer: t must lie in [0, 1]");
  const auto [d1, d2] = gyro_parallelogram(a, b, c);
  return factorwise(d1, d2, [t](auto x, auto y) { return geodesic_point(x, y, t); });
}

enum class NeighborMetric { poincare_distance, cosine };

/// Read-only view of V points stored as contiguous blocks of factors * dim.
struct PointTable {
  std::span<const double> data;
  std::size_t factors = 1;
  std::size_t dim = 1;

  std::size_t width() const noexcept { return factors * dim; }
  std::size_t size() const noexcept { return width() == 0 ? 0 : data.size() / width(); }
  std::span<const double> row(std::size_t w) const { return data.subspan(w * width(), width()); }
};

inline PointTable target_points(const EmbeddingTable& t) {
  return {t.target_data(), t.factors(), t.dim()};
}

/// Per-factor gyro-midpoint of target and context vectors ("w + w~").
inline Vector combined_vectors(const EmbeddingTable& t) {
  Vector out(t.target_data().size());
  const std::size_t k = t.dim();
  for (std::size_t off = 0; off < out.size(); off += k) {
    const auto w = std::span<const double>(t.target_data()).subspan(off, k);
    const auto c = std::span<const double>(t.context_data()).subspan(off, k);
    const auto m = geodesic_point(w, c, 0.5);
    std::copy(m.begin(), m.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
  }
  return out;
}

/// Nearest-neighbour search over a fixed point table. Precomputes per-factor
/// 1 - |x|^2 terms and norms; the Poincare scan abandons a candidate once its
/// partial squared distance reaches the best so far. Ties go to the lowest id.
class NeighborIndex {
 public:
  explicit NeighborIndex(PointTable table) : table_(table) {
    const std::size_t n = table_.size();
    alpha_.resize(n * table_.factors);
    norms_.resize(n);
    for (std::size_t w = 0; w < n; ++w) {
      const auto row = table_.row(w);
      for (std::size_t q = 0; q < table_.factors; ++q) {
        alpha_[w * table_.factors + q] = 1.0 - squared_norm(row.subspan(q * table_.dim, table_.dim));
      }
      norms_[w] = norm(row);
    }
  }

  std::size_t size() const noexcept { return table_.size(); }

  /// Nearest word to q, skipping ids in `exclude`. Throws StructuralError
  /// when no candidate remains.
  WordId nearest(std::span<const double> q, NeighborMetric metric,
                 std::span<const WordId> exclude = {}) const {
    if (q.size() != table_.width()) throw StructuralError("nearest_word: query width mismatch");
    const auto excluded = [&](std::size_t w) {
      return std::find(exclude.begin(), exclude.end(), static_cast<WordId>(w)) != exclude.end();
    };
    std::optional<WordId> best;
    if (metric == NeighborMetric::poincare_distance) {
      const std::size_t k = table_.dim;
      std::vector<double> q_alpha(table_.factors);
      for (std::size_t f = 0; f < table_.factors; ++f) q_alpha[f] = 1.0 - squared_norm(q.subspan(f * k, k));
      double best_sq = std::numeric_limits<double>::infinity();
      for (std::size_t w = 0; w < size(); ++w) {
        if (excluded(w)) continue;
        const auto row = table_.row(w);
        double sum = 0.0;
        for (std::size_t f = 0; f < table_.factors && sum < best_sq; ++f) {
          const double arg = 1.0 + 2.0 * squared_euclidean_distance(q.subspan(f * k, k), row.subspan(f * k, k)) /
                                       (q_alpha[f] * alpha_[w * table_.factors + f]);
          const double d = detail::safe_acosh(arg);
          sum += d * d;
        }
        if (sum < best_sq) {
          best_sq = sum;
          best = static_cast<WordId>(w);
        }
      }
    } else {
      const double qn = norm(q);
      double best_cos = -std::numeric_limits<double>::infinity();
      for (std::size_t w = 0; w < size(); ++w) {
        if (excluded(w) || norms_[w] == 0.0) continue;
        const double c = qn == 0.0 ? 0.0 : dot(q, table_.row(w)) / (qn * norms_[w]);
        if (c > best_cos) {
          best_cos = c;
          best = static_cast<WordId>(w);
        }
      }
    }
    if (!best) throw StructuralError("nearest_word: empty candidate set");
    return *best;
  }

  /// argmax_d cos(d, c) + cos(d, b) - cos(d, a) over non-excluded words
  /// with non-zero norm.
  WordId three_cos_add(std::span<const double> a, std::span<const double> b,
                       std::span<const double> c, std::span<const WordId> exclude) const {
    const double an = norm(a), bn = norm(b), cn = norm(c);
    const auto cosine = [](std::span<const double> x, double xn, std::span<const double> y, double yn) {
      return xn == 0.0 || yn == 0.0 ? 0.0 : dot(x, y) / (xn * yn);
    };
    std::optional<WordId> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < size(); ++w) {
      if (norms_[w] == 0.0) continue;
      if (std::find(exclude.begin(), exclude.end(), static_cast<WordId>(w)) != exclude.end()) continue;
      const auto d = table_.row(w);
      const double s = cosine(d, norms_[w], c, cn) + cosine(d, norms_[w], b, bn) - cosine(d, norms_[w], a, an);
      if (s > best_score) {
        best_score = s;
        best = static_cast<WordId>(w);
      }
    }
    if (!best) throw StructuralError("three_cos_add: empty candidate set");
    return *best;
  }

 private:
  PointTable table_;
  std::vector<double> alpha_;
  std::vector<double> norms_;
};

inline WordId nearest_word(std::span<const double> q, PointTable table, NeighborMetric metric,
                           std::span<const WordId> exclude = {}) {
  return NeighborIndex(table).nearest(q, metric, exclude);
}

inline WordId three_cos_add(WordId a, WordId b, WordId c, PointTable table) {
  const std::array<WordId, 3> exclude{a, b, c};
  return NeighborIndex(table).three_cos_add(table.row(a), table.row(b), table.row(c), exclude);
}

// ---------------------------------------------------------------------------
// Datasets and evaluation

enum class AnalogySplit { semantic, syntactic };

struct AnalogyRow {
  std::array<std::string, 4> words;  // a b c gold
  AnalogySplit split = AnalogySplit::semantic;
  std::string section;
};

/// Google-format file: "a b c gold" lines, ": <name>" section headers.
/// Sections whose name starts with "gram" are syntactic.
inline std::vector<AnalogyRow> load_analogy_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<AnalogyRow> rows;
  std::string line;
  std::string section;
  AnalogySplit split = AnalogySplit::semantic;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_tokens(line);
    if (toks.empty()) continue;
    if (toks[0] == ":") {
      section = toks.size() > 1 ? std::string(toks[1]) : std::string();
      split = section.rfind("gram", 0) == 0 ? AnalogySplit::syntactic : AnalogySplit::semantic;
      continue;
    }
    if (toks.size() != 4) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 4 words");
    }
    AnalogyRow row;
    for (int i = 0; i < 4; ++i) row.words[i] = std::string(toks[i]);
    row.split = split;
    row.section = section;
    rows.push_back(std::move(row));
  }
  return rows;
}

struct AnalogyQuery {
  WordId a = 0, b = 0, c = 0, gold = 0;
  AnalogySplit split = AnalogySplit::semantic;
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

template <typename Lookup>
std::optional<WordId> lookup_word(const Lookup& lookup, std::string_view w) {
  if (auto id = lookup(w)) return id;
  const auto lower = ascii_lower(w);
  if (lower != w) return lookup(lower);
  return std::nullopt;
}

}  // namespace detail

struct ResolvedAnalogies {
  std::vector<AnalogyQuery> queries;
  std::size_t dropped_semantic = 0;
  std::size_t dropped_syntactic = 0;
};

/// Maps rows to word ids (exact match, then ASCII-lowercased); rows with an
/// out-of-vocabulary word are dropped and counted per split.
template <typename Lookup>
ResolvedAnalogies resolve_analogies(std::span<const AnalogyRow> rows, const Lookup& lookup) {
  ResolvedAnalogies out;
  for (const auto& row : rows) {
    std::array<WordId, 4> ids{};
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      const auto id = detail::lookup_word(lookup, row.words[i]);
      if (id) {
        ids[i] = *id;
      } else {
        ok = false;
      }
    }
    if (!ok) {
      (row.split == AnalogySplit::semantic ? out.dropped_semantic : out.dropped_syntactic)++;
      continue;
    }
    out.queries.push_back({ids[0], ids[1], ids[2], ids[3], row.split});
  }
  return out;
}

enum class AnalogyMethod { gyro, three_cos_add };

struct AnalogyOptions {
  AnalogyMethod method = AnalogyMethod::gyro;
  NeighborMetric metric = NeighborMetric::poincare_distance;
  double t = 0.3;
  unsigned threads = 1;
};

struct SplitCounts {
  std::size_t correct = 0;
  std::size_t evaluated = 0;
  std::size_t dropped = 0;

  double accuracy() const { return evaluated == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(evaluated); }
};

struct AnalogyResult {
  SplitCounts semantic;
  SplitCounts syntactic;
  std::vector<WordId> predictions;  // one per resolved query

  SplitCounts total() const {
    return {semantic.correct + syntactic.correct, semantic.evaluated + syntactic.evaluated,
            semantic.dropped + syntactic.dropped};
  }
};

/// Answers each query against `points` and counts hits per split. Query
/// words are excluded from the candidates.
inline AnalogyResult eval_analogy(std::span<const AnalogyQuery> queries, PointTable points,
                                  const AnalogyOptions& opts) {
  const NeighborIndex index(points);
  AnalogyResult result;
  result.predictions.assign(queries.size(), 0);
  const auto answer = [&](std::size_t n) {
    const auto& q = queries[n];
    const std::array<WordId, 3> exclude{q.a, q.b, q.c};
    if (opts.method == AnalogyMethod::three_cos_add) {
      return index.three_cos_add(points.row(q.a), points.row(q.b), points.row(q.c), exclude);
    }
    const auto to_point = [&](WordId w) {
      const auto r = points.row(w);
      return ProductPoint(points.factors, points.dim, Vector(r.begin(), r.end()));
    };
    const auto m = analogy_answer(to_point(q.a), to_point(q.b), to_point(q.c), opts.t);
    return index.nearest(m.coords(), opts.metric, exclude);
  };

  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1 || queries.size() < 2 * threads) {
    for (std::size_t n = 0; n < queries.size(); ++n) result.predictions[n] = answer(n);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t n = t; n < queries.size(); n += threads) result.predictions[n] = answer(n);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t n = 0; n < queries.size(); ++n) {
    auto& counts = queries[n].split == AnalogySplit::semantic ? result.semantic : result.syntactic;
    ++counts.evaluated;
    if (result.predictions[n] == queries[n].gold) ++counts.correct;
  }
  return result;
}

/// Evaluates a raw dataset against a model, including OOV accounting.
inline AnalogyResult eval_analogy(std::span<const AnalogyRow> rows, const EmbeddingTable& model,
                                  PointTable points, const AnalogyOptions& opts) {
  const auto resolved = resolve_analogies(rows, [&](std::string_view w) { return model.find(w); });
  auto result = eval_analogy(resolved.queries, points, opts);
  result.semantic.dropped = resolved.dropped_semantic;
  result.syntactic.dropped = resolved.dropped_syntactic;
  return result;
}

struct CrossValidationResult {
  std::array<double, 2> selected_t{};
  std::array<double, 2> validation_accuracy{};
  std::array<double, 2> test_accuracy{};
  std::array<std::vector<WordId>, 2> fold_queries;  // query indices per half
};

inline std::vector<double> default_t_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

/// Two-fold selection of t: split the queries in two random halves; on
/// each half pick the grid value with the best accuracy (ties -> smaller t)
/// and report its accuracy on the other half.
inline CrossValidationResult cross_validate_t(std::span<const AnalogyQuery> queries,
                                              PointTable points, std::span<const double> grid,
                                              std::uint64_t seed,
                                              NeighborMetric metric = NeighborMetric::poincare_distance,
                                              unsigned threads = 1) {
  if (grid.empty()) throw StructuralError("cross_validate_t: empty grid");
  std::vector<WordId> order(queries.size());
  for (std::size_t n = 0; n < order.size(); ++n) order[n] = static_cast<WordId>(n);
  Rng rng(seed, 0xc0ffee);
  rng.shuffle(std::span<WordId>(order));
  const std::size_t half = order.size() / 2;
  CrossValidationResult res;
  std::array<std::vector<AnalogyQuery>, 2> folds;
  for (std::size_t n = 0; n < order.size(); ++n) {
    const int f = n < half ? 0 : 1;
    folds[f].push_back(queries[order[n]]);
    res.fold_queries[f].push_back(order[n]);
  }
  const auto accuracy = [&](const std::vector<AnalogyQuery>& qs, double t) {
    AnalogyOptions opts;
    opts.metric = metric;
    opts.t = t;
    opts.threads = threads;
    return eval_analogy(qs, points, opts).total().accuracy();
  };
  for (int f = 0; f < 2; ++f) {
    double best_acc = -1.0;
    double best_t = grid.front();
    for (double t : grid) {
      const double acc = accuracy(folds[f], t);
      if (acc > best_acc || (acc == best_acc && t < best_t)) {
        best_acc = acc;
        best_t = t;
      }
    }
    res.selected_t[f] = best_t;
    res.validation_accuracy[f] = best_acc;
    res.test_accuracy[f] = accuracy(folds[1 - f], best_t);
  }
  return res;
}

}  // namespace hglove
