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

// Benchmark harness: word similarity and graded entailment (Spearman) and
// binary entailment classification with a held-out threshold.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hglove/analogy.hpp"
#include "hglove/error.hpp"
#include "hglove/hypernymy.hpp"
#include "hglove/manifold.hpp"
#include "hglove/random.hpp"

namespace hglove {

/// 1-based ranks; tied values share their average rank.
inline Vector average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  Vector ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

/// Pearson correlation of the rank vectors. nullopt when either side has
/// zero rank variance.
inline std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw StructuralError("spearman: length mismatch");
  if (xs.size() < 2) throw StructuralError("spearman: need at least 2 values");
  const Vector rx = average_ranks(xs);
  const Vector ry = average_ranks(ys);
  const double mean = (static_cast<double>(xs.size()) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double a = rx[i] - mean, b = ry[i] - mean;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Datasets

struct WordPairRow {
  std::string first;
  std::string second;
  double gold = 0.0;
};

enum class LabelKind { graded, binary };

namespace detail {

inline std::optional<double> parse_label(std::string_view s, LabelKind kind) {
  if (kind == LabelKind::binary) {
    if (s == "1" || s == "True" || s == "true") return 1.0;
    if (s == "0" || s == "False" || s == "false") return 0.0;
    return std::nullopt;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// "word1<TAB>word2<TAB>value" lines. Blank lines and lines starting with
/// '#' are skipped; extra columns are ignored.
inline std::vector<WordPairRow> load_word_pairs(const std::filesystem::path& path,
                                                LabelKind kind = LabelKind::graded) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<WordPairRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (;;) {
      const auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    const auto where = [&] { return path.string() + ":" + std::to_string(lineno); };
    if (cols.size() < 3) throw DataError(where() + ": expected word1<TAB>word2<TAB>value");
    const auto v = detail::parse_label(cols[2], kind);
    if (!v) throw DataError(where() + ": bad value '" + std::string(cols[2]) + "'");
    rows.push_back({std::string(cols[0]), std::string(cols[1]), *v});
  }
  if (rows.empty()) throw DataError(path.string() + ": no rows");
  return rows;
}

// ---------------------------------------------------------------------------
// Evaluators

struct RowDetail {
  std::string first;
  std::string second;
  double gold = 0.0;
  std::optional<double> score;  // nullopt when dropped
};

struct RankEvaluation {
  std::optional<double> spearman;
  std::size_t n_used = 0;
  std::size_t n_dropped = 0;
  std::vector<RowDetail> details;
};

namespace detail {

template <typename Lookup, typename Score>
RankEvaluation rank_evaluation(std::span<const WordPairRow> rows, const Lookup& lookup, const Score& score) {
  RankEvaluation out;
  Vector model, gold;
  for (const auto& row : rows) {
    RowDetail d{row.first, row.second, row.gold, std::nullopt};
    const auto a = lookup_word(lookup, row.first);
    const auto b = lookup_word(lookup, row.second);
    if (a && b) {
      d.score = score(*a, *b);
      model.push_back(*d.score);
      gold.push_back(row.gold);
      ++out.n_used;
    } else {
      ++out.n_dropped;
    }
    out.details.push_back(std::move(d));
  }
  if (out.n_used == 0) throw DataError("evaluation: every row is out of vocabulary");
  if (out.n_used >= 2) out.spearman = hglove::spearman(model, gold);
  return out;
}

inline double cosine(std::span<const double> x, std::span<const double> y) {
  const double nx = norm(x), ny = norm(y);
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return dot(x, y) / (nx * ny);
}

}  // namespace detail

/// Model similarity is -product_distance (hyperbolic) or cosine of the
/// concatenated factors; rows with an unknown word are dropped.
template <typename Lookup>
RankEvaluation eval_similarity(std::span<const WordPairRow> rows, PointTable points, const Lookup& lookup,
                               NeighborMetric metric = NeighborMetric::poincare_distance) {
  return detail::rank_evaluation(rows, lookup, [&](WordId a, WordId b) {
    if (metric == NeighborMetric::cosine) return detail::cosine(points.row(a), points.row(b));
    return -product_distance(points.row(a), points.row(b), points.factors);
  });
}

/// Spearman between isa_score(hyponym, hypernym) and the graded gold.
template <typename Lookup>
RankEvaluation eval_hyperlex(std::span<const WordPairRow> rows, std::span<const GaussianEmbedding> gaussians,
                             const Lookup& lookup) {
  return detail::rank_evaluation(
      rows, lookup, [&](WordId a, WordId b) { return isa_score(gaussians[a], gaussians[b]); });
}

struct WblessOptions {
  double holdout = 0.02;
  std::size_t repeats = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t max_resamples = 100;
};

struct WblessResult {
  double mean_accuracy = 0.0;
  std::size_t n_used = 0;
  std::size_t n_dropped = 0;
  std::size_t resamples = 0;  // holdouts redrawn for containing one class
  std::vector<RowDetail> details;
};

/// Threshold maximizing accuracy of "positive iff score > threshold" on the
/// given rows. Candidates are midpoints between adjacent distinct scores
/// plus one below the minimum and one above the maximum; ties keep the
/// smallest threshold.
inline double best_threshold(std::span<const double> scores, std::span<const char> labels) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Threshold below everything: all predicted positive.
  std::size_t correct = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  std::size_t best = correct;
  double best_t = scores.empty() ? 0.0 : scores[order.front()] - 1.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      // The row flips to a negative prediction.
      if (labels[order[j]]) {
        --correct;
      } else {
        ++correct;
      }
      ++j;
    }
    if (correct > best) {
      best = correct;
      best_t = j < order.size() ? (scores[order[i]] + scores[order[j]]) / 2.0 : scores[order[i]] + 1.0;
    }
    i = j;
  }
  return best_t;
}

/// Per repeat: draw a holdout of max(2, round(holdout * n)) rows, fit the
/// threshold on it, and score the remaining rows. Reports the mean
/// accuracy over repeats. Each repeat uses its own RNG substream.
template <typename Lookup>
WblessResult eval_wbless(std::span<const WordPairRow> rows, std::span<const GaussianEmbedding> gaussians,
                         const Lookup& lookup, const WblessOptions& opt = {}) {
  WblessResult out;
  Vector scores;
  std::vector<char> labels;
  for (const auto& row : rows) {
    RowDetail d{row.first, row.second, row.gold, std::nullopt};
    const auto a = detail::lookup_word(lookup, row.first);
    const auto b = detail::lookup_word(lookup, row.second);
    if (a && b) {
      d.score = isa_score(gaussians[*a], gaussians[*b]);
      scores.push_back(*d.score);
      labels.push_back(row.gold > 0.5);
      ++out.n_used;
    } else {
      ++out.n_dropped;
    }
    out.details.push_back(std::move(d));
  }
  if (out.n_used == 0) throw DataError("eval_wbless: every row is out of vocabulary");
  if (opt.repeats == 0) throw StructuralError("eval_wbless: repeats must be positive");
  if (!(opt.holdout > 0.0 && opt.holdout < 1.0)) throw StructuralError("eval_wbless: holdout must lie in (0, 1)");
  const std::size_t n = scores.size();
  const std::size_t positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0 || positives == n) throw DataError("eval_wbless: labels contain a single class");
  const std::size_t h = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(opt.holdout * n)));
  if (h >= n) throw DataError("eval_wbless: too few rows for a holdout split");

  Vector accuracy(opt.repeats);
  std::vector<std::size_t> resamples(opt.repeats, 0);
  const auto run = [&](std::size_t r) {
    Rng rng(opt.seed, r);
    std::vector<std::size_t> idx(n);
    Vector hs(h);
    std::vector<char> hl(h);
    for (std::size_t attempt = 0;; ++attempt) {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      rng.shuffle(std::span<std::size_t>(idx));
      std::size_t pos = 0;
      for (std::size_t k = 0; k < h; ++k) pos += labels[idx[k]] ? 1 : 0;
      if (pos != 0 && pos != h) break;
      if (attempt + 1 >= opt.max_resamples) throw DataError("eval_wbless: holdout kept drawing a single class");
      ++resamples[r];
    }
    for (std::size_t k = 0; k < h; ++k) {
      hs[k] = scores[idx[k]];
      hl[k] = labels[idx[k]];
    }
    const double t = best_threshold(hs, hl);
    std::size_t correct = 0;
    for (std::size_t k = h; k < n; ++k) correct += ((scores[idx[k]] > t) == (labels[idx[k]] != 0)) ? 1 : 0;
    accuracy[r] = static_cast<double>(correct) / static_cast<double>(n - h);
  };

  const unsigned threads = std::max(1u, opt.threads);
  if (threads == 1) {
    for (std::size_t r = 0; r < opt.repeats; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t r = t; r < opt.repeats; r += threads) run(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  double sum = 0.0;
  for (std::size_t r = 0; r < opt.repeats; ++r) {
    sum += accuracy[r];
    out.resamples += resamples[r];
  }
  out.mean_accuracy = sum / static_cast<double>(opt.repeats);
  return out;
}

// ---------------------------------------------------------------------------
// Detail log

/// One JSON object per row: words, gold value, model score (null when
/// dropped) and a used flag.
inline void write_details_jsonl(std::ostream& out, std::span<const RowDetail> details) {
  for (const auto& d : details) {
    nlohmann::json j;
    j["word1"] = d.first;
    j["word2"] = d.second;
    j["gold"] = d.gold;
    j["score"] = d.score ? nlohmann::json(*d.score) : nlohmann::json(nullptr);
    j["used"] = d.score.has_value();
    out << j.dump() << '\n';
  }
}

inline void write_details_jsonl(const std::filesystem::path& path, std::span<const RowDetail> details) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_details_jsonl(out, details);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace hglove
