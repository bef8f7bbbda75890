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

// Sampled Gromov delta-hyperbolicity of finite metric spaces, including the
// metric induced on words by co-occurrence counts:
//
//   d(i, j) = h^{-1}(log(X_i X_j / X_ij))

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "hglove/corpus.hpp"
#include "hglove/error.hpp"
#include "hglove/hfunction.hpp"
#include "hglove/random.hpp"

namespace hglove {

struct FourTupleDistances {
  double xy = 0.0, zt = 0.0;
  double xz = 0.0, yt = 0.0;
  double xt = 0.0, yz = 0.0;
};

/// Half the gap between the two largest of the three pairing sums.
inline double tuple_delta(const FourTupleDistances& d) {
  std::array<double, 3> s{d.xy + d.zt, d.xz + d.yt, d.xt + d.yz};
  std::sort(s.begin(), s.end());
  return (s[2] - s[1]) / 2.0;
}

enum class Smoothing { none, plus_one };

/// h^{-1}(log(X_i X_j / X_ij)). With plus_one every count x becomes 1 + x.
/// Arguments below the range of h are raised to its minimum and counted in
/// `clamps`. Returns nullopt when X_ij = 0 and no smoothing is applied.
inline std::optional<double> induced_distance(WordId i, WordId j, const CoocMatrix& cooc,
                                              const HFunction& h, Smoothing smoothing,
                                              std::size_t* clamps = nullptr) {
  if (i == j) return 0.0;
  const double xij = cooc.get(i, j);
  const double xi = cooc.row_sum(i);
  const double xj = cooc.row_sum(j);
  double arg;
  if (smoothing == Smoothing::plus_one) {
    arg = std::log1p(xi) + std::log1p(xj) - std::log1p(xij);
  } else {
    if (!(xij > 0.0)) return std::nullopt;
    arg = std::log(xi) + std::log(xj) - std::log(xij);
  }
  const double lo = h.range_min();
  if (arg < lo) {
    arg = lo;
    if (clamps) ++*clamps;
  }
  return h.inverse(arg);
}

/// Co-occurrence metric restricted to the `max_words` most frequent ids
/// (0 keeps every word).
struct InducedMetric {
  const CoocMatrix* cooc = nullptr;
  HFunction h;
  Smoothing smoothing = Smoothing::none;
  std::size_t max_words = 0;

  std::size_t size() const {
    return max_words == 0 ? cooc->vocab_size() : std::min(max_words, cooc->vocab_size());
  }
  std::optional<double> operator()(std::size_t i, std::size_t j, std::size_t& clamps) const {
    return induced_distance(static_cast<WordId>(i), static_cast<WordId>(j), *cooc, h, smoothing, &clamps);
  }
};

struct DeltaOptions {
  std::size_t n_tuples = 100000;
  std::size_t n_pairs = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t batch = 4096;
  std::size_t retry_factor = 100;
};

struct DeltaEstimate {
  double delta_avg = 0.0;
  double d_avg = 0.0;
  double ratio = 0.0;  // 2 delta_avg / d_avg
  double delta_max = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_pairs = 0;
  std::size_t clamp_count = 0;
  std::size_t rejected = 0;
};

namespace detail {

struct DeltaBatch {
  double delta_sum = 0.0;
  double delta_max = 0.0;
  double d_sum = 0.0;
  std::size_t tuples = 0;
  std::size_t pairs = 0;
  std::size_t clamps = 0;
  std::size_t rejected = 0;
};

}  // namespace detail

/// delta_avg over uniformly sampled 4-tuples of distinct points and d_avg
/// over sampled pairs. `dist(i, j, clamps)` returns nullopt for undefined
/// distances; such samples are redrawn up to retry_factor times the
/// requested count. Work is split into fixed batches, each with its own
/// RNG substream, so the result depends only on the seed.
template <typename Dist>
DeltaEstimate estimate_delta(std::size_t n_points, const Dist& dist, const DeltaOptions& opt) {
  if (n_points < 4) throw StructuralError("estimate_delta: need at least 4 points");
  if (opt.batch == 0) throw StructuralError("estimate_delta: batch must be positive");
  const std::size_t tuple_batches = (opt.n_tuples + opt.batch - 1) / opt.batch;
  const std::size_t pair_batches = (opt.n_pairs + opt.batch - 1) / opt.batch;
  const std::size_t total = tuple_batches + pair_batches;
  std::vector<detail::DeltaBatch> results(total);

  const auto run_batch = [&](std::size_t b) {
    detail::DeltaBatch& r = results[b];
    const bool tuples = b < tuple_batches;
    const std::size_t index = tuples ? b : b - tuple_batches;
    const std::size_t want = tuples ? opt.n_tuples : opt.n_pairs;
    const std::size_t count = std::min(opt.batch, want - index * opt.batch);
    const std::size_t max_draws = count * std::max<std::size_t>(1, opt.retry_factor);
    Rng rng(opt.seed, (tuples ? 0x7000000000000000ull : 0x3000000000000000ull) + index);
    std::size_t draws = 0, done = 0;
    while (done < count && draws < max_draws) {
      ++draws;
      if (tuples) {
        std::array<std::size_t, 4> p{};
        for (int k = 0; k < 4; ++k) {
          bool fresh = false;
          while (!fresh) {
            p[k] = static_cast<std::size_t>(rng.below(n_points));
            fresh = std::find(p.begin(), p.begin() + k, p[k]) == p.begin() + k;
          }
        }
        std::size_t clamps = 0;
        std::array<std::optional<double>, 6> d{dist(p[0], p[1], clamps), dist(p[2], p[3], clamps),
                                               dist(p[0], p[2], clamps), dist(p[1], p[3], clamps),
                                               dist(p[0], p[3], clamps), dist(p[1], p[2], clamps)};
        if (std::any_of(d.begin(), d.end(), [](const auto& v) { return !v.has_value(); })) {
          ++r.rejected;
          continue;
        }
        const double delta = tuple_delta({*d[0], *d[1], *d[2], *d[3], *d[4], *d[5]});
        r.delta_sum += delta;
        r.delta_max = std::max(r.delta_max, delta);
        r.clamps += clamps;
      } else {
        const auto i = static_cast<std::size_t>(rng.below(n_points));
        auto j = static_cast<std::size_t>(rng.below(n_points - 1));
        if (j >= i) ++j;
        std::size_t clamps = 0;
        const auto d = dist(i, j, clamps);
        if (!d) {
          ++r.rejected;
          continue;
        }
        r.d_sum += *d;
        r.clamps += clamps;
      }
      ++done;
    }
    (tuples ? r.tuples : r.pairs) = done;
  };

  const unsigned threads = std::max(1u, opt.threads);
  if (threads == 1 || total < 2) {
    for (std::size_t b = 0; b < total; ++b) run_batch(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t b = t; b < total; b += threads) run_batch(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  DeltaEstimate est;
  double delta_sum = 0.0, d_sum = 0.0;
  for (const auto& r : results) {
    delta_sum += r.delta_sum;
    d_sum += r.d_sum;
    est.delta_max = std::max(est.delta_max, r.delta_max);
    est.n_samples += r.tuples;
    est.n_pairs += r.pairs;
    est.clamp_count += r.clamps;
    est.rejected += r.rejected;
  }
  if (opt.n_tuples > 0 && est.n_samples == 0) {
    throw DataError("estimate_delta: no valid 4-tuple found; try smoothing or fewer words");
  }
  if (opt.n_pairs > 0 && est.n_pairs == 0) throw DataError("estimate_delta: no valid pair found");
  est.delta_avg = est.n_samples ? delta_sum / static_cast<double>(est.n_samples) : 0.0;
  est.d_avg = est.n_pairs ? d_sum / static_cast<double>(est.n_pairs) : 0.0;
  est.ratio = est.d_avg > 0.0 ? 2.0 * est.delta_avg / est.d_avg : 0.0;
  return est;
}

inline DeltaEstimate estimate_delta(const InducedMetric& metric, const DeltaOptions& opt) {
  return estimate_delta(metric.size(), metric, opt);
}

}  // namespace hglove
