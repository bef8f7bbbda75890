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

// Hypernymy from 2D-factor embeddings.
//
// Each 2D factor is re-centred by a Mobius translation and rotated so that
// the "generic" direction points to (0, 1). The disk is then mapped to the
// half-plane and every factor becomes a 1D Gaussian with mean sqrt(2) * a
// and standard deviation y. A word w is more general than v when its
// Gaussians are wider:
//
//   is-a(v, w) = sum_i log sigma^w_i - log sigma^v_i

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hglove/analogy.hpp"
#include "hglove/corpus.hpp"
#include "hglove/error.hpp"
#include "hglove/manifold.hpp"

namespace hglove {

enum class SetProvenance { unsupervised_topk, wordlist_files };

struct GenericSpecificSets {
  std::vector<WordId> generic;
  std::vector<WordId> specific;
  SetProvenance provenance = SetProvenance::unsupervised_topk;
  std::size_t generic_oov = 0;
  std::size_t specific_oov = 0;
  std::size_t overlap_removed = 0;
};

/// G = the n most frequent ids, S = the n least frequent ids among the
/// `pool` most frequent. Ids are assumed to be sorted by frequency.
inline GenericSpecificSets select_sets_unsupervised(std::size_t vocab_size, std::size_t n = 5000,
                                                    std::size_t pool = 50000) {
  if (n == 0) throw StructuralError("select_sets: n must be positive");
  if (vocab_size < pool) {
    throw StructuralError("select_sets: vocabulary has " + std::to_string(vocab_size) +
                          " words, fewer than the pool of " + std::to_string(pool) +
                          "; use a smaller pool");
  }
  if (2 * n > pool) throw StructuralError("select_sets: 2n exceeds the pool, sets would overlap");
  GenericSpecificSets s;
  for (std::size_t i = 0; i < n; ++i) {
    s.generic.push_back(static_cast<WordId>(i));
    s.specific.push_back(static_cast<WordId>(pool - n + i));
  }
  return s;
}

namespace detail {

inline std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto toks = split_tokens(line);
    if (!toks.empty()) words.emplace_back(toks[0]);
  }
  return words;
}

}  // namespace detail

/// Maps word lists to ids through `lookup`. OOV words are skipped and
/// counted; words present in both lists are removed from both.
template <typename Lookup>
GenericSpecificSets select_sets_from_words(std::span<const std::string> generic_words,
                                           std::span<const std::string> specific_words,
                                           const Lookup& lookup) {
  GenericSpecificSets s;
  s.provenance = SetProvenance::wordlist_files;
  const auto map = [&](std::span<const std::string> words, std::vector<WordId>& out, std::size_t& oov) {
    std::unordered_set<WordId> seen;
    for (const auto& w : words) {
      const auto id = detail::lookup_word(lookup, w);
      if (!id) {
        ++oov;
      } else if (seen.insert(*id).second) {
        out.push_back(*id);
      }
    }
  };
  map(generic_words, s.generic, s.generic_oov);
  map(specific_words, s.specific, s.specific_oov);
  const std::unordered_set<WordId> g(s.generic.begin(), s.generic.end());
  const std::unordered_set<WordId> sp(s.specific.begin(), s.specific.end());
  const auto drop = [](std::vector<WordId>& v, const std::unordered_set<WordId>& other) {
    const auto before = v.size();
    std::erase_if(v, [&](WordId w) { return other.count(w) > 0; });
    return before - v.size();
  };
  s.overlap_removed = drop(s.generic, sp);
  drop(s.specific, g);
  if (s.generic.empty()) throw DataError("select_sets: generic set is empty after vocabulary mapping");
  if (s.specific.empty()) throw DataError("select_sets: specific set is empty after vocabulary mapping");
  return s;
}

template <typename Lookup>
GenericSpecificSets select_sets_from_files(const std::filesystem::path& generic_path,
                                           const std::filesystem::path& specific_path,
                                           const Lookup& lookup) {
  const auto g = detail::read_word_list(generic_path);
  const auto s = detail::read_word_list(specific_path);
  return select_sets_from_words(g, s, lookup);
}

/// Per-factor translation centre m_i and rotation direction u_i.
struct IsometryTransform {
  std::size_t factors = 0;
  Vector m;                       // factors * 2
  Vector u;                       // factors * 2, unit rows
  std::vector<bool> degenerate;   // u_i fell back to (0, 1)

  std::size_t degenerate_count() const {
    return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), true));
  }

  static IsometryTransform identity(std::size_t factors) {
    IsometryTransform t;
    t.factors = factors;
    t.m.assign(2 * factors, 0.0);
    t.u.assign(2 * factors, 0.0);
    for (std::size_t i = 0; i < factors; ++i) t.u[2 * i + 1] = 1.0;
    t.degenerate.assign(factors, false);
    return t;
  }
};

/// Per factor: g, s = Euclidean means of the G and S coordinates,
/// m = (g + s) / 2 projected into the ball, u = (-m (+) g) / |-m (+) g|.
inline IsometryTransform fit_isometry(PointTable points, const GenericSpecificSets& sets) {
  if (points.dim != 2) throw StructuralError("fit_isometry: factors must be 2-dimensional");
  if (sets.generic.empty() || sets.specific.empty()) {
    throw StructuralError("fit_isometry: generic and specific sets must be non-empty");
  }
  const std::size_t p = points.factors;
  const auto mean = [&](std::span<const WordId> ids) {
    Vector acc(2 * p, 0.0);
    for (WordId w : ids) {
      if (w >= points.size()) throw StructuralError("fit_isometry: word id out of range");
      const auto row = points.row(w);
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += row[c];
    }
    for (double& v : acc) v /= static_cast<double>(ids.size());
    return acc;
  };
  const Vector g = mean(sets.generic);
  const Vector s = mean(sets.specific);
  IsometryTransform t = IsometryTransform::identity(p);
  for (std::size_t i = 0; i < p; ++i) {
    const Vector mid{(g[2 * i] + s[2 * i]) / 2.0, (g[2 * i + 1] + s[2 * i + 1]) / 2.0};
    const Vector m = project_to_ball(mid);
    const Vector gi{g[2 * i], g[2 * i + 1]};
    const Vector v = mobius_add(mobius_neg(m), gi);
    const double vn = norm(v);
    t.m[2 * i] = m[0];
    t.m[2 * i + 1] = m[1];
    if (vn > 0.0 && std::isfinite(vn)) {
      t.u[2 * i] = v[0] / vn;
      t.u[2 * i + 1] = v[1] / vn;
    } else {
      t.degenerate[i] = true;
    }
  }
  return t;
}

/// Per factor: x -> rotate_u(-m (+) x).
inline Vector apply_isometry(std::span<const double> x, const IsometryTransform& t) {
  if (x.size() != 2 * t.factors) throw StructuralError("apply_isometry: shape mismatch");
  Vector out(x.size());
  for (std::size_t i = 0; i < t.factors; ++i) {
    const auto m = std::span<const double>(t.m).subspan(2 * i, 2);
    const auto u = std::span<const double>(t.u).subspan(2 * i, 2);
    const auto moved = mobius_add(mobius_neg(m), x.subspan(2 * i, 2));
    const auto r = rotate_about_origin(u, moved);
    out[2 * i] = r[0];
    out[2 * i + 1] = r[1];
  }
  return out;
}

inline ProductPoint apply_isometry(const ProductPoint& x, const IsometryTransform& t) {
  if (x.dim() != 2 || x.factors() != t.factors) throw StructuralError("apply_isometry: shape mismatch");
  return ProductPoint(x.factors(), 2, apply_isometry(x.coords(), t));
}

/// Diagonal Gaussian: one (mu, sigma) pair per factor.
struct GaussianEmbedding {
  Vector mu;
  Vector sigma;

  std::size_t size() const noexcept { return mu.size(); }
};

inline constexpr double kSigmaMax = 1.0 / kBallEps;

/// Half-plane coordinates of an already transformed factor, with sigma
/// clamped to kSigmaMax near the boundary point (0, 1).
inline HalfPlanePoint factor_to_halfplane(std::span<const double> x, std::size_t* clamped = nullptr) {
  const double x1 = x[0], x2 = x[1];
  const double denom = (1.0 - x2) * (1.0 - x2) + x1 * x1;
  double a = denom > 0.0 ? 2.0 * x1 / denom : 0.0;
  double y = denom > 0.0 ? (1.0 - x1 * x1 - x2 * x2) / denom : kSigmaMax;
  if (!(y <= kSigmaMax)) {
    y = kSigmaMax;
    if (!std::isfinite(a)) a = 0.0;
    if (clamped) ++*clamped;
  }
  return {a, y};
}

/// mu_i = sqrt(2) * a_i, sigma_i = y_i of the transformed factor i.
inline GaussianEmbedding to_gaussian(std::span<const double> x, const IsometryTransform& t,
                                     std::size_t* clamped = nullptr) {
  const auto moved = apply_isometry(x, t);
  GaussianEmbedding g;
  g.mu.resize(t.factors);
  g.sigma.resize(t.factors);
  for (std::size_t i = 0; i < t.factors; ++i) {
    const auto hp = factor_to_halfplane(std::span<const double>(moved).subspan(2 * i, 2), clamped);
    g.mu[i] = std::numbers::sqrt2 * hp.a;
    g.sigma[i] = hp.y;
  }
  return g;
}

inline GaussianEmbedding to_gaussian(const ProductPoint& x, const IsometryTransform& t,
                                     std::size_t* clamped = nullptr) {
  return to_gaussian(x.coords(), t, clamped);
}

/// Transformed ball coordinates of a Gaussian (inverse of the half-plane step).
inline Vector gaussian_to_disk(const GaussianEmbedding& g) {
  Vector out;
  out.reserve(2 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto d = halfplane_to_disk({g.mu[i] / std::numbers::sqrt2, g.sigma[i]});
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

// log sigma is kept in fixed point with kLogScaleBits fractional bits and
// split as exponent * ln2 + log(mantissa), so is-a scores are exactly
// antisymmetric, exactly additive along chains and exactly invariant under
// power-of-two rescaling of sigma.
inline constexpr int kLogScaleBits = 40;

namespace detail {

inline std::int64_t fixed_log(double x) {
  static const std::int64_t ln2 = std::llround(std::numbers::ln2 * std::ldexp(1.0, kLogScaleBits));
  int e = 0;
  const double m = std::frexp(x, &e);
  return static_cast<std::int64_t>(e) * ln2 + std::llround(std::log(m) * std::ldexp(1.0, kLogScaleBits));
}

}  // namespace detail

/// sum_i log sigma^w_i - log sigma^v_i; positive when w is more general.
inline double isa_score(const GaussianEmbedding& v, const GaussianEmbedding& w) {
  if (v.size() != w.size()) throw StructuralError("isa_score: factor count mismatch");
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v.sigma[i] > 0.0) || !(w.sigma[i] > 0.0)) throw StructuralError("isa_score: sigma must be positive");
    sum += detail::fixed_log(w.sigma[i]) - detail::fixed_log(v.sigma[i]);
  }
  return std::ldexp(static_cast<double>(sum), -kLogScaleBits);
}

/// sqrt(sum_i 2 d_H((mu_i / sqrt2, sigma_i), (mu'_i / sqrt2, sigma'_i))^2).
inline double fisher_distance(const GaussianEmbedding& g1, const GaussianEmbedding& g2) {
  if (g1.size() != g2.size()) throw StructuralError("fisher_distance: factor count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const double d = halfplane_distance({g1.mu[i] / std::numbers::sqrt2, g1.sigma[i]},
                                        {g2.mu[i] / std::numbers::sqrt2, g2.sigma[i]});
    sum += 2.0 * d * d;
  }
  return std::sqrt(sum);
}

/// KL(N(mu, s^2) || N(mu', s'^2)) = ln(s'/s) + (s^2 + (mu - mu')^2) / (2 s'^2) - 1/2.
inline double kl_1d(double mu, double sigma, double mu2, double sigma2) {
  if (!(sigma > 0.0) || !(sigma2 > 0.0)) throw StructuralError("kl_1d: sigma must be positive");
  const double dm = mu - mu2;
  return std::log(sigma2 / sigma) + (sigma * sigma + dm * dm) / (2.0 * sigma2 * sigma2) - 0.5;
}

/// Target vectors of every word mapped to Gaussians.
inline std::vector<GaussianEmbedding> gaussians_for(PointTable points, const IsometryTransform& t,
                                                    std::size_t* clamped = nullptr) {
  std::vector<GaussianEmbedding> out;
  out.reserve(points.size());
  for (std::size_t w = 0; w < points.size(); ++w) out.push_back(to_gaussian(points.row(w), t, clamped));
  return out;
}

}  // namespace hglove
