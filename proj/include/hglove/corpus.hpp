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

// Vocabulary and symmetric word co-occurrence statistics.
//
// Text is consumed as newline-delimited documents of whitespace-separated
// tokens; context windows never cross a line boundary.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hglove/binary_io.hpp"
#include "hglove/error.hpp"

namespace hglove {

using WordId = std::uint32_t;

/// Splits a line on ASCII whitespace.
inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return lines;
}

/// Words ordered by descending frequency, ties broken lexicographically.
class Vocab {
 public:
  Vocab() = default;

  /// Builds from parallel word/count lists; throws DataError if the order
  /// or uniqueness invariants are violated.
  Vocab(std::vector<std::string> words, std::vector<std::uint64_t> counts)
      : words_(std::move(words)), counts_(std::move(counts)) {
    if (words_.size() != counts_.size()) throw DataError("vocab: words and counts differ in length");
    if (words_.size() > std::numeric_limits<WordId>::max()) throw DataError("vocab: too many words");
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (i > 0 && counts_[i] > counts_[i - 1]) {
        throw DataError("vocab: counts must be non-increasing (line " + std::to_string(i + 1) + ")");
      }
      if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
        throw DataError("vocab: duplicate word '" + words_[i] + "'");
      }
    }
  }

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint64_t count(WordId id) const { return counts_.at(id); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  std::optional<WordId> find(std::string_view word) const {
    const auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const Vocab& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
};

/// Counts tokens over all lines and keeps words with count >= min_count.
inline Vocab build_vocab(std::span<const std::string> lines, std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& line : lines) {
    for (auto tok : split_tokens(line)) ++counts[std::string(tok)];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> cs;
  words.reserve(kept.size());
  cs.reserve(kept.size());
  for (auto& [w, c] : kept) {
    words.push_back(std::move(w));
    cs.push_back(c);
  }
  return Vocab(std::move(words), std::move(cs));
}

inline Vocab build_vocab(std::istream& in, std::uint64_t min_count) {
  const auto lines = read_lines(in);
  return build_vocab(lines, min_count);
}

inline void save_vocab(const Vocab& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.word(static_cast<WordId>(i)) << '\t' << vocab.count(static_cast<WordId>(i)) << '\n';
  }
}

inline Vocab load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected word<TAB>count");
    }
    std::uint64_t c = 0;
    try {
      std::size_t used = 0;
      c = std::stoull(line.substr(tab + 1), &used);
      if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad count");
    }
    words.push_back(line.substr(0, tab));
    counts.push_back(c);
  }
  return Vocab(std::move(words), std::move(counts));
}

enum class Weighting { harmonic, flat };

struct CoocEntry {
  WordId i = 0;
  WordId j = 0;
  double x = 0.0;

  bool operator==(const CoocEntry&) const = default;
};

/// Sparse symmetric co-occurrence matrix; each unordered pair is stored once
/// with i <= j. Row sums are derived from the entries.
class CoocMatrix {
 public:
  CoocMatrix() = default;

  /// Entries are sorted; throws DataError on i > j, id >= V, x <= 0 or
  /// duplicate pairs.
  CoocMatrix(std::size_t vocab_size, std::vector<CoocEntry> entries)
      : vocab_size_(vocab_size), entries_(std::move(entries)), row_sums_(vocab_size, 0.0) {
    std::sort(entries_.begin(), entries_.end(), [](const CoocEntry& a, const CoocEntry& b) {
      return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (std::size_t n = 0; n < entries_.size(); ++n) {
      const auto& e = entries_[n];
      if (e.i > e.j) throw DataError("cooc: entry stored with i > j");
      if (e.j >= vocab_size_) throw DataError("cooc: word id out of range");
      if (!(e.x > 0.0) || !std::isfinite(e.x)) throw DataError("cooc: non-positive count");
      if (n > 0 && entries_[n - 1].i == e.i && entries_[n - 1].j == e.j) {
        throw DataError("cooc: duplicate pair");
      }
    }
    recompute_row_sums();
  }

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  const std::vector<CoocEntry>& entries() const noexcept { return entries_; }
  const std::vector<double>& row_sums() const noexcept { return row_sums_; }
  double row_sum(WordId i) const { return row_sums_.at(i); }

  /// X_ij (symmetric lookup); 0 when absent.
  double get(WordId i, WordId j) const {
    if (i > j) std::swap(i, j);
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{i, j},
                                     [](const CoocEntry& e, const std::pair<WordId, WordId>& key) {
                                       return e.i != key.first ? e.i < key.first : e.j < key.second;
                                     });
    if (it != entries_.end() && it->i == i && it->j == j) return it->x;
    return 0.0;
  }

  bool operator==(const CoocMatrix& other) const {
    return vocab_size_ == other.vocab_size_ && entries_ == other.entries_;
  }

 private:
  void recompute_row_sums() {
    std::fill(row_sums_.begin(), row_sums_.end(), 0.0);
    for (const auto& e : entries_) {
      row_sums_[e.i] += e.x;
      if (e.j != e.i) row_sums_[e.j] += e.x;
    }
  }

  std::size_t vocab_size_ = 0;
  std::vector<CoocEntry> entries_;
  std::vector<double> row_sums_;
};

namespace detail {

inline std::uint64_t lcm_up_to(int n) {
  std::uint64_t l = 1;
  for (int d = 2; d <= n; ++d) l = std::lcm(l, static_cast<std::uint64_t>(d));
  return l;
}

inline std::uint64_t pair_key(WordId a, WordId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace detail

/// Largest window for which harmonic counting is exact.
inline constexpr int kMaxWindow = 20;

/// Adds weight(d) to X_ab and X_ba for every in-vocabulary token pair at
/// offset 1 <= d <= window inside a line. Out-of-vocabulary tokens keep
/// their positions. Increments are accumulated as integer multiples of
/// 1/lcm(1..window), so the result does not depend on `threads`.
inline CoocMatrix count_cooccurrences(std::span<const std::string> lines, const Vocab& vocab,
                                      int window, Weighting weighting, unsigned threads = 1) {
  if (window < 1) throw StructuralError("count_cooccurrences: window must be >= 1");
  if (window > kMaxWindow) {
    throw StructuralError("count_cooccurrences: window must be <= " + std::to_string(kMaxWindow));
  }
  const std::uint64_t unit = weighting == Weighting::harmonic ? detail::lcm_up_to(window) : 1;
  threads = std::max(1u, threads);
  using Counts = std::unordered_map<std::uint64_t, std::uint64_t>;
  std::vector<Counts> shards(threads);

  const auto work = [&](unsigned shard) {
    Counts& local = shards[shard];
    std::vector<std::int64_t> ids;
    for (std::size_t l = shard; l < lines.size(); l += threads) {
      ids.clear();
      for (auto tok : split_tokens(lines[l])) {
        const auto id = vocab.find(tok);
        ids.push_back(id ? static_cast<std::int64_t>(*id) : -1);
      }
      for (std::size_t p = 0; p < ids.size(); ++p) {
        if (ids[p] < 0) continue;
        const std::size_t end = std::min(ids.size(), p + static_cast<std::size_t>(window) + 1);
        for (std::size_t q = p + 1; q < end; ++q) {
          if (ids[q] < 0) continue;
          const std::uint64_t inc = weighting == Weighting::harmonic ? unit / (q - p) : 1;
          const auto a = static_cast<WordId>(ids[p]);
          const auto b = static_cast<WordId>(ids[q]);
          // X_ab and X_ba share one stored cell; on the diagonal both land on it.
          local[detail::pair_key(a, b)] += a == b ? 2 * inc : inc;
        }
      }
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  Counts& merged = shards[0];
  for (unsigned t = 1; t < threads; ++t) {
    for (const auto& [k, v] : shards[t]) merged[k] += v;
  }
  std::vector<CoocEntry> entries;
  entries.reserve(merged.size());
  const double scale = static_cast<double>(unit);
  for (const auto& [k, v] : merged) {
    entries.push_back({static_cast<WordId>(k >> 32), static_cast<WordId>(k & 0xFFFFFFFFu),
                       static_cast<double>(v) / scale});
  }
  return CoocMatrix(vocab.size(), std::move(entries));
}

inline CoocMatrix count_cooccurrences(std::istream& in, const Vocab& vocab, int window,
                                      Weighting weighting, unsigned threads = 1) {
  const auto lines = read_lines(in);
  return count_cooccurrences(lines, vocab, window, weighting, threads);
}

/// f(x) = min(1, (x / x_max)^alpha).
inline double glove_weight(double x, double x_max, double alpha) {
  return x >= x_max ? 1.0 : std::pow(x / x_max, alpha);
}

inline constexpr char kCoocMagic[] = "HGCO";
inline constexpr std::uint32_t kCoocVersion = 1;
inline constexpr std::size_t kCoocHeaderBytes = 16;
inline constexpr std::size_t kCoocRecordBytes = 16;

/// Layout: "HGCO", u32 version, u32 V, u32 reserved (0), then one 16-byte
/// record (u32 i, u32 j, f64 x) per stored pair; all little-endian.
inline std::vector<char> encode_cooc(const CoocMatrix& m) {
  detail::ByteWriter w;
  w.raw(std::string_view(kCoocMagic, 4));
  w.u32(kCoocVersion);
  w.u32(static_cast<std::uint32_t>(m.vocab_size()));
  w.u32(0);
  for (const auto& e : m.entries()) {
    w.u32(e.i);
    w.u32(e.j);
    w.f64(e.x);
  }
  return w.bytes();
}

inline CoocMatrix decode_cooc(std::vector<char> bytes) {
  detail::ByteReader r(std::move(bytes));
  if (r.remaining() < kCoocHeaderBytes) throw ParseError("truncated header", r.remaining());
  if (r.raw(4) != std::string_view(kCoocMagic, 4)) throw ParseError("bad magic", 0);
  const std::size_t version_at = r.offset();
  if (r.u32() != kCoocVersion) throw ParseError("unsupported version", version_at);
  const std::uint32_t vocab_size = r.u32();
  r.u32();
  std::vector<CoocEntry> entries;
  entries.reserve(r.remaining() / kCoocRecordBytes);
  while (!r.done()) {
    const std::size_t at = r.offset();
    if (r.remaining() < kCoocRecordBytes) throw ParseError("truncated record", at);
    CoocEntry e;
    e.i = r.u32();
    e.j = r.u32();
    e.x = r.f64();
    if (e.i >= vocab_size || e.j >= vocab_size) throw ParseError("word id out of range", at);
    if (e.i > e.j) throw ParseError("record with i > j", at);
    if (!(e.x > 0.0) || !std::isfinite(e.x)) throw ParseError("non-positive count", at);
    if (!entries.empty() && entries.back().i == e.i && entries.back().j == e.j) {
      throw ParseError("duplicate record", at);
    }
    entries.push_back(e);
  }
  return CoocMatrix(vocab_size, std::move(entries));
}

inline void save_cooc(const CoocMatrix& m, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_cooc(m));
}

inline CoocMatrix load_cooc(const std::filesystem::path& path) {
  return decode_cooc(detail::read_file_bytes(path));
}

}  // namespace hglove
