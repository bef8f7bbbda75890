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

// Word embedding tables in (D^k)^p and their on-disk formats.

#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hglove/binary_io.hpp"
#include "hglove/corpus.hpp"
#include "hglove/error.hpp"
#include "hglove/hfunction.hpp"
#include "hglove/manifold.hpp"

namespace hglove {

/// Target vectors w, context vectors w~ and biases b, b~ for V words. Each
/// vector is a flat block of factors * dim coordinates.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  EmbeddingTable(std::size_t vocab_size, std::size_t factors, std::size_t dim, HFunction h)
      : vocab_size_(vocab_size),
        factors_(factors),
        dim_(dim),
        h_(h),
        target_(vocab_size * factors * dim, 0.0),
        context_(vocab_size * factors * dim, 0.0),
        bias_target_(vocab_size, 0.0),
        bias_context_(vocab_size, 0.0) {
    if (factors == 0 || dim == 0) throw StructuralError("EmbeddingTable: empty product shape");
  }

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t factors() const noexcept { return factors_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t width() const noexcept { return factors_ * dim_; }
  const HFunction& h() const noexcept { return h_; }

  std::span<double> target(std::size_t w) { return block(target_, w); }
  std::span<const double> target(std::size_t w) const { return block(target_, w); }
  std::span<double> context(std::size_t w) { return block(context_, w); }
  std::span<const double> context(std::size_t w) const { return block(context_, w); }

  double& bias_target(std::size_t w) { return bias_target_.at(w); }
  double bias_target(std::size_t w) const { return bias_target_.at(w); }
  double& bias_context(std::size_t w) { return bias_context_.at(w); }
  double bias_context(std::size_t w) const { return bias_context_.at(w); }

  ProductPoint target_point(std::size_t w) const {
    const auto b = target(w);
    return ProductPoint(factors_, dim_, Vector(b.begin(), b.end()));
  }
  ProductPoint context_point(std::size_t w) const {
    const auto b = context(w);
    return ProductPoint(factors_, dim_, Vector(b.begin(), b.end()));
  }

  Vector& target_data() noexcept { return target_; }
  const Vector& target_data() const noexcept { return target_; }
  Vector& context_data() noexcept { return context_; }
  const Vector& context_data() const noexcept { return context_; }
  Vector& bias_target_data() noexcept { return bias_target_; }
  const Vector& bias_target_data() const noexcept { return bias_target_; }
  Vector& bias_context_data() noexcept { return bias_context_; }
  const Vector& bias_context_data() const noexcept { return bias_context_; }

  /// Optional word strings, in id order; empty when unknown.
  const std::vector<std::string>& words() const noexcept { return words_; }
  void set_words(std::vector<std::string> words) {
    if (!words.empty() && words.size() != vocab_size_) {
      throw StructuralError("EmbeddingTable::set_words: expected " + std::to_string(vocab_size_) +
                            " words");
    }
    words_ = std::move(words);
    index_.clear();
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<WordId>(i));
  }
  std::string word(std::size_t w) const {
    return words_.empty() ? "w" + std::to_string(w) : words_.at(w);
  }
  std::optional<WordId> find(std::string_view w) const {
    const auto it = index_.find(std::string(w));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Largest factor norm over every stored point.
  double max_factor_norm() const {
    double m = 0.0;
    for (const Vector* data : {&target_, &context_}) {
      for (std::size_t off = 0; off < data->size(); off += dim_) {
        m = std::max(m, norm(std::span<const double>(*data).subspan(off, dim_)));
      }
    }
    return m;
  }

  bool operator==(const EmbeddingTable& o) const {
    return vocab_size_ == o.vocab_size_ && factors_ == o.factors_ && dim_ == o.dim_ && h_ == o.h_ &&
           target_ == o.target_ && context_ == o.context_ && bias_target_ == o.bias_target_ &&
           bias_context_ == o.bias_context_ && words_ == o.words_;
  }

 private:
  std::span<double> block(Vector& data, std::size_t w) {
    if (w >= vocab_size_) throw StructuralError("EmbeddingTable: word id out of range");
    return std::span<double>(data).subspan(w * width(), width());
  }
  std::span<const double> block(const Vector& data, std::size_t w) const {
    if (w >= vocab_size_) throw StructuralError("EmbeddingTable: word id out of range");
    return std::span<const double>(data).subspan(w * width(), width());
  }

  std::size_t vocab_size_ = 0;
  std::size_t factors_ = 0;
  std::size_t dim_ = 0;
  HFunction h_;
  Vector target_;
  Vector context_;
  Vector bias_target_;
  Vector bias_context_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

/// Expected header fields when loading a model.
struct ModelShape {
  std::size_t factors = 0;
  std::size_t dim = 0;
  HFunction h;
};

inline constexpr char kModelMagic[] = "HGMD";
inline constexpr std::uint32_t kModelVersion = 1;

/// Layout (little-endian): "HGMD", u32 version, u32 V, u32 p, u32 k,
/// u32 h-kind, u32 h-exponent, f64 target[V*p*k], f64 context[V*p*k],
/// f64 bias_target[V], f64 bias_context[V], u32 word count (0 or V), then
/// per word a u32 byte length followed by the UTF-8 bytes.
inline std::vector<char> encode_model(const EmbeddingTable& t) {
  detail::ByteWriter w;
  w.raw(std::string_view(kModelMagic, 4));
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(t.vocab_size()));
  w.u32(static_cast<std::uint32_t>(t.factors()));
  w.u32(static_cast<std::uint32_t>(t.dim()));
  w.u32(static_cast<std::uint32_t>(t.h().kind));
  w.u32(t.h().exponent);
  for (const Vector* data : {&t.target_data(), &t.context_data(), &t.bias_target_data(),
                             &t.bias_context_data()}) {
    for (double v : *data) w.f64(v);
  }
  w.u32(static_cast<std::uint32_t>(t.words().size()));
  for (const auto& s : t.words()) {
    w.u32(static_cast<std::uint32_t>(s.size()));
    w.raw(s);
  }
  return w.bytes();
}

inline EmbeddingTable decode_model(std::vector<char> bytes, const std::optional<ModelShape>& expect) {
  detail::ByteReader r(std::move(bytes));
  if (r.remaining() < 28) throw ParseError("truncated header", r.remaining());
  if (r.raw(4) != std::string_view(kModelMagic, 4)) throw ParseError("bad magic", 0);
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw VersionError("model: unsupported format version " + std::to_string(version));
  }
  const std::uint32_t vocab_size = r.u32();
  const std::uint32_t factors = r.u32();
  const std::uint32_t dim = r.u32();
  const std::uint32_t kind = r.u32();
  const std::uint32_t exponent = r.u32();
  if (kind > static_cast<std::uint32_t>(HFunction::Kind::log)) throw ParseError("unknown h kind", 20);
  if (factors == 0 || dim == 0) throw ParseError("empty product shape", 12);
  const HFunction h{static_cast<HFunction::Kind>(kind), exponent};
  if (expect) {
    if (expect->factors != factors || expect->dim != dim || !(expect->h == h)) {
      throw VersionError("model header mismatch: file has p=" + std::to_string(factors) +
                         " k=" + std::to_string(dim) + " h=" + h.name() + ", expected p=" +
                         std::to_string(expect->factors) + " k=" + std::to_string(expect->dim) +
                         " h=" + expect->h.name());
    }
  }
  EmbeddingTable t(vocab_size, factors, dim, h);
  const std::size_t needed =
      (2ull * vocab_size * factors * dim + 2ull * vocab_size) * sizeof(double);
  if (r.remaining() < needed) throw ParseError("truncated parameter block", r.offset());
  for (Vector* data : {&t.target_data(), &t.context_data(), &t.bias_target_data(),
                       &t.bias_context_data()}) {
    for (double& v : *data) v = r.f64();
  }
  const std::size_t words_at = r.offset();
  const std::uint32_t n_words = r.u32();
  if (n_words != 0 && n_words != vocab_size) throw ParseError("bad word count", words_at);
  std::vector<std::string> words;
  words.reserve(n_words);
  for (std::uint32_t i = 0; i < n_words; ++i) {
    const std::uint32_t len = r.u32();
    words.push_back(r.raw(len));
  }
  if (!r.done()) throw ParseError("trailing bytes", r.offset());
  t.set_words(std::move(words));
  return t;
}

inline void save_model(const EmbeddingTable& t, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_model(t));
}

inline EmbeddingTable load_model(const std::filesystem::path& path,
                                 const std::optional<ModelShape>& expect = std::nullopt) {
  return decode_model(detail::read_file_bytes(path), expect);
}

/// Sibling file holding context vectors for a text export: "m.txt" ->
/// "m.context.txt".
inline std::filesystem::path context_text_path(const std::filesystem::path& path) {
  auto out = path;
  out.replace_filename(path.stem().string() + ".context" + path.extension().string());
  return out;
}

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_block(const std::filesystem::path& path, const EmbeddingTable& t, bool target) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "poincare-glove p=" << t.factors() << " k=" << t.dim() << " h=" << t.h().name() << '\n';
  for (std::size_t w = 0; w < t.vocab_size(); ++w) {
    out << t.word(w);
    for (double v : target ? t.target(w) : t.context(w)) out << ' ' << format_g17(v);
    out << ' ' << format_g17(target ? t.bias_target(w) : t.bias_context(w)) << '\n';
  }
}

struct TextBlock {
  std::size_t factors = 0;
  std::size_t dim = 0;
  HFunction h;
  std::vector<std::string> words;
  Vector coords;
  Vector biases;
};

inline double parse_double(std::string_view tok, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw DataError(where + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

inline TextBlock read_text_block(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  TextBlock b;
  {
    const auto toks = split_tokens(line);
    if (toks.size() != 4 || toks[0] != "poincare-glove" || toks[1].substr(0, 2) != "p=" ||
        toks[2].substr(0, 2) != "k=" || toks[3].substr(0, 2) != "h=") {
      throw DataError(path.string() + ": bad header line");
    }
    b.factors = static_cast<std::size_t>(parse_double(toks[1].substr(2), path.string()));
    b.dim = static_cast<std::size_t>(parse_double(toks[2].substr(2), path.string()));
    b.h = HFunction::parse(toks[3].substr(2));
  }
  const std::size_t width = b.factors * b.dim;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_tokens(line);
    if (toks.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (toks.size() != width + 2) throw DataError(where + ": expected " + std::to_string(width + 2) + " fields");
    b.words.emplace_back(toks[0]);
    for (std::size_t c = 0; c < width; ++c) b.coords.push_back(parse_double(toks[1 + c], where));
    b.biases.push_back(parse_double(toks[width + 1], where));
  }
  return b;
}

}  // namespace detail

/// Writes targets to `path` and contexts to context_text_path(path).
inline void export_text(const EmbeddingTable& t, const std::filesystem::path& path) {
  detail::write_text_block(path, t, true);
  detail::write_text_block(context_text_path(path), t, false);
}

inline EmbeddingTable import_text(const std::filesystem::path& path) {
  auto tb = detail::read_text_block(path);
  auto cb = detail::read_text_block(context_text_path(path));
  if (tb.factors != cb.factors || tb.dim != cb.dim || !(tb.h == cb.h) || tb.words != cb.words) {
    throw DataError("text model: target and context files disagree");
  }
  EmbeddingTable t(tb.words.size(), tb.factors, tb.dim, tb.h);
  t.target_data() = std::move(tb.coords);
  t.context_data() = std::move(cb.coords);
  t.bias_target_data() = std::move(tb.biases);
  t.bias_context_data() = std::move(cb.biases);
  t.set_words(std::move(tb.words));
  return t;
}

}  // namespace hglove
