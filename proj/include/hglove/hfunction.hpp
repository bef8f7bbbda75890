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

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "hglove/error.hpp"

namespace hglove {

/// Monotone link h applied to the embedding distance in the metric GloVe
/// residual -h(d) + b_i + b~_j - log X_ij.
///
/// `square` and `cosh_pow` are trainable. `identity` and `log` only exist
/// for inducing metrics from co-occurrences; `log` does not yield a metric
/// in general.
struct HFunction {
  enum class Kind : std::uint32_t { square = 0, cosh_pow = 1, identity = 2, log = 3 };

  Kind kind = Kind::square;
  std::uint32_t exponent = 2;  // only meaningful for cosh_pow

  static HFunction square() { return {Kind::square, 2}; }
  static HFunction cosh_pow(std::uint32_t k) {
    if (k == 0) throw StructuralError("cosh power must be positive");
    return {Kind::cosh_pow, k};
  }
  static HFunction identity() { return {Kind::identity, 1}; }
  static HFunction log() { return {Kind::log, 1}; }

  bool trainable() const noexcept { return kind == Kind::square || kind == Kind::cosh_pow; }

  double operator()(double d) const {
    switch (kind) {
      case Kind::square:
        return d * d;
      case Kind::cosh_pow:
        return std::pow(std::cosh(d), static_cast<double>(exponent));
      case Kind::identity:
        return d;
      case Kind::log:
        return std::log(d);
    }
    return 0.0;
  }

  double derivative(double d) const {
    switch (kind) {
      case Kind::square:
        return 2.0 * d;
      case Kind::cosh_pow: {
        const double k = static_cast<double>(exponent);
        return k * std::pow(std::cosh(d), k - 1.0) * std::sinh(d);
      }
      case Kind::identity:
        return 1.0;
      case Kind::log:
        return 1.0 / d;
    }
    return 0.0;
  }

  /// Smallest value in the range of h on [0, inf).
  double range_min() const noexcept {
    switch (kind) {
      case Kind::square:
      case Kind::identity:
        return 0.0;
      case Kind::cosh_pow:
        return 1.0;
      case Kind::log:
        return -std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

  /// h^{-1}; the argument must be >= range_min().
  double inverse(double v) const {
    switch (kind) {
      case Kind::square:
        return std::sqrt(v);
      case Kind::cosh_pow:
        return std::acosh(std::max(1.0, std::pow(v, 1.0 / static_cast<double>(exponent))));
      case Kind::identity:
        return v;
      case Kind::log:
        return std::exp(v);
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::square:
        return "square";
      case Kind::cosh_pow:
        if (exponent == 1) return "cosh";
        if (exponent == 2) return "cosh2";
        return "cosh^" + std::to_string(exponent);
      case Kind::identity:
        return "identity";
      case Kind::log:
        return "log";
    }
    return "?";
  }

  /// Accepts square, identity, log, cosh, cosh2, coshK and cosh^K.
  static HFunction parse(std::string_view s) {
    if (s == "square" || s == "sq") return square();
    if (s == "identity" || s == "x") return identity();
    if (s == "log") return log();
    if (s.substr(0, 4) == "cosh") {
      std::string_view rest = s.substr(4);
      if (rest.empty()) return cosh_pow(1);
      if (rest.front() == '^') rest.remove_prefix(1);
      if (!rest.empty() && rest.size() <= 4 &&
          rest.find_first_not_of("0123456789") == std::string_view::npos) {
        const auto k = std::stoul(std::string(rest));
        if (k > 0) return cosh_pow(static_cast<std::uint32_t>(k));
      }
    }
    throw StructuralError("unknown h function '" + std::string(s) + "'");
  }

  bool operator==(const HFunction& o) const {
    return kind == o.kind && (kind != Kind::cosh_pow || exponent == o.exponent);
  }
};

}  // namespace hglove
