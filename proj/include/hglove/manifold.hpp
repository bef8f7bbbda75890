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

// Closed-form geometry of the Poincare ball (curvature -1), the Poincare
// half-plane and Cartesian products of balls.
//
// Ball points are plain coordinate spans; every function producing a ball
// point re-projects it to norm <= 1 - kBallEps. All functions are pure.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hglove/error.hpp"

namespace hglove {

using Vector = std::vector<double>;

/// Margin kept between any stored point and the unit sphere.
inline constexpr double kBallEps = 1e-5;
/// artanh arguments are clamped below 1 by this much.
inline constexpr double kArtanhMargin = 1e-12;

namespace detail {

inline void require_same_dim(std::span<const double> a, std::span<const double> b,
                             const char* op) {
  if (a.size() != b.size()) {
    throw StructuralError(std::string(op) + ": dimension mismatch (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

inline double safe_acosh(double arg) { return std::acosh(std::max(arg, 1.0)); }

inline double safe_atanh(double arg) {
  return std::atanh(std::clamp(arg, -(1.0 - kArtanhMargin), 1.0 - kArtanhMargin));
}

}  // namespace detail

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

inline double squared_euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// Rescales `x` in place so that its norm does not exceed 1 - eps.
inline void project_in_place(std::span<double> x, double eps = kBallEps) {
  const double limit = 1.0 - eps;
  const double n = norm(x);
  if (n > limit) {
    const double scale = limit / n;
    for (double& v : x) v *= scale;
  }
}

/// Returns `x` unchanged if inside the margin, otherwise rescaled onto it.
/// Throws StructuralError for non-finite input.
inline Vector project_to_ball(std::span<const double> x, double eps = kBallEps) {
  for (double v : x) {
    if (!std::isfinite(v)) throw StructuralError("project_to_ball: non-finite coordinate");
  }
  Vector out(x.begin(), x.end());
  project_in_place(out, eps);
  return out;
}

/// lambda_x = 2 / (1 - |x|^2).
inline double conformal_factor(std::span<const double> x) {
  return 2.0 / (1.0 - squared_norm(x));
}

inline double ball_distance(std::span<const double> x, std::span<const double> y) {
  detail::require_same_dim(x, y, "ball_distance");
  const double alpha = 1.0 - squared_norm(x);
  const double beta = 1.0 - squared_norm(y);
  const double arg = 1.0 + 2.0 * squared_euclidean_distance(x, y) / (alpha * beta);
  return detail::safe_acosh(arg);
}

struct HalfPlanePoint {
  double a = 0.0;  // horizontal coordinate
  double y = 1.0;  // vertical coordinate, > 0

  bool operator==(const HalfPlanePoint&) const = default;
};

inline double halfplane_distance(const HalfPlanePoint& p, const HalfPlanePoint& q) {
  if (!(p.y > 0.0) || !(q.y > 0.0)) {
    throw StructuralError("halfplane_distance: vertical coordinate must be positive");
  }
  const double da = p.a - q.a;
  const double dy = p.y - q.y;
  return detail::safe_acosh(1.0 + (da * da + dy * dy) / (2.0 * p.y * q.y));
}

/// Mobius addition without the final re-projection. Used where exact
/// algebraic identities are checked on interior points.
inline Vector mobius_add_unprojected(std::span<const double> x, std::span<const double> y) {
  detail::require_same_dim(x, y, "mobius_add");
  const double xy = dot(x, y);
  const double xx = squared_norm(x);
  const double yy = squared_norm(y);
  const double cx = 1.0 + 2.0 * xy + yy;
  const double cy = 1.0 - xx;
  const double denom = 1.0 + 2.0 * xy + xx * yy;
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (cx * x[i] + cy * y[i]) / denom;
  return out;
}

inline Vector mobius_add(std::span<const double> x, std::span<const double> y) {
  Vector out = mobius_add_unprojected(x, y);
  project_in_place(out);
  return out;
}

/// Mobius inverse; for the ball this is plain negation.
inline Vector mobius_neg(std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
  return out;
}

/// r (x) x; the origin is fixed for every r.
inline Vector mobius_scalar(double r, std::span<const double> x) {
  const double n = norm(x);
  Vector out(x.size(), 0.0);
  if (n == 0.0) return out;
  const double scale = std::tanh(r * detail::safe_atanh(n)) / n;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i];
  project_in_place(out);
  return out;
}

/// exp_x(v) for a tangent vector v at x.
inline Vector exp_map(std::span<const double> x, std::span<const double> v) {
  detail::require_same_dim(x, v, "exp_map");
  const double vn = norm(v);
  if (vn == 0.0) return Vector(x.begin(), x.end());
  const double scale = std::tanh(conformal_factor(x) * vn / 2.0) / vn;
  Vector step(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) step[i] = scale * v[i];
  return mobius_add(x, step);
}

/// log_x(y); returns the zero vector for y == x.
inline Vector log_map(std::span<const double> x, std::span<const double> y) {
  detail::require_same_dim(x, y, "log_map");
  if (std::equal(x.begin(), x.end(), y.begin())) return Vector(x.size(), 0.0);
  const Vector diff = mobius_add_unprojected(mobius_neg(x), y);
  const double dn = norm(diff);
  Vector out(x.size(), 0.0);
  if (dn == 0.0) return out;
  const double scale = (2.0 / conformal_factor(x)) * detail::safe_atanh(dn) / dn;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * diff[i];
  return out;
}

/// gyr[u,v]w via the closed form w + 2(Au + Bv)/D. Linear and norm preserving
/// in w; w is an arbitrary vector.
inline Vector gyration(std::span<const double> u, std::span<const double> v,
                       std::span<const double> w) {
  detail::require_same_dim(u, v, "gyration");
  detail::require_same_dim(u, w, "gyration");
  const double uw = dot(u, w);
  const double vw = dot(v, w);
  const double uv = dot(u, v);
  const double uu = squared_norm(u);
  const double vv = squared_norm(v);
  const double a = -uw * vv + vw + 2.0 * uv * vw;
  const double b = -vw * uu - uw;
  const double d = 1.0 + 2.0 * uv + uu * vv;
  Vector out(w.begin(), w.end());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] += 2.0 * (a * u[i] + b * v[i]) / d;
  return out;
}

/// Parallel transport of a tangent vector at x to y along the geodesic.
inline Vector parallel_transport(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> v) {
  Vector out = gyration(y, mobius_neg(x), v);
  const double scale = conformal_factor(x) / conformal_factor(y);
  for (double& c : out) c *= scale;
  return out;
}

/// Point at fraction t on the geodesic from a to b: a (+) ((-a (+) b) (x) t).
inline Vector geodesic_point(std::span<const double> a, std::span<const double> b, double t) {
  detail::require_same_dim(a, b, "geodesic_point");
  if (t == 0.0) return Vector(a.begin(), a.end());
  if (t == 1.0) return Vector(b.begin(), b.end());
  const Vector diff = mobius_add_unprojected(mobius_neg(a), b);
  return mobius_add(a, mobius_scalar(t, diff));
}

/// Isometry D^2 -> H^2 sending the origin to (0,1), (0,-1) to 0 and the
/// boundary point (0,1) to infinity; x1 > 0 maps to a > 0.
inline HalfPlanePoint disk_to_halfplane(std::span<const double> x) {
  if (x.size() != 2) throw StructuralError("disk_to_halfplane: expects a 2D point");
  if (1.0 - x[1] < kBallEps) {
    throw StructuralError("disk_to_halfplane: point too close to (0,1), out of numeric range");
  }
  const double denom = (1.0 - x[1]) * (1.0 - x[1]) + x[0] * x[0];
  return {2.0 * x[0] / denom, (1.0 - squared_norm(x)) / denom};
}

inline Vector halfplane_to_disk(const HalfPlanePoint& p) {
  if (!(p.y > 0.0)) throw StructuralError("halfplane_to_disk: vertical coordinate must be positive");
  const double denom = p.a * p.a + (p.y + 1.0) * (p.y + 1.0);
  return {2.0 * p.a / denom, (p.a * p.a + p.y * p.y - 1.0) / denom};
}

/// Rotation about the origin taking the unit direction u to (0,1).
/// u is normalized if within 1e-6 of unit length, rejected otherwise.
inline Vector rotate_about_origin(std::span<const double> u, std::span<const double> x) {
  if (u.size() != 2 || x.size() != 2) {
    throw StructuralError("rotate_about_origin: expects 2D vectors");
  }
  const double un = norm(u);
  if (std::abs(un - 1.0) > 1e-6) {
    throw StructuralError("rotate_about_origin: rotation direction is not a unit vector");
  }
  const double c = u[1] / un;
  const double s = u[0] / un;
  return {c * x[0] - s * x[1], s * x[0] + c * x[1]};
}

/// A point of (D^k)^p stored as p contiguous k-dimensional factors.
class ProductPoint {
 public:
  ProductPoint() = default;

  /// The origin of (D^dim)^factors.
  ProductPoint(std::size_t factors, std::size_t dim)
      : factors_(factors), dim_(dim), coords_(factors * dim, 0.0) {
    if (factors == 0 || dim == 0) throw StructuralError("ProductPoint: empty shape");
  }

  ProductPoint(std::size_t factors, std::size_t dim, Vector coords)
      : factors_(factors), dim_(dim), coords_(std::move(coords)) {
    if (factors == 0 || dim == 0) throw StructuralError("ProductPoint: empty shape");
    if (coords_.size() != factors * dim) {
      throw StructuralError("ProductPoint: expected " + std::to_string(factors * dim) +
                            " coordinates, got " + std::to_string(coords_.size()));
    }
    for (std::size_t i = 0; i < factors_; ++i) {
      if (!(squared_norm(factor(i)) < 1.0)) {
        throw StructuralError("ProductPoint: factor " + std::to_string(i) +
                              " lies outside the unit ball");
      }
    }
  }

  std::size_t factors() const noexcept { return factors_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> factor(std::size_t i) const {
    return std::span<const double>(coords_).subspan(i * dim_, dim_);
  }
  std::span<double> factor(std::size_t i) { return std::span<double>(coords_).subspan(i * dim_, dim_); }

  const Vector& coords() const noexcept { return coords_; }

  void set_factor(std::size_t i, std::span<const double> values) {
    if (values.size() != dim_) throw StructuralError("ProductPoint::set_factor: dimension mismatch");
    std::copy(values.begin(), values.end(), factor(i).begin());
    project_in_place(factor(i));
  }

  bool operator==(const ProductPoint&) const = default;

 private:
  std::size_t factors_ = 0;
  std::size_t dim_ = 0;
  Vector coords_;
};

/// Product distance over flat coordinate spans holding `factors` blocks.
inline double product_distance(std::span<const double> x, std::span<const double> y,
                               std::size_t factors) {
  detail::require_same_dim(x, y, "product_distance");
  if (factors == 0 || x.size() % factors != 0) {
    throw StructuralError("product_distance: coordinates do not split into factors");
  }
  const std::size_t k = x.size() / factors;
  double sum = 0.0;
  for (std::size_t i = 0; i < factors; ++i) {
    const double d = ball_distance(x.subspan(i * k, k), y.subspan(i * k, k));
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double product_distance(const ProductPoint& x, const ProductPoint& y) {
  if (x.factors() != y.factors() || x.dim() != y.dim()) {
    throw StructuralError("product_distance: shape mismatch");
  }
  return product_distance(x.coords(), y.coords(), x.factors());
}

/// Applies a binary ball operation factor-wise.
template <typename BinaryOp>
ProductPoint factorwise(const ProductPoint& x, const ProductPoint& y, BinaryOp&& op) {
  if (x.factors() != y.factors() || x.dim() != y.dim()) {
    throw StructuralError("factorwise: shape mismatch");
  }
  Vector coords;
  coords.reserve(x.coords().size());
  for (std::size_t i = 0; i < x.factors(); ++i) {
    const Vector f = op(x.factor(i), y.factor(i));
    coords.insert(coords.end(), f.begin(), f.end());
  }
  return ProductPoint(x.factors(), x.dim(), std::move(coords));
}

}  // namespace hglove
