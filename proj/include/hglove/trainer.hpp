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

// Metric-space GloVe in products of Poincare balls.
//
// Per co-occurrence entry (i, j, X_ij) the loss is
//
//   f(X_ij) * (-h(d(w_i, w~_j)) + b_i + b~_j - log X_ij)^2
//
// with d the product distance. Points are updated with Riemannian SGD or
// Riemannian Adagrad (one accumulator per ball factor), biases with plain
// SGD or scalar Adagrad.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hglove/corpus.hpp"
#include "hglove/embedding.hpp"
#include "hglove/error.hpp"
#include "hglove/hfunction.hpp"
#include "hglove/manifold.hpp"
#include "hglove/random.hpp"

namespace hglove {

enum class Optimizer { rsgd, radagrad };
enum class TrainMode { deterministic, hogwild };

struct WeightParams {
  double x_max = 100.0;
  double alpha = 0.75;
};

/// 0.05 for h = square, 0.01 for the cosh family.
inline double default_learning_rate(const HFunction& h) {
  return h.kind == HFunction::Kind::square ? 0.05 : 0.01;
}

struct TrainConfig {
  std::size_t factors = 50;
  std::size_t dim = 2;
  HFunction h = HFunction::cosh_pow(2);
  double lr = 0.01;
  int epochs = 50;
  Optimizer optimizer = Optimizer::radagrad;
  WeightParams weight;
  std::uint64_t seed = 1;
  TrainMode mode = TrainMode::deterministic;
  unsigned threads = 1;
  double adagrad_eps = 1e-8;
  double init_radius = 1e-3;

  void validate() const {
    if (factors == 0 || dim == 0) throw StructuralError("train: factors and dim must be positive");
    if (!(lr > 0.0)) throw StructuralError("train: learning rate must be positive");
    if (epochs < 1) throw StructuralError("train: epochs must be >= 1");
    if (!h.trainable()) throw StructuralError("train: h=" + h.name() + " is not trainable");
    if (!(weight.x_max > 0.0)) throw StructuralError("train: x_max must be positive");
    if (!(init_radius > 0.0 && init_radius < 1.0)) throw StructuralError("train: bad init radius");
  }
};

/// Squared-gradient accumulators: one per (word, role, factor) for points,
/// one per bias.
struct AdagradState {
  std::size_t factors = 0;
  Vector target;
  Vector context;
  Vector bias_target;
  Vector bias_context;

  static AdagradState zeros(std::size_t vocab_size, std::size_t factors) {
    return {factors, Vector(vocab_size * factors, 0.0), Vector(vocab_size * factors, 0.0),
            Vector(vocab_size, 0.0), Vector(vocab_size, 0.0)};
  }
};

// ---------------------------------------------------------------------------
// Gradients

/// Derivative of ball_distance(x, y) with respect to x, written into `out`.
/// Returns the distance. The derivative at x == y is defined as zero.
inline double ball_distance_gradient(std::span<const double> x, std::span<const double> y,
                                     std::span<double> out) {
  const double xx = squared_norm(x);
  const double yy = squared_norm(y);
  const double xy = dot(x, y);
  const double alpha = 1.0 - xx;
  const double beta = 1.0 - yy;
  const double diff = squared_euclidean_distance(x, y);
  const double excess = 2.0 * diff / (alpha * beta);  // gamma - 1
  if (!(excess > 0.0)) {
    std::fill(out.begin(), out.end(), 0.0);
    return 0.0;
  }
  const double root = std::sqrt(excess * (2.0 + excess));  // sqrt(gamma^2 - 1)
  const double cx = (yy - 2.0 * xy + 1.0) / (alpha * alpha);
  const double cy = -1.0 / alpha;
  const double scale = 4.0 / (beta * root);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * (cx * x[i] + cy * y[i]);
  return std::acosh(1.0 + excess);
}

struct EntryGradients {
  Vector target;        // dJ/dw_i
  Vector context;       // dJ/dw~_j
  double bias_target = 0.0;
  double bias_context = 0.0;
  double residual = 0.0;
  double weight = 0.0;
  double loss = 0.0;
};

namespace detail {

struct EntryEval {
  double loss;
  double residual;
  double weight;
  double bias_grad;
};

/// Loss and Euclidean gradients of one oriented entry. `gw` and `gc`
/// (factors * dim) and `dists` (factors) are caller-provided buffers.
inline EntryEval evaluate_entry(std::span<const double> w, std::span<const double> c, double bw,
                                double bc, double x, const HFunction& h, const WeightParams& wp,
                                std::size_t factors, std::span<double> gw, std::span<double> gc,
                                std::span<double> dists) {
  const std::size_t k = w.size() / factors;
  double sq = 0.0;
  for (std::size_t q = 0; q < factors; ++q) {
    const double d = ball_distance_gradient(w.subspan(q * k, k), c.subspan(q * k, k), gw.subspan(q * k, k));
    ball_distance_gradient(c.subspan(q * k, k), w.subspan(q * k, k), gc.subspan(q * k, k));
    dists[q] = d;
    sq += d * d;
  }
  const double dist = std::sqrt(sq);
  const double f = glove_weight(x, wp.x_max, wp.alpha);
  const double r = -h(dist) + bw + bc - std::log(x);
  const double bias_grad = 2.0 * f * r;
  // dJ/dw_q = 2 f r * (-h'(D)) * (d_q / D) * dd_q/dw_q
  const double outer = dist > 0.0 ? -bias_grad * h.derivative(dist) / dist : 0.0;
  for (std::size_t q = 0; q < factors; ++q) {
    const double s = outer * dists[q];
    for (std::size_t i = q * k; i < (q + 1) * k; ++i) {
      gw[i] *= s;
      gc[i] *= s;
    }
  }
  return {f * r * r, r, f, bias_grad};
}

}  // namespace detail

/// Exact contribution f(X) * r^2 of one oriented entry (i = target, j = context).
inline double loss_term(const CoocEntry& e, const EmbeddingTable& t, const HFunction& h,
                        const WeightParams& wp) {
  const double dist = product_distance(t.target(e.i), t.context(e.j), t.factors());
  const double r = -h(dist) + t.bias_target(e.i) + t.bias_context(e.j) - std::log(e.x);
  return glove_weight(e.x, wp.x_max, wp.alpha) * r * r;
}

inline EntryGradients euclidean_gradients(const CoocEntry& e, const EmbeddingTable& t,
                                          const HFunction& h, const WeightParams& wp) {
  EntryGradients g;
  g.target.assign(t.width(), 0.0);
  g.context.assign(t.width(), 0.0);
  Vector dists(t.factors());
  const auto ev = detail::evaluate_entry(t.target(e.i), t.context(e.j), t.bias_target(e.i),
                                         t.bias_context(e.j), e.x, h, wp, t.factors(), g.target,
                                         g.context, dists);
  g.bias_target = ev.bias_grad;
  g.bias_context = ev.bias_grad;
  g.residual = ev.residual;
  g.weight = ev.weight;
  g.loss = ev.loss;
  return g;
}

// ---------------------------------------------------------------------------
// Riemannian steps

/// Euclidean gradient -> Riemannian gradient: grad / lambda_x^2.
inline Vector riemannian_scale(std::span<const double> grad, std::span<const double> x) {
  detail::require_same_dim(grad, x, "riemannian_scale");
  const double s = (1.0 - squared_norm(x));
  const double scale = s * s / 4.0;
  Vector out(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) out[i] = scale * grad[i];
  return out;
}

namespace detail {

/// x <- exp_x(scale * v), then projection; no allocation.
inline void exp_step_in_place(std::span<double> x, std::span<const double> v, double scale) {
  const double vn = std::abs(scale) * norm(v);
  if (vn == 0.0) return;
  const double xx = squared_norm(x);
  const double lambda = 2.0 / (1.0 - xx);
  const double t = std::tanh(lambda * vn / 2.0) / vn * scale;  // y = t * v
  const double xy = t * dot(x, v);
  const double yy = t * t * squared_norm(v);
  const double cx = 1.0 + 2.0 * xy + yy;
  const double cy = 1.0 - xx;
  const double denom = 1.0 + 2.0 * xy + xx * yy;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (cx * x[i] + cy * t * v[i]) / denom;
  project_in_place(x);
}

/// Converts a Euclidean gradient block in place into the Riemannian one.
inline void riemannian_scale_in_place(std::span<double> g, std::span<const double> x) {
  const double s = 1.0 - squared_norm(x);
  const double scale = s * s / 4.0;
  for (double& v : g) v *= scale;
}

/// One Radagrad update of a factor given its Riemannian gradient.
inline void radagrad_in_place(std::span<double> x, std::span<const double> rgrad, double& acc,
                              double lr, double eps) {
  const double lambda = 2.0 / (1.0 - squared_norm(x));
  acc += lambda * lambda * squared_norm(rgrad);
  exp_step_in_place(x, rgrad, -lr / std::sqrt(acc + eps));
}

}  // namespace detail

/// x <- exp_x(-lr * rgrad), projected.
inline Vector rsgd_step(std::span<const double> x, std::span<const double> rgrad, double lr) {
  detail::require_same_dim(x, rgrad, "rsgd_step");
  Vector out(x.begin(), x.end());
  detail::exp_step_in_place(out, rgrad, -lr);
  return out;
}

/// G += |rgrad|_x^2 (Riemannian norm), x <- exp_x(-(lr / sqrt(G + eps)) * rgrad).
inline Vector radagrad_step(std::span<const double> x, std::span<const double> rgrad,
                            double& accumulator, double lr, double eps = 1e-8) {
  detail::require_same_dim(x, rgrad, "radagrad_step");
  Vector out(x.begin(), x.end());
  detail::radagrad_in_place(out, rgrad, accumulator, lr, eps);
  return out;
}

/// Scalar Adagrad step for a bias.
inline double adagrad_scalar_step(double b, double grad, double& accumulator, double lr,
                                  double eps = 1e-8) {
  accumulator += grad * grad;
  return b - lr / std::sqrt(accumulator + eps) * grad;
}

// ---------------------------------------------------------------------------
// Initialization

/// Every factor uniform in the ball of the given radius; biases zero.
inline EmbeddingTable fresh_table(std::size_t vocab_size, std::size_t factors, std::size_t dim,
                                  const HFunction& h, std::uint64_t seed, double radius = 1e-3) {
  EmbeddingTable t(vocab_size, factors, dim, h);
  Rng rng(seed, 0x1d17);
  Vector dir(dim);
  const auto sample = [&](std::span<double> out) {
    // Gaussian direction (Box-Muller) and radius r * U^(1/dim).
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double u1 = 1.0 - rng.uniform();
        const double u2 = rng.uniform();
        dir[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        n2 += dir[i] * dir[i];
      }
    } while (n2 == 0.0);
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim)) / std::sqrt(n2);
    for (std::size_t i = 0; i < dim; ++i) out[i] = r * dir[i];
  };
  for (Vector* data : {&t.target_data(), &t.context_data()}) {
    for (std::size_t off = 0; off < data->size(); off += dim) {
      sample(std::span<double>(*data).subspan(off, dim));
    }
  }
  return t;
}

/// Warm start for a larger vocabulary: words present in `restricted_vocab`
/// keep their vectors and biases, the rest are freshly initialized.
inline EmbeddingTable init_trick(const EmbeddingTable& restricted, const Vocab& restricted_vocab,
                                 const Vocab& full_vocab, std::uint64_t seed,
                                 double radius = 1e-3) {
  if (restricted.vocab_size() != restricted_vocab.size()) {
    throw StructuralError("init_trick: restricted table and vocabulary sizes differ");
  }
  EmbeddingTable t = fresh_table(full_vocab.size(), restricted.factors(), restricted.dim(),
                                 restricted.h(), seed, radius);
  for (std::size_t w = 0; w < full_vocab.size(); ++w) {
    const auto src = restricted_vocab.find(full_vocab.word(static_cast<WordId>(w)));
    if (!src) continue;
    const auto tw = restricted.target(*src);
    const auto cw = restricted.context(*src);
    std::copy(tw.begin(), tw.end(), t.target(w).begin());
    std::copy(cw.begin(), cw.end(), t.context(w).begin());
    t.bias_target(w) = restricted.bias_target(*src);
    t.bias_context(w) = restricted.bias_context(*src);
  }
  t.set_words(full_vocab.words());
  return t;
}

// ---------------------------------------------------------------------------
// Training loop

struct EpochReport {
  int epoch = 0;     // 1-based
  double loss = 0.0;  // mean weighted loss over oriented entries
  const EmbeddingTable* table = nullptr;
};

struct TrainResult {
  EmbeddingTable table;
  std::vector<double> epoch_loss;
};

namespace detail {

/// Relaxed atomic access so hogwild workers race benignly on shared tables.
inline void load_block(std::span<double> dst, std::span<double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::atomic_ref<double>(src[i]).load(std::memory_order_relaxed);
}
inline void store_block(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) std::atomic_ref<double>(dst[i]).store(src[i], std::memory_order_relaxed);
}
inline double load(double& v) { return std::atomic_ref<double>(v).load(std::memory_order_relaxed); }
inline void store(double& v, double x) { std::atomic_ref<double>(v).store(x, std::memory_order_relaxed); }

class EntryWorker {
 public:
  EntryWorker(EmbeddingTable& table, AdagradState& state, const TrainConfig& cfg)
      : table_(table), state_(state), cfg_(cfg), w_(table.width()), c_(table.width()),
        gw_(table.width()), gc_(table.width()), dists_(table.factors()) {}

  /// Updates parameters for one oriented entry; returns the pre-update loss.
  double step(WordId i, WordId j, double x) {
    const std::size_t p = cfg_.factors;
    const std::size_t k = cfg_.dim;
    auto tw = table_.target(i);
    auto tc = table_.context(j);
    load_block(w_, tw);
    load_block(c_, tc);
    double& bw_ref = table_.bias_target(i);
    double& bc_ref = table_.bias_context(j);
    const double bw = load(bw_ref);
    const double bc = load(bc_ref);
    const EntryEval ev = evaluate_entry(w_, c_, bw, bc, x, cfg_.h, cfg_.weight, p, gw_, gc_, dists_);
    if (!std::isfinite(ev.loss)) return ev.loss;

    for (std::size_t q = 0; q < p; ++q) {
      update_factor(std::span<double>(w_).subspan(q * k, k), std::span<double>(gw_).subspan(q * k, k),
                    state_.target[i * p + q]);
      update_factor(std::span<double>(c_).subspan(q * k, k), std::span<double>(gc_).subspan(q * k, k),
                    state_.context[j * p + q]);
    }
    store_block(tw, w_);
    store_block(tc, c_);
    store(bw_ref, update_bias(bw, ev.bias_grad, state_.bias_target[i]));
    store(bc_ref, update_bias(bc, ev.bias_grad, state_.bias_context[j]));
    return ev.loss;
  }

 private:
  void update_factor(std::span<double> x, std::span<double> grad, double& acc_ref) {
    riemannian_scale_in_place(grad, x);
    if (cfg_.optimizer == Optimizer::rsgd) {
      exp_step_in_place(x, grad, -cfg_.lr);
      return;
    }
    double acc = load(acc_ref);
    radagrad_in_place(x, grad, acc, cfg_.lr, cfg_.adagrad_eps);
    store(acc_ref, acc);
  }

  double update_bias(double b, double grad, double& acc_ref) {
    if (cfg_.optimizer == Optimizer::rsgd) return b - cfg_.lr * grad;
    double acc = load(acc_ref);
    const double nb = adagrad_scalar_step(b, grad, acc, cfg_.lr, cfg_.adagrad_eps);
    store(acc_ref, acc);
    return nb;
  }

  EmbeddingTable& table_;
  AdagradState& state_;
  const TrainConfig& cfg_;
  Vector w_, c_, gw_, gc_, dists_;
};

}  // namespace detail

/// Optimizes the metric GloVe objective over both orientations of every
/// stored co-occurrence. Deterministic mode runs single-threaded and is
/// bitwise reproducible for a given seed. Throws TrainingError when the
/// loss becomes non-finite.
inline TrainResult train(const CoocMatrix& cooc, const TrainConfig& cfg,
                         std::optional<EmbeddingTable> init = std::nullopt,
                         const std::function<void(const EpochReport&)>& on_epoch = {}) {
  cfg.validate();
  const std::size_t vocab_size = cooc.vocab_size();
  EmbeddingTable table;
  if (init) {
    if (init->vocab_size() != vocab_size) {
      throw StructuralError("train: initial model has " + std::to_string(init->vocab_size()) +
                            " words, co-occurrences have " + std::to_string(vocab_size));
    }
    if (init->factors() != cfg.factors || init->dim() != cfg.dim) {
      throw StructuralError("train: initial model shape does not match the configuration");
    }
    table = std::move(*init);
    if (!(table.h() == cfg.h)) {
      EmbeddingTable relabeled(vocab_size, cfg.factors, cfg.dim, cfg.h);
      relabeled.target_data() = table.target_data();
      relabeled.context_data() = table.context_data();
      relabeled.bias_target_data() = table.bias_target_data();
      relabeled.bias_context_data() = table.bias_context_data();
      relabeled.set_words(table.words());
      table = std::move(relabeled);
    }
  } else {
    table = fresh_table(vocab_size, cfg.factors, cfg.dim, cfg.h, cfg.seed, cfg.init_radius);
  }
  AdagradState state = AdagradState::zeros(vocab_size, cfg.factors);

  const auto& entries = cooc.entries();
  std::vector<std::uint64_t> order;
  order.reserve(2 * entries.size());
  for (std::size_t n = 0; n < entries.size(); ++n) {
    order.push_back(static_cast<std::uint64_t>(n) << 1);
    if (entries[n].i != entries[n].j) order.push_back((static_cast<std::uint64_t>(n) << 1) | 1u);
  }

  const unsigned threads = cfg.mode == TrainMode::deterministic ? 1u : std::max(1u, cfg.threads);
  Rng rng(cfg.seed, 0x5e1f);
  TrainResult result;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::uint64_t>(order));
    std::vector<double> partial(threads, 0.0);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<bool> stop{false};

    const auto run = [&](unsigned t) {
      detail::EntryWorker worker(table, state, cfg);
      const std::size_t begin = order.size() * t / threads;
      const std::size_t end = order.size() * (t + 1) / threads;
      double sum = 0.0;
      for (std::size_t n = begin; n < end && !stop.load(std::memory_order_relaxed); ++n) {
        const auto& e = entries[order[n] >> 1];
        const bool flip = (order[n] & 1u) != 0;
        const WordId i = flip ? e.j : e.i;
        const WordId j = flip ? e.i : e.j;
        const double loss = worker.step(i, j, e.x);
        if (!std::isfinite(loss)) {
          std::ostringstream msg;
          msg << "non-finite loss in epoch " << epoch << " at entry #" << (order[n] >> 1) << " (i=" << i
              << ", j=" << j << ", X=" << e.x << "); |w_i|=" << norm(table.target(i))
              << " |w~_j|=" << norm(table.context(j)) << " b_i=" << table.bias_target(i)
              << " b~_j=" << table.bias_context(j);
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::make_exception_ptr(TrainingError(msg.str()));
          stop = true;
          return;
        }
        sum += loss;
      }
      partial[t] = sum;
    };

    if (threads == 1) {
      run(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run, t);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    double total = 0.0;
    for (double s : partial) total += s;
    const double mean = order.empty() ? 0.0 : total / static_cast<double>(order.size());
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(EpochReport{epoch, mean, &table});
  }
  result.table = std::move(table);
  return result;
}

/// Mean weighted loss of a table over both orientations of every entry.
inline double total_loss(const CoocMatrix& cooc, const EmbeddingTable& t, const WeightParams& wp) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : cooc.entries()) {
    sum += loss_term(e, t, t.h(), wp);
    ++n;
    if (e.i != e.j) {
      sum += loss_term({e.j, e.i, e.x}, t, t.h(), wp);
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace hglove
