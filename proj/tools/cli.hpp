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

// The hglove command line. Exit codes: 0 success, 1 usage error, 2 data or
// format error. Metrics go to `out` with 6 significant digits, progress to
// `err`.

#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hglove/analogy.hpp"
#include "hglove/corpus.hpp"
#include "hglove/embedding.hpp"
#include "hglove/evaluation.hpp"
#include "hglove/hyperbolicity.hpp"
#include "hglove/hypernymy.hpp"
#include "hglove/manifest.hpp"
#include "hglove/trainer.hpp"

namespace hglove::cli {

namespace fs = std::filesystem;

inline std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string g6(const std::optional<double>& v) { return v ? g6(*v) : std::string("undefined"); }

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Records every option of `sub` as resolved after parsing.
inline std::map<std::string, std::string> resolved_flags(const CLI::App& sub) {
  std::map<std::string, std::string> flags;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->get_expected_max() == 0) {
      flags[name] = opt->count() > 0 ? "true" : "false";
      continue;
    }
    std::string v;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) v += (v.empty() ? "" : ",") + r;
    } else {
      v = opt->get_default_str();
    }
    flags[name] = v;
  }
  return flags;
}

/// Refuses to overwrite any input.
inline void check_output(const fs::path& output, const std::vector<fs::path>& inputs) {
  for (const auto& in : inputs) {
    if (!in.empty() && fs::weakly_canonical(in) == fs::weakly_canonical(output)) {
      throw StructuralError("output " + output.string() + " would overwrite an input");
    }
  }
}

inline fs::path manifest_next_to(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

struct Context {
  std::ostream& out;
  std::ostream& err;
};

// ---------------------------------------------------------------------------
// Shared option groups

struct SetOptions {
  std::string generic;
  std::string specific;
  std::size_t set_size = 5000;
  std::size_t pool = 50000;

  void attach(CLI::App* sub) {
    sub->add_option("--generic", generic, "File of generic words, one per line");
    sub->add_option("--specific", specific, "File of specific words, one per line");
    sub->add_option("--set-size", set_size, "Unsupervised selection: words per set");
    sub->add_option("--pool", pool, "Unsupervised selection: frequency-ranked pool size");
  }

  GenericSpecificSets select(const EmbeddingTable& model, RunManifest& manifest) const {
    if (generic.empty() != specific.empty()) throw StructuralError("--generic and --specific go together");
    if (!generic.empty()) {
      manifest.add_input(generic);
      manifest.add_input(specific);
      return select_sets_from_files(generic, specific, [&](std::string_view w) { return model.find(w); });
    }
    if (model.vocab_size() < pool) {
      throw DataError("model has " + std::to_string(model.vocab_size()) +
                      " words; unsupervised selection needs --pool <= vocabulary size");
    }
    return select_sets_unsupervised(model.vocab_size(), set_size, pool);
  }
};

enum class VectorChoice { target, combined };

inline const std::map<std::string, VectorChoice> kVectorChoices{{"target", VectorChoice::target},
                                                                 {"combined", VectorChoice::combined}};
inline const std::map<std::string, NeighborMetric> kMetrics{{"poincare", NeighborMetric::poincare_distance},
                                                             {"cosine", NeighborMetric::cosine}};

/// Owns the vectors behind a PointTable.
struct ModelPoints {
  Vector storage;
  PointTable table;

  ModelPoints(const EmbeddingTable& model, VectorChoice choice) {
    if (choice == VectorChoice::combined) {
      storage = combined_vectors(model);
      table = {storage, model.factors(), model.dim()};
    } else {
      table = target_points(model);
    }
  }
};

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"hglove: Poincare GloVe embeddings and evaluation", "hglove"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));
  Context ctx{out, err};
  std::function<void(RunManifest&)> action;
  CLI::App* chosen = nullptr;
  const auto bind = [&](CLI::App* sub, std::function<void(RunManifest&)> fn) {
    sub->callback([&, sub, fn] {
      chosen = sub;
      action = fn;
    });
  };

  // vocab
  struct {
    std::string input, output;
    std::uint64_t min_count = 1;
  } vo;
  auto* vocab_cmd = app.add_subcommand("vocab", "Count words and write the vocabulary");
  vocab_cmd->add_option("--input", vo.input, "Tokenized corpus, one sentence per line")->required();
  vocab_cmd->add_option("--output", vo.output, "Vocabulary TSV")->required();
  vocab_cmd->add_option("--min-count", vo.min_count, "Drop words rarer than this");
  bind(vocab_cmd, [&](RunManifest& m) {
    check_output(vo.output, {vo.input});
    m.add_input(vo.input);
    std::ifstream in(vo.input, std::ios::binary);
    if (!in) throw DataError("cannot open " + vo.input);
    const auto vocab = build_vocab(in, vo.min_count);
    save_vocab(vocab, vo.output);
    m.save(manifest_next_to(vo.output));
    ctx.err << "vocab: " << vocab.size() << " words\n";
    ctx.out << "vocab_size\t" << vocab.size() << '\n';
  });

  // cooccur
  struct {
    std::string input, vocab, output, weighting = "harmonic";
    int window = 10;
    unsigned threads = default_threads();
  } co;
  auto* cooc_cmd = app.add_subcommand("cooccur", "Count co-occurrences");
  cooc_cmd->add_option("--input", co.input, "Tokenized corpus")->required();
  cooc_cmd->add_option("--vocab", co.vocab, "Vocabulary TSV")->required();
  cooc_cmd->add_option("--output", co.output, "Binary co-occurrence file")->required();
  cooc_cmd->add_option("--window", co.window, "Symmetric window size");
  cooc_cmd->add_option("--weighting", co.weighting, "Increment per pair")
      ->check(CLI::IsMember({"harmonic", "flat"}));
  cooc_cmd->add_option("--threads", co.threads, "Worker threads");
  bind(cooc_cmd, [&](RunManifest& m) {
    check_output(co.output, {co.input, co.vocab});
    m.add_input(co.input);
    m.add_input(co.vocab);
    const auto vocab = load_vocab(co.vocab);
    std::ifstream in(co.input, std::ios::binary);
    if (!in) throw DataError("cannot open " + co.input);
    const auto weighting = co.weighting == "flat" ? Weighting::flat : Weighting::harmonic;
    const auto cooc = count_cooccurrences(in, vocab, co.window, weighting, co.threads);
    save_cooc(cooc, co.output);
    m.save(manifest_next_to(co.output));
    ctx.err << "cooccur: " << cooc.entries().size() << " entries over " << vocab.size() << " words\n";
    ctx.out << "entries\t" << cooc.entries().size() << '\n';
  });

  // train
  struct {
    std::string cooc, vocab, output, h = "cosh2", optimizer = "radagrad", init_model;
    std::size_t factors = 50, dim = 2;
    double lr = 0.0, x_max = 100.0, alpha = 0.75, init_radius = 1e-3;
    int epochs = 50;
    unsigned threads = default_threads();
    std::uint64_t seed = 1;
    bool deterministic = false;
  } tr;
  auto* train_cmd = app.add_subcommand("train", "Train a Poincare GloVe model");
  train_cmd->add_option("--cooc", tr.cooc, "Binary co-occurrence file")->required();
  train_cmd->add_option("--vocab", tr.vocab, "Vocabulary the co-occurrences were counted with")->required();
  train_cmd->add_option("--output", tr.output, "Binary model file")->required();
  train_cmd->add_option("--factors", tr.factors, "Number of product factors");
  train_cmd->add_option("--dim", tr.dim, "Dimension of each factor");
  train_cmd->add_option("--h", tr.h, "square, cosh, cosh2 or cosh^K");
  train_cmd->add_option("--lr", tr.lr, "Learning rate (0: 0.05 for square, 0.01 for cosh^K)");
  train_cmd->add_option("--epochs", tr.epochs, "Passes over the co-occurrences");
  train_cmd->add_option("--optimizer", tr.optimizer, "Riemannian optimizer")
      ->check(CLI::IsMember({"radagrad", "rsgd"}));
  train_cmd->add_option("--threads", tr.threads, "Worker threads (lock-free updates when > 1)");
  train_cmd->add_option("--seed", tr.seed, "Initialization and shuffling seed");
  train_cmd->add_option("--init-model", tr.init_model, "Warm start from a model, e.g. one trained on fewer words");
  train_cmd->add_option("--x-max", tr.x_max, "Weighting cutoff");
  train_cmd->add_option("--alpha", tr.alpha, "Weighting exponent");
  train_cmd->add_option("--init-radius", tr.init_radius, "Radius of the random initialization");
  train_cmd->add_flag("--deterministic", tr.deterministic, "Single-threaded, bitwise reproducible");
  bind(train_cmd, [&](RunManifest& m) {
    check_output(tr.output, {tr.cooc, tr.vocab, tr.init_model});
    TrainConfig cfg;
    cfg.factors = tr.factors;
    cfg.dim = tr.dim;
    cfg.h = HFunction::parse(tr.h);
    cfg.lr = tr.lr > 0.0 ? tr.lr : default_learning_rate(cfg.h);
    cfg.epochs = tr.epochs;
    cfg.optimizer = tr.optimizer == "rsgd" ? Optimizer::rsgd : Optimizer::radagrad;
    cfg.weight = {tr.x_max, tr.alpha};
    cfg.seed = tr.seed;
    cfg.threads = tr.deterministic ? 1 : tr.threads;
    cfg.mode = (tr.deterministic || cfg.threads == 1) ? TrainMode::deterministic : TrainMode::hogwild;
    cfg.init_radius = tr.init_radius;
    m.flags["lr"] = g6(cfg.lr);
    m.flags["threads"] = std::to_string(cfg.threads);
    m.seed = tr.seed;
    m.add_input(tr.cooc);
    m.add_input(tr.vocab);
    const auto cooc = load_cooc(tr.cooc);
    const auto vocab = load_vocab(tr.vocab);
    if (vocab.size() != cooc.vocab_size()) {
      throw DataError("vocabulary has " + std::to_string(vocab.size()) + " words, co-occurrences have " +
                      std::to_string(cooc.vocab_size()));
    }
    std::optional<EmbeddingTable> init;
    if (!tr.init_model.empty()) {
      m.add_input(tr.init_model);
      auto prior = load_model(tr.init_model);
      if (prior.words() == vocab.words()) {
        init = std::move(prior);
      } else if (!prior.words().empty()) {
        const Vocab prior_vocab(prior.words(), std::vector<std::uint64_t>(prior.vocab_size(), 1));
        init = init_trick(prior, prior_vocab, vocab, tr.seed, tr.init_radius);
      } else {
        throw DataError(tr.init_model + ": model has no word list to align with the vocabulary");
      }
    }
    auto result = train(cooc, cfg, std::move(init), [&](const EpochReport& r) {
      ctx.err << "epoch " << r.epoch << " loss " << g6(r.loss) << '\n';
    });
    result.table.set_words(vocab.words());
    save_model(result.table, tr.output);
    m.save(manifest_next_to(tr.output));
    ctx.out << "final_loss\t" << g6(result.epoch_loss.back()) << '\n';
  });

  // eval-sim
  struct {
    std::string model, dataset, metric = "poincare", vectors = "target", out_dir = ".";
  } es;
  auto* sim_cmd = app.add_subcommand("eval-sim", "Word similarity (Spearman)");
  sim_cmd->add_option("--model", es.model, "Binary model file")->required();
  sim_cmd->add_option("--dataset", es.dataset, "word1<TAB>word2<TAB>score")->required();
  sim_cmd->add_option("--metric", es.metric, "Similarity")->check(CLI::IsMember({"poincare", "cosine"}));
  sim_cmd->add_option("--vectors", es.vectors, "target or combined (gyro-midpoint of target and context)")
      ->check(CLI::IsMember({"target", "combined"}));
  sim_cmd->add_option("--out-dir", es.out_dir, "Where the manifest and detail log go");
  bind(sim_cmd, [&](RunManifest& m) {
    m.add_input(es.model);
    m.add_input(es.dataset);
    const auto model = load_model(es.model);
    const auto rows = load_word_pairs(es.dataset);
    const ModelPoints points(model, kVectorChoices.at(es.vectors));
    const auto res =
        eval_similarity(rows, points.table, [&](std::string_view w) { return model.find(w); }, kMetrics.at(es.metric));
    fs::create_directories(es.out_dir);
    write_details_jsonl(fs::path(es.out_dir) / "eval-sim.details.jsonl", res.details);
    m.save(fs::path(es.out_dir) / "eval-sim.manifest.json");
    ctx.out << g6(res.spearman) << '\t' << res.n_used << '\t' << res.n_dropped << '\n';
  });

  // eval-analogy
  struct {
    std::string model, dataset, metric = "poincare", method = "gyro", vectors = "target", out_dir = ".";
    double t = 0.3;
    bool cv = false;
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
  } ea;
  auto* an_cmd = app.add_subcommand("eval-analogy", "Word analogy accuracy");
  an_cmd->add_option("--model", ea.model, "Binary model file")->required();
  an_cmd->add_option("--dataset", ea.dataset, "Lines 'a b c d' with ': section' headers")->required();
  an_cmd->add_option("--t", ea.t, "Position on the geodesic between the two parallelogram vertices")
      ->check(CLI::Range(0.0, 1.0));
  an_cmd->add_option("--metric", ea.metric, "Neighbor metric")->check(CLI::IsMember({"poincare", "cosine"}));
  an_cmd->add_option("--method", ea.method, "gyro or 3cosadd")->check(CLI::IsMember({"gyro", "3cosadd"}));
  an_cmd->add_option("--vectors", ea.vectors, "target or combined")->check(CLI::IsMember({"target", "combined"}));
  an_cmd->add_flag("--cv", ea.cv, "Select t by two-fold cross-validation over 0, 0.1, ..., 1");
  an_cmd->add_option("--seed", ea.seed, "Fold split seed");
  an_cmd->add_option("--threads", ea.threads, "Worker threads");
  an_cmd->add_option("--out-dir", ea.out_dir, "Where the manifest and detail log go");
  bind(an_cmd, [&](RunManifest& m) {
    m.seed = ea.seed;
    m.add_input(ea.model);
    m.add_input(ea.dataset);
    const auto model = load_model(ea.model);
    const auto rows = load_analogy_dataset(ea.dataset);
    const ModelPoints points(model, kVectorChoices.at(ea.vectors));
    const auto lookup = [&](std::string_view w) { return model.find(w); };
    const auto resolved = resolve_analogies(rows, lookup);
    fs::create_directories(ea.out_dir);
    std::ofstream details(fs::path(ea.out_dir) / "eval-analogy.details.jsonl", std::ios::binary);
    if (ea.cv) {
      const auto grid = default_t_grid();
      const auto cv = cross_validate_t(resolved.queries, points.table, grid, ea.seed, kMetrics.at(ea.metric),
                                       ea.threads);
      for (int f = 0; f < 2; ++f) {
        details << nlohmann::json{{"fold", f},
                                  {"selected_t", cv.selected_t[f]},
                                  {"validation_accuracy", cv.validation_accuracy[f]},
                                  {"test_accuracy", cv.test_accuracy[f]}}
                       .dump()
                << '\n';
      }
      m.save(fs::path(ea.out_dir) / "eval-analogy.manifest.json");
      ctx.out << g6(cv.selected_t[0]) << '\t' << g6(cv.selected_t[1]) << '\t' << g6(cv.test_accuracy[0]) << '\t'
              << g6(cv.test_accuracy[1]) << '\t' << resolved.queries.size() << '\t'
              << resolved.dropped_semantic + resolved.dropped_syntactic << '\n';
      return;
    }
    AnalogyOptions opts;
    opts.method = ea.method == "3cosadd" ? AnalogyMethod::three_cos_add : AnalogyMethod::gyro;
    opts.metric = kMetrics.at(ea.metric);
    opts.t = ea.t;
    opts.threads = ea.threads;
    auto res = eval_analogy(resolved.queries, points.table, opts);
    res.semantic.dropped = resolved.dropped_semantic;
    res.syntactic.dropped = resolved.dropped_syntactic;
    for (std::size_t n = 0; n < resolved.queries.size(); ++n) {
      const auto& q = resolved.queries[n];
      details << nlohmann::json{{"a", model.word(q.a)},
                                {"b", model.word(q.b)},
                                {"c", model.word(q.c)},
                                {"gold", model.word(q.gold)},
                                {"prediction", model.word(res.predictions[n])},
                                {"correct", res.predictions[n] == q.gold},
                                {"split", q.split == AnalogySplit::semantic ? "semantic" : "syntactic"}}
                     .dump()
              << '\n';
    }
    m.save(fs::path(ea.out_dir) / "eval-analogy.manifest.json");
    const auto total = res.total();
    ctx.out << g6(res.semantic.accuracy()) << '\t' << g6(res.syntactic.accuracy()) << '\t' << g6(total.accuracy())
            << '\t' << total.evaluated << '\t' << total.dropped << '\n';
  });

  // eval-hypernymy
  struct {
    std::string model, dataset, task = "hyperlex", out_dir = ".";
    SetOptions sets;
    WblessOptions wbless;
  } eh;
  eh.wbless.threads = default_threads();
  auto* hyp_cmd = app.add_subcommand("eval-hypernymy", "Graded (Spearman) or binary (accuracy) entailment");
  hyp_cmd->add_option("--model", eh.model, "Binary model file with 2D factors")->required();
  hyp_cmd->add_option("--dataset", eh.dataset, "hyponym<TAB>hypernym<TAB>score or label")->required();
  hyp_cmd->add_option("--task", eh.task, "hyperlex or wbless")->check(CLI::IsMember({"hyperlex", "wbless"}));
  eh.sets.attach(hyp_cmd);
  hyp_cmd->add_option("--holdout", eh.wbless.holdout, "wbless: fraction used to pick the threshold");
  hyp_cmd->add_option("--repeats", eh.wbless.repeats, "wbless: random splits");
  hyp_cmd->add_option("--seed", eh.wbless.seed, "wbless: split seed");
  hyp_cmd->add_option("--threads", eh.wbless.threads, "Worker threads");
  hyp_cmd->add_option("--out-dir", eh.out_dir, "Where the manifest and detail log go");
  bind(hyp_cmd, [&](RunManifest& m) {
    m.seed = eh.wbless.seed;
    m.add_input(eh.model);
    m.add_input(eh.dataset);
    const auto model = load_model(eh.model);
    const bool wbless = eh.task == "wbless";
    const auto rows = load_word_pairs(eh.dataset, wbless ? LabelKind::binary : LabelKind::graded);
    const auto points = target_points(model);
    const auto sets = eh.sets.select(model, m);
    std::size_t clamped = 0;
    const auto transform = fit_isometry(points, sets);
    const auto gaussians = gaussians_for(points, transform, &clamped);
    if (transform.degenerate_count() > 0) {
      ctx.err << "warning: " << transform.degenerate_count() << " factors used the default rotation\n";
    }
    if (clamped > 0) ctx.err << "warning: " << clamped << " sigma values clamped\n";
    const auto lookup = [&](std::string_view w) { return model.find(w); };
    fs::create_directories(eh.out_dir);
    const auto details = fs::path(eh.out_dir) / "eval-hypernymy.details.jsonl";
    if (wbless) {
      const auto res = eval_wbless(rows, gaussians, lookup, eh.wbless);
      write_details_jsonl(details, res.details);
      m.save(fs::path(eh.out_dir) / "eval-hypernymy.manifest.json");
      ctx.out << g6(res.mean_accuracy) << '\t' << res.n_used << '\t' << res.n_dropped << '\n';
    } else {
      const auto res = eval_hyperlex(rows, gaussians, lookup);
      write_details_jsonl(details, res.details);
      m.save(fs::path(eh.out_dir) / "eval-hypernymy.manifest.json");
      ctx.out << g6(res.spearman) << '\t' << res.n_used << '\t' << res.n_dropped << '\n';
    }
  });

  // delta-hyp
  struct {
    std::string cooc, h = "cosh2", smoothing = "none", out_dir = ".";
    DeltaOptions opt;
    std::size_t max_words = 0;
  } dh;
  dh.opt.threads = default_threads();
  auto* delta_cmd = app.add_subcommand("delta-hyp", "Sampled delta-hyperbolicity of the co-occurrence metric");
  delta_cmd->add_option("--cooc", dh.cooc, "Binary co-occurrence file")->required();
  delta_cmd->add_option("--h", dh.h, "square, cosh^K, identity (x) or log");
  delta_cmd->add_option("--tuples", dh.opt.n_tuples, "Sampled 4-tuples");
  delta_cmd->add_option("--pairs", dh.opt.n_pairs, "Sampled pairs for the mean distance");
  delta_cmd->add_option("--seed", dh.opt.seed, "Sampling seed");
  delta_cmd->add_option("--smoothing", dh.smoothing, "none rejects pairs that never co-occur; plus1 adds 1 to counts")
      ->check(CLI::IsMember({"none", "plus1"}));
  delta_cmd->add_option("--max-words", dh.max_words, "Restrict to the most frequent words (0: all)");
  delta_cmd->add_option("--threads", dh.opt.threads, "Worker threads");
  delta_cmd->add_option("--out-dir", dh.out_dir, "Where the manifest goes");
  bind(delta_cmd, [&](RunManifest& m) {
    m.seed = dh.opt.seed;
    m.add_input(dh.cooc);
    const auto cooc = load_cooc(dh.cooc);
    const auto h = HFunction::parse(dh.h);
    const InducedMetric metric{&cooc, h, dh.smoothing == "plus1" ? Smoothing::plus_one : Smoothing::none,
                               dh.max_words};
    const auto est = estimate_delta(metric, dh.opt);
    if (est.rejected > 0) ctx.err << "delta-hyp: " << est.rejected << " samples rejected\n";
    fs::create_directories(dh.out_dir);
    m.save(fs::path(dh.out_dir) / "delta-hyp.manifest.json");
    ctx.out << h.name() << '\t' << g6(est.d_avg) << '\t' << g6(est.delta_avg) << '\t' << g6(est.ratio) << '\t'
            << est.clamp_count << '\n';
  });

  // export-gaussian
  struct {
    std::string model, output;
    SetOptions sets;
  } eg;
  auto* gauss_cmd = app.add_subcommand("export-gaussian", "Write 'word mu_1 sigma_1 ... mu_p sigma_p' rows");
  gauss_cmd->add_option("--model", eg.model, "Binary model file with 2D factors")->required();
  gauss_cmd->add_option("--output", eg.output, "TSV file")->required();
  eg.sets.attach(gauss_cmd);
  bind(gauss_cmd, [&](RunManifest& m) {
    check_output(eg.output, {eg.model, eg.sets.generic, eg.sets.specific});
    m.add_input(eg.model);
    const auto model = load_model(eg.model);
    const auto points = target_points(model);
    const auto gaussians = gaussians_for(points, fit_isometry(points, eg.sets.select(model, m)));
    std::ofstream file(eg.output, std::ios::binary);
    if (!file) throw DataError("cannot write " + eg.output);
    for (std::size_t w = 0; w < gaussians.size(); ++w) {
      file << model.word(w);
      for (std::size_t f = 0; f < gaussians[w].size(); ++f) {
        file << '\t' << detail::format_g17(gaussians[w].mu[f]) << '\t' << detail::format_g17(gaussians[w].sigma[f]);
      }
      file << '\n';
    }
    if (!file) throw DataError("write failed: " + eg.output);
    m.save(manifest_next_to(eg.output));
    ctx.out << "words\t" << gaussians.size() << '\n';
  });

  // export-text
  struct {
    std::string model, output;
  } et;
  auto* text_cmd = app.add_subcommand("export-text", "Write target and context vectors as text");
  text_cmd->add_option("--model", et.model, "Binary model file")->required();
  text_cmd->add_option("--output", et.output, "Target vectors; context vectors go to a sibling file")->required();
  bind(text_cmd, [&](RunManifest& m) {
    check_output(et.output, {et.model});
    check_output(context_text_path(et.output), {et.model});
    m.add_input(et.model);
    const auto model = load_model(et.model);
    export_text(model, et.output);
    m.save(manifest_next_to(et.output));
    ctx.out << "words\t" << model.vocab_size() << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    const CLI::App* failed = &app;
    for (const CLI::App* sub : app.get_subcommands({})) {
      if (sub->parsed()) failed = sub;
    }
    err << "error: " << e.what() << "\n\n" << failed->help();
    return 1;
  }
  if (!chosen || !action) return 1;

  RunManifest manifest;
  manifest.subcommand = chosen->get_name();
  manifest.flags = resolved_flags(*chosen);
  try {
    action(manifest);
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace hglove::cli
