#include "dhg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "dhg/error.hpp"
#include "dhg/metrics.hpp"
#include "dhg/rng.hpp"
#include "dhg/sampling.hpp"

namespace dhg {

void check_train_config(const TrainConfig& t) {
  if (t.lr <= 0.0) throw ConfigError("train: learning rate must be positive");
  if (t.weight_decay < 0.0) throw ConfigError("train: weight decay must be non-negative");
  if (t.batch_size < 1) throw ConfigError("train: batch size must be >= 1");
  if (t.patience < 1) throw ConfigError("train: patience must be >= 1");
  if (t.max_layers < 0 || t.max_layers > 4)
    throw ConfigError("train: layer cap must be in [0, 4]");
  if (t.folds < 1) throw ConfigError("train: fold count must be >= 1");
  if (t.max_epochs < 1) throw ConfigError("train: epoch cap must be >= 1");
  if (t.walks < 1) throw ConfigError("train: walk count must be >= 1");
  if (t.fanout < 1) throw ConfigError("train: fanout must be >= 1");
}

EarlyStopper::EarlyStopper(int64_t patience)
    : patience_(patience), best_(std::numeric_limits<double>::infinity()) {
  if (patience < 1) throw ConfigError("early stopping patience must be >= 1");
}

bool EarlyStopper::update(double val_nll) {
  ++epoch_;
  if (val_nll < best_) {
    best_ = val_nll;
    best_epoch_ = epoch_;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw ConfigError("mean of an empty sequence");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<double> collect(const std::vector<FoldResult>& rows, double FoldResult::*field) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

namespace {

struct EvalOut {
  double nll = 0.0;
  double micro = 0.0;
  double macro = 0.0;
};

std::vector<std::vector<int64_t>> chunked(const std::vector<int64_t>& xs, int64_t size) {
  std::vector<std::vector<int64_t>> out;
  for (size_t i = 0; i < xs.size(); i += static_cast<size_t>(size)) {
    const size_t end = std::min(xs.size(), i + static_cast<size_t>(size));
    out.emplace_back(xs.begin() + static_cast<int64_t>(i), xs.begin() + static_cast<int64_t>(end));
  }
  return out;
}

std::vector<Tape::Val> forward_any(const Model& model, ParameterStore& store, Tape& tape,
                                   const Dataset& ds, const std::vector<int64_t>& targets,
                                   const TrainConfig& tcfg, Rng& rng) {
  const SampleConfig sc{tcfg.walks, tcfg.fanout};
  if (model.config().variant == Variant::Rgcn) {
    RgcnBatch b = build_rgcn_batch(ds.graph, targets, model.config().layers, sc, rng);
    return model.forward(tape, store, b);
  }
  Batch b = build_batch(ds.graph, model.sen_template(), targets, model.config().layers, sc, rng);
  return model.forward(tape, store, b);
}

EvalOut evaluate(const Model& model, ParameterStore& store, const Dataset& ds,
                 const std::vector<int64_t>& targets, const TrainConfig& tcfg, Rng& rng) {
  std::vector<std::vector<double>> lps;
  std::vector<int64_t> preds;
  std::vector<int64_t> labels;
  for (const auto& chunk : chunked(targets, tcfg.batch_size)) {
    Tape tape;
    auto logits = forward_any(model, store, tape, ds, chunk, tcfg, rng);
    for (size_t i = 0; i < chunk.size(); ++i) {
      const std::vector<double> row = tape.value(logits[i]).vec();
      lps.push_back(log_softmax(row));
      preds.push_back(argmax(row));
      labels.push_back(ds.graph.label(chunk[i]));
    }
  }
  EvalOut out;
  out.nll = nll(lps, labels);
  out.micro = micro_f1(preds, labels);
  out.macro = macro_f1(preds, labels, ds.graph.num_classes());
  return out;
}

}  // namespace

FoldResult run_fold(const Dataset& ds, int64_t fold_index, const ModelConfig& mcfg,
                    const TrainConfig& tcfg, ParameterStore* best_params) {
  check_train_config(tcfg);
  if (fold_index < 0 || fold_index >= static_cast<int64_t>(ds.folds.size()))
    throw ConfigError("run_fold: fold index " + std::to_string(fold_index) +
                      " out of range for " + std::to_string(ds.folds.size()) + " folds");
  const auto& test = ds.folds[static_cast<size_t>(fold_index)];
  if (test.empty()) throw ConfigError("run_fold: empty test fold");

  const int64_t n = ds.graph.num_nodes(ds.graph.target_type());
  std::vector<bool> in_test(static_cast<size_t>(n), false);
  for (int64_t t : test) {
    if (t < 0 || t >= n)
      throw ConfigError("run_fold: fold references target " + std::to_string(t) +
                        " out of range");
    in_test[static_cast<size_t>(t)] = true;
  }
  std::vector<int64_t> remaining;
  for (int64_t t = 0; t < n; ++t)
    if (!in_test[static_cast<size_t>(t)]) remaining.push_back(t);

  Rng split_rng(
      derive_seed(tcfg.seed, {hash_tag("split"), static_cast<uint64_t>(fold_index)}));
  split_rng.shuffle(remaining);
  const auto train_n = static_cast<int64_t>(3 * remaining.size() / 4);
  std::vector<int64_t> train(remaining.begin(), remaining.begin() + train_n);
  std::vector<int64_t> val(remaining.begin() + train_n, remaining.end());
  if (train.empty() || val.empty())
    throw ConfigError("run_fold: not enough targets for a train/validation split");

  Model model(ds.graph, mcfg);
  ParameterStore store;
  model.init_params(store,
                    derive_seed(tcfg.seed, {hash_tag("init"), static_cast<uint64_t>(fold_index)}));

  AdamConfig adam;
  adam.lr = tcfg.lr;
  adam.weight_decay = tcfg.weight_decay;

  EarlyStopper stopper(tcfg.patience);
  ParameterStore best = store;
  for (int64_t epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
    Rng erng(derive_seed(tcfg.seed, {hash_tag("epoch"), static_cast<uint64_t>(fold_index),
                                     static_cast<uint64_t>(epoch)}));
    std::vector<int64_t> order = train;
    erng.shuffle(order);
    for (const auto& chunk : chunked(order, tcfg.batch_size)) {
      Tape tape;
      auto logits = forward_any(model, store, tape, ds, chunk, tcfg, erng);
      std::vector<int64_t> labels;
      for (int64_t t : chunk) labels.push_back(ds.graph.label(t));
      tape.backward(Model::mean_nll(tape, logits, labels));
      store.adam_step(adam);
    }
    // Fixed validation evidence: the stream is re-derived per epoch, so every
    // epoch scores against the same sampled batches.
    Rng vrng(derive_seed(tcfg.seed, {hash_tag("val"), static_cast<uint64_t>(fold_index)}));
    const EvalOut v = evaluate(model, store, ds, val, tcfg, vrng);
    if (stopper.update(v.nll)) best = store;
    if (stopper.should_stop()) break;
  }

  Rng trng(derive_seed(tcfg.seed, {hash_tag("test"), static_cast<uint64_t>(fold_index)}));
  const EvalOut te = evaluate(model, best, ds, test, tcfg, trng);

  FoldResult r;
  r.fold = fold_index;
  r.layers = mcfg.layers;
  r.nll = te.nll;
  r.micro_f1 = te.micro;
  r.macro_f1 = te.macro;
  r.best_val_nll = stopper.best_value();
  r.best_epoch = stopper.best_epoch();
  r.epochs_run = stopper.epochs_seen();
  if (best_params) *best_params = std::move(best);
  return r;
}

CvReport cross_validate(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
                        const std::string& dataset_name, bool allow_any_fold_count,
                        const std::vector<int64_t>& folds_subset,
                        std::vector<ParameterStore>* checkpoints) {
  check_train_config(tcfg);
  const auto viol = validate_splits(ds);
  if (!viol.empty()) throw ConfigError("cross_validate: invalid splits: " + viol.front());
  if (!allow_any_fold_count && static_cast<int64_t>(ds.folds.size()) != tcfg.folds)
    throw ConfigError("cross_validate: dataset has " + std::to_string(ds.folds.size()) +
                      " folds where the protocol expects " + std::to_string(tcfg.folds) +
                      "; pass the override to proceed");
  std::vector<int64_t> folds = folds_subset;
  if (folds.empty())
    for (int64_t f = 0; f < static_cast<int64_t>(ds.folds.size()); ++f) folds.push_back(f);

  CvReport rep;
  rep.dataset_name = dataset_name;
  rep.variant = to_string(mcfg.variant);
  rep.layers = mcfg.layers;
  for (int64_t f : folds) {
    ParameterStore fold_best;
    rep.rows.push_back(run_fold(ds, f, mcfg, tcfg, checkpoints ? &fold_best : nullptr));
    if (checkpoints) checkpoints->push_back(std::move(fold_best));
  }
  return rep;
}

LayerSelection select_layers(const Dataset& ds, const ModelConfig& base, const TrainConfig& tcfg,
                             const std::string& dataset_name, bool allow_any_fold_count,
                             const std::vector<int64_t>& folds_subset) {
  LayerSelection sel;
  const int32_t k_lo = base.variant == Variant::Rgcn ? 1 : 0;
  double best_val = std::numeric_limits<double>::infinity();
  sel.best_k = k_lo;
  for (int32_t k = k_lo; k <= tcfg.max_layers; ++k) {
    ModelConfig mc = base;
    mc.layers = k;
    CvReport rep =
        cross_validate(ds, mc, tcfg, dataset_name, allow_any_fold_count, folds_subset);
    const double mv = mean_of(collect(rep.rows, &FoldResult::best_val_nll));
    sel.grid.ks.push_back(k);
    sel.grid.reports.push_back(std::move(rep));
    if (mv < best_val) {  // strict comparison keeps the smaller k on ties
      best_val = mv;
      sel.best_k = k;
    }
  }
  return sel;
}

std::vector<int32_t> per_fold_selection(const LayerGrid& grid) {
  if (grid.reports.empty()) throw ConfigError("per_fold_selection: empty layer grid");
  const size_t nf = grid.reports.front().rows.size();
  std::vector<int32_t> out;
  for (size_t f = 0; f < nf; ++f) {
    double best = std::numeric_limits<double>::infinity();
    int32_t bk = grid.ks.front();
    for (size_t i = 0; i < grid.ks.size(); ++i) {
      const auto& rows = grid.reports[i].rows;
      if (rows.size() != nf) throw ConfigError("per_fold_selection: ragged layer grid");
      if (rows[f].best_val_nll < best) {
        best = rows[f].best_val_nll;
        bk = grid.ks[i];
      }
    }
    out.push_back(bk);
  }
  return out;
}

std::string format_mean_std(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f ± %.3f", mean, std);
  return buf;
}

std::string format_report(const CvReport& r) {
  const auto nlls = collect(r.rows, &FoldResult::nll);
  const auto micros = collect(r.rows, &FoldResult::micro_f1);
  const auto macros = collect(r.rows, &FoldResult::macro_f1);
  std::ostringstream os;
  os << r.dataset_name << "  " << r.variant << "  layers=" << r.layers
     << "  folds=" << r.rows.size() << "\n";
  os << "  nll       " << format_mean_std(mean_of(nlls), sample_std(nlls)) << "\n";
  os << "  micro-f1  " << format_mean_std(mean_of(micros), sample_std(micros)) << "\n";
  os << "  macro-f1  " << format_mean_std(mean_of(macros), sample_std(macros)) << "\n";
  return os.str();
}

void write_metrics_csv(const std::string& path, const std::vector<CvReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << "dataset,variant,layers,fold,nll,micro_f1,macro_f1\n";
  for (const auto& r : reports) {
    for (const auto& row : r.rows)
      out << r.dataset_name << "," << r.variant << "," << row.layers << "," << row.fold << ","
          << format_double(row.nll) << "," << format_double(row.micro_f1) << ","
          << format_double(row.macro_f1) << "\n";
    const auto nlls = collect(r.rows, &FoldResult::nll);
    const auto micros = collect(r.rows, &FoldResult::micro_f1);
    const auto macros = collect(r.rows, &FoldResult::macro_f1);
    out << r.dataset_name << "," << r.variant << "," << r.layers << ",mean,"
        << format_double(mean_of(nlls)) << "," << format_double(mean_of(micros)) << ","
        << format_double(mean_of(macros)) << "\n";
    out << r.dataset_name << "," << r.variant << "," << r.layers << ",std,"
        << format_double(sample_std(nlls)) << "," << format_double(sample_std(micros)) << ","
        << format_double(sample_std(macros)) << "\n";
  }
}

}  // namespace dhg
