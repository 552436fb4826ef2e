#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhg/graph.hpp"
#include "dhg/model.hpp"
#include "dhg/params.hpp"

namespace dhg {

struct TrainConfig {
  double lr = 0.001;
  double weight_decay = 0.0001;
  int64_t batch_size = 1024;
  int64_t patience = 5;
  int32_t max_layers = 4;
  int64_t folds = 5;
  int64_t max_epochs = 200;
  int64_t walks = 20;
  int64_t fanout = 20;
  uint64_t seed = 0;
};

void check_train_config(const TrainConfig& t);  // throws ConfigError on bad ranges

// Tracks the best validation NLL; improvement means strictly lower. Stops
// once `patience` consecutive epochs brought no improvement.
class EarlyStopper {
 public:
  explicit EarlyStopper(int64_t patience);
  bool update(double val_nll);  // feed one epoch; true when it improved
  bool should_stop() const { return since_best_ >= patience_; }
  int64_t best_epoch() const { return best_epoch_; }  // 1-based
  double best_value() const { return best_; }
  int64_t epochs_seen() const { return epoch_; }

 private:
  int64_t patience_;
  int64_t epoch_ = 0;
  int64_t best_epoch_ = 0;
  int64_t since_best_ = 0;
  double best_;
};

struct FoldResult {
  int64_t fold = -1;
  int32_t layers = 0;
  double nll = 0.0;  // test metrics of the best-validation checkpoint
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double best_val_nll = 0.0;
  int64_t best_epoch = 0;
  int64_t epochs_run = 0;
};

struct CvReport {
  std::string dataset_name;
  std::string variant;
  int32_t layers = 0;
  std::vector<FoldResult> rows;
};

double mean_of(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);  // n-1 denominator; 0 when n < 2
std::vector<double> collect(const std::vector<FoldResult>& rows, double FoldResult::*field);

// Trains on one fold: the fold is the test set, the rest splits 75/25 into
// train/validation (seeded). Each epoch reshuffles and resamples the training
// batches; validation and test evidence is sampled once per fold. The best
// validation checkpoint decides the reported test metrics and is copied to
// `best_params` when given.
FoldResult run_fold(const Dataset& ds, int64_t fold_index, const ModelConfig& mcfg,
                    const TrainConfig& tcfg, ParameterStore* best_params = nullptr);

// run_fold over every fold (or `folds_subset` when non-empty). The dataset
// must carry exactly `tcfg.folds` folds unless `allow_any_fold_count`.
// `checkpoints`, when given, receives one best store per row.
CvReport cross_validate(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
                        const std::string& dataset_name, bool allow_any_fold_count = false,
                        const std::vector<int64_t>& folds_subset = {},
                        std::vector<ParameterStore>* checkpoints = nullptr);

struct LayerGrid {
  std::vector<int32_t> ks;
  std::vector<CvReport> reports;  // parallel to ks
};

struct LayerSelection {
  int32_t best_k = 0;
  LayerGrid grid;
};

// Evaluates every admissible layer count (0..max for the metapath variants,
// 1..max for the relational baseline) and picks the smallest mean validation
// NLL, ties toward fewer layers.
LayerSelection select_layers(const Dataset& ds, const ModelConfig& base, const TrainConfig& tcfg,
                             const std::string& dataset_name, bool allow_any_fold_count = false,
                             const std::vector<int64_t>& folds_subset = {});

// Per-fold winner (by validation NLL) from an evaluated grid.
std::vector<int32_t> per_fold_selection(const LayerGrid& grid);

// "0.700 ± 0.071"
std::string format_mean_std(double mean, double std);
// Human-readable aggregate table over the report's folds.
std::string format_report(const CvReport& r);
// metrics.csv: header, one row per fold, then mean and std aggregate rows.
void write_metrics_csv(const std::string& path, const std::vector<CvReport>& reports);

}  // namespace dhg
