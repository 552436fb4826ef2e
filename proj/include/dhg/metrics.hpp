#pragma once

#include <cstdint>
#include <vector>

namespace dhg {

// Max-subtracted log-softmax of one logit row.
std::vector<double> log_softmax(const std::vector<double>& logits);

// Index of the first maximum.
int64_t argmax(const std::vector<double>& v);

// Mean negative log-probability of the true class. Rows must share one width
// and every label must index into its row.
double nll(const std::vector<std::vector<double>>& log_probs,
           const std::vector<int64_t>& labels);

// F1 from globally pooled true/false positives and false negatives over all
// classes; for single-label multiclass prediction this equals accuracy.
double micro_f1(const std::vector<int64_t>& pred, const std::vector<int64_t>& truth);

// Unweighted mean of per-class F1 over all `num_classes` classes. A class
// with no predicted and no actual positives contributes F1 = 0.
double macro_f1(const std::vector<int64_t>& pred, const std::vector<int64_t>& truth,
                int64_t num_classes);

}  // namespace dhg
