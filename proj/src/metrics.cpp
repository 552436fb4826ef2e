#include "dhg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dhg/error.hpp"

namespace dhg {

std::vector<double> log_softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw ConfigError("log_softmax: empty logit row");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double x : logits) z += std::exp(x - mx);
  const double lz = std::log(z);
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - mx - lz;
  return out;
}

int64_t argmax(const std::vector<double>& v) {
  if (v.empty()) throw ConfigError("argmax: empty row");
  return std::max_element(v.begin(), v.end()) - v.begin();
}

double nll(const std::vector<std::vector<double>>& log_probs,
           const std::vector<int64_t>& labels) {
  if (log_probs.empty() || log_probs.size() != labels.size())
    throw ConfigError("nll: need one label per log-probability row");
  const size_t width = log_probs.front().size();
  double total = 0.0;
  for (size_t i = 0; i < log_probs.size(); ++i) {
    if (log_probs[i].size() != width)
      throw ConfigError("nll: rows have inconsistent class counts");
    const int64_t y = labels[i];
    if (y < 0 || y >= static_cast<int64_t>(width))
      throw ConfigError("nll: label " + std::to_string(y) + " out of range for " +
                        std::to_string(width) + " classes");
    total -= log_probs[i][static_cast<size_t>(y)];
  }
  return total / static_cast<double>(log_probs.size());
}

namespace {

struct Counts {
  std::vector<int64_t> tp, fp, fn;
};

Counts confusion(const std::vector<int64_t>& pred, const std::vector<int64_t>& truth,
                 int64_t num_classes) {
  if (pred.empty() || pred.size() != truth.size())
    throw ConfigError("f1: prediction and truth lengths differ or are empty");
  Counts c;
  c.tp.assign(static_cast<size_t>(num_classes), 0);
  c.fp.assign(static_cast<size_t>(num_classes), 0);
  c.fn.assign(static_cast<size_t>(num_classes), 0);
  for (size_t i = 0; i < pred.size(); ++i) {
    const int64_t p = pred[i], t = truth[i];
    if (p < 0 || p >= num_classes || t < 0 || t >= num_classes)
      throw ConfigError("f1: class index out of range for " + std::to_string(num_classes) +
                        " classes");
    if (p == t) {
      ++c.tp[static_cast<size_t>(p)];
    } else {
      ++c.fp[static_cast<size_t>(p)];
      ++c.fn[static_cast<size_t>(t)];
    }
  }
  return c;
}

int64_t max_class(const std::vector<int64_t>& pred, const std::vector<int64_t>& truth) {
  int64_t mx = -1;
  for (int64_t v : pred) mx = std::max(mx, v);
  for (int64_t v : truth) mx = std::max(mx, v);
  return mx + 1;
}

}  // namespace

double micro_f1(const std::vector<int64_t>& pred, const std::vector<int64_t>& truth) {
  const Counts c = confusion(pred, truth, std::max<int64_t>(max_class(pred, truth), 1));
  int64_t tp = 0, fp = 0, fn = 0;
  for (size_t k = 0; k < c.tp.size(); ++k) {
    tp += c.tp[k];
    fp += c.fp[k];
    fn += c.fn[k];
  }
  const double denom = 2.0 * tp + fp + fn;
  return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

double macro_f1(const std::vector<int64_t>& pred, const std::vector<int64_t>& truth,
                int64_t num_classes) {
  if (num_classes < 1) throw ConfigError("macro_f1: need at least one class");
  const Counts c = confusion(pred, truth, num_classes);
  double total = 0.0;
  for (size_t k = 0; k < static_cast<size_t>(num_classes); ++k) {
    const double denom = 2.0 * c.tp[k] + c.fp[k] + c.fn[k];
    total += denom == 0.0 ? 0.0 : 2.0 * c.tp[k] / denom;
  }
  return total / static_cast<double>(num_classes);
}

}  // namespace dhg
