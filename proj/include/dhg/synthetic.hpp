#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhg/graph.hpp"

namespace dhg {

// Knobs of the synthetic family. The family index is the mean number of
// "info" neighbors per target, the lever that controls how much evidence an
// immediate ego-network carries.
struct SynthConfig {
  int32_t family_index = 1;  // 1..10
  int64_t n_targets = 2000;
  int64_t feature_dim = 50;
  int64_t num_classes = 3;
  int64_t mixture_components = 5;
  double dirichlet_alpha = 1.0;
  double info_count_std = 1.0;
  double component_mean_scale = 3.0;
  uint64_t seed = 0;
};

// Every latent draw made during generation, enough to recompute the exact
// class posterior of any target. Regenerating with an equal config yields an
// equal trace.
struct GeneratorTrace {
  SynthConfig config;
  std::vector<std::vector<double>> component_means;  // K x dim
  std::vector<std::vector<double>> class_mixtures;   // C x K
  std::vector<int64_t> bridge_counts;                // A, B, C
  // class-major, bridge-minor: [c][b] is a distribution over that bridge's nodes
  std::vector<std::vector<std::vector<double>>> bridge_multinomials;
  std::vector<int64_t> target_class;
  std::vector<int64_t> target_component;
  std::vector<std::vector<int64_t>> target_bridge_choice;  // N x 3
  std::vector<int64_t> info_counts;
  std::vector<std::vector<int64_t>> info_components;
};

struct SynthResult {
  Dataset dataset;
  GeneratorTrace trace;
};

// Builds one dataset of the family: mixture latents, bridge nodes with
// class-dependent attachment, per-target features and info neighbors, the
// three target-bridge-target metapaths and 5 disjoint covering folds.
SynthResult generate(const SynthConfig& config);

void save_trace(const std::string& path, const GeneratorTrace& trace);
GeneratorTrace load_trace(const std::string& path);

// The observed evidence the oracle conditions on: the target's own feature
// row plus the rows of its info neighbors.
std::vector<std::vector<double>> target_feature_bag(const HeteroGraph& graph, int64_t target);

// Exact class posterior given the true mixture latents, computed in the log
// domain with max-subtracted log-sum-exp.
std::vector<double> bayes_posterior(const GeneratorTrace& trace,
                                    const std::vector<std::vector<double>>& features);

// Share of targets whose posterior argmax equals the label.
double bayes_accuracy(const Dataset& ds, const GeneratorTrace& trace);

}  // namespace dhg
