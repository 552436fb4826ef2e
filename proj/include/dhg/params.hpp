#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dhg/tensor.hpp"

namespace dhg {

// A trainable weight matrix. `grad` is accumulated by Tape::backward and
// consumed (then cleared) by ParameterStore::adam_step.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;  // Adam first moment
  Tensor v;  // Adam second moment
};

struct AdamConfig {
  double lr = 0.001;
  double weight_decay = 0.0001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Owns all parameters of a model, keyed by name (kept in sorted order so
// checkpoints and update sweeps are reproducible byte for byte).
class ParameterStore {
 public:
  // Glorot-uniform init with bound sqrt(6 / (fan_in + fan_out)); the draw is
  // seeded from (seed, name) so adding/removing other parameters never shifts
  // this one's values. Throws ConfigError if the name already exists.
  Parameter& create_glorot(const std::string& name, int64_t fan_in, int64_t fan_out,
                           uint64_t seed);

  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) > 0; }
  size_t size() const { return params_.size(); }
  int64_t num_scalars() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grads();

  // One Adam update over every parameter. Weight decay is coupled L2: it is
  // added to the gradient before the moment updates. Gradients are cleared
  // afterwards.
  void adam_step(const AdamConfig& cfg);
  int64_t step_count() const { return step_; }

  // Checkpoint: `path` is the JSON manifest ([{name, shape, offset}, ...],
  // offsets in bytes); values go to a sibling file `path + ".bin"` as
  // little-endian 64-bit floats, row-major, in manifest (sorted-name) order.
  void save(const std::string& path) const;

  // Loads a checkpoint. If the store already holds parameters, the manifest
  // must cover exactly the same names and shapes; if empty, entries are
  // created. Optimizer state is reset.
  void load(const std::string& path);

 private:
  std::map<std::string, Parameter> params_;
  int64_t step_ = 0;
};

}  // namespace dhg
