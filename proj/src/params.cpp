#include "dhg/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "dhg/error.hpp"
#include "dhg/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace dhg {

using nlohmann::json;

Parameter& ParameterStore::create_glorot(const std::string& name, int64_t fan_in,
                                         int64_t fan_out, uint64_t seed) {
  if (params_.count(name))
    throw ConfigError("parameter '" + name + "' created twice");
  if (fan_in <= 0 || fan_out <= 0)
    throw ShapeError("parameter '" + name + "': non-positive shape " +
                     std::to_string(fan_in) + "x" + std::to_string(fan_out));
  Parameter p;
  p.name = name;
  p.value = Tensor(fan_in, fan_out);
  p.grad = Tensor(fan_in, fan_out);
  p.m = Tensor(fan_in, fan_out);
  p.v = Tensor(fan_in, fan_out);
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Rng rng(derive_seed(seed, {hash_tag("param"), hash_tag(name)}));
  for (int64_t i = 0; i < p.value.size(); ++i) p.value.data()[i] = rng.uniform(-bound, bound);
  auto [it, ok] = params_.emplace(name, std::move(p));
  (void)ok;
  return it->second;
}

Parameter& ParameterStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

const Parameter& ParameterStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

int64_t ParameterStore::num_scalars() const {
  int64_t n = 0;
  for (const auto& [_, p] : params_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grads() {
  for (auto& [_, p] : params_)
    std::fill(p.grad.data(), p.grad.data() + p.grad.size(), 0.0);
}

void ParameterStore::adam_step(const AdamConfig& cfg) {
  if (cfg.lr <= 0.0)
    throw ConfigError("adam: learning rate must be positive, got " + std::to_string(cfg.lr));
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
  for (auto& [_, p] : params_) {
    for (int64_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.data()[i] + cfg.weight_decay * p.value.data()[i];
      p.m.data()[i] = cfg.beta1 * p.m.data()[i] + (1.0 - cfg.beta1) * g;
      p.v.data()[i] = cfg.beta2 * p.v.data()[i] + (1.0 - cfg.beta2) * g * g;
      const double mhat = p.m.data()[i] / bc1;
      const double vhat = p.v.data()[i] / bc2;
      p.value.data()[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
  zero_grads();
}

void ParameterStore::save(const std::string& path) const {
  json manifest = json::array();
  int64_t offset = 0;
  for (const auto& [name, p] : params_) {
    manifest.push_back({{"name", name},
                        {"shape", {p.value.rows(), p.value.cols()}},
                        {"offset", offset}});
    offset += p.value.size() * static_cast<int64_t>(sizeof(double));
  }
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write checkpoint manifest: " + path);
    out << manifest.dump(2) << "\n";
  }
  std::ofstream bin(path + ".bin", std::ios::binary);
  if (!bin) throw ConfigError("cannot write checkpoint data: " + path + ".bin");
  for (const auto& [_, p] : params_)
    bin.write(reinterpret_cast<const char*>(p.value.data()),
              static_cast<std::streamsize>(p.value.size() * sizeof(double)));
  if (!bin) throw ConfigError("short write to checkpoint data: " + path + ".bin");
}

void ParameterStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read checkpoint manifest: " + path);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint manifest " + path + ": " + e.what());
  }
  if (!manifest.is_array())
    throw ConfigError("malformed checkpoint manifest " + path + ": expected an array");

  std::ifstream bin(path + ".bin", std::ios::binary);
  if (!bin) throw ConfigError("cannot read checkpoint data: " + path + ".bin");

  const bool creating = params_.empty();
  size_t seen = 0;
  for (const auto& entry : manifest) {
    const std::string name = entry.at("name").get<std::string>();
    const int64_t rows = entry.at("shape").at(0).get<int64_t>();
    const int64_t cols = entry.at("shape").at(1).get<int64_t>();
    const int64_t offset = entry.at("offset").get<int64_t>();
    Parameter* p;
    if (creating) {
      Parameter fresh;
      fresh.name = name;
      fresh.value = Tensor(rows, cols);
      p = &params_.emplace(name, std::move(fresh)).first->second;
    } else {
      auto it = params_.find(name);
      if (it == params_.end())
        throw ConfigError("checkpoint " + path + " has unexpected parameter '" + name + "'");
      p = &it->second;
      if (p->value.rows() != rows || p->value.cols() != cols)
        throw ConfigError("checkpoint " + path + ": shape mismatch for '" + name +
                          "': expected " + p->value.shape_str() + ", found " +
                          std::to_string(rows) + "x" + std::to_string(cols));
    }
    bin.seekg(offset);
    bin.read(reinterpret_cast<char*>(p->value.data()),
             static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    if (!bin)
      throw ConfigError("checkpoint data " + path + ".bin truncated at parameter '" + name +
                        "'");
    p->grad = Tensor(rows, cols);
    p->m = Tensor(rows, cols);
    p->v = Tensor(rows, cols);
    ++seen;
  }
  if (!creating && seen != params_.size())
    throw ConfigError("checkpoint " + path + " covers " + std::to_string(seen) + " of " +
                      std::to_string(params_.size()) + " parameters");
  step_ = 0;
}

}  // namespace dhg
