#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace dhg {

// All stochastic code draws from explicitly seeded streams so that runs are
// reproducible byte-for-byte. Distributions are implemented on top of
// mt19937_64 instead of <random>'s distribution classes, whose output is
// implementation-defined.

uint64_t mix64(uint64_t x);

uint64_t hash_tag(std::string_view tag);

// Derives an independent stream seed from a base seed and a list of tags
// (typically a purpose tag plus indices such as epoch and node id).
uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> tags);

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer in [lo, hi], inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi);

  double normal();  // standard normal, Box-Muller
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Marsaglia-Tsang; alpha > 0.
  double gamma(double alpha);

  std::vector<double> dirichlet(double alpha, int k);

  // Index draw proportional to the given nonnegative weights.
  size_t categorical(const std::vector<double>& weights);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from {0, ..., n-1}, order as drawn.
  std::vector<int32_t> sample_without_replacement(int32_t n, int32_t k);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dhg
