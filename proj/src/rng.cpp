#include "dhg/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dhg {

uint64_t mix64(uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t hash_tag(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> tags) {
  uint64_t s = mix64(base);
  for (uint64_t t : tags) s = mix64(s ^ mix64(t));
  return s;
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
  uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<int64_t>(gen_());  // full 64-bit range
  // rejection sampling to avoid modulo bias
  uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  uint64_t r;
  do {
    r = gen_();
  } while (r >= limit);
  return lo + static_cast<int64_t>(r % range);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  double mag = std::sqrt(-2.0 * std::log(u1));
  double two_pi = 6.283185307179586476925286766559;
  spare_ = mag * std::sin(two_pi * u2);
  have_spare_ = true;
  return mag * std::cos(two_pi * u2);
}

double Rng::gamma(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("gamma: alpha must be > 0");
  if (alpha < 1.0) {
    // boost: G(a) = G(a+1) * U^(1/a)
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  double d = alpha - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> Rng::dirichlet(double alpha, int k) {
  std::vector<double> out(static_cast<size_t>(k));
  double total = 0.0;
  for (auto& x : out) {
    x = gamma(alpha);
    total += x;
  }
  for (auto& x : out) x /= total;
  return out;
}

size_t Rng::categorical(const std::vector<double>& weights) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0.0) throw std::invalid_argument("categorical: weights sum to zero");
  double r = uniform() * total;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (r < acc) return i;
  }
  return weights.size() - 1;
}

std::vector<int32_t> Rng::sample_without_replacement(int32_t n, int32_t k) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
  std::vector<int32_t> pool(static_cast<size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  // partial Fisher-Yates: only the first k positions are finalized
  for (int32_t i = 0; i < k; ++i) {
    int64_t j = uniform_int(i, n - 1);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
  }
  pool.resize(static_cast<size_t>(k));
  return pool;
}

}  // namespace dhg
