#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fairmsm/errors.hpp"

namespace fairmsm {

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_bits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) { return mix_bits(a ^ mix_bits(b)); }

// FNV-1a over the id string, so per-individual streams depend only on
// (master seed, individual id) and not on processing order.
inline std::uint64_t hash_id(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic samplers over mt19937_64. std::*_distribution output is
// implementation-defined, so every transformation here is explicit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on the open interval (0, 1)
  double uniform01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // rate 0 is a valid clock that never fires
  double exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(uniform01()) / rate;
  }

  // Box-Muller; consumes exactly two uniforms per draw
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  int categorical(const std::vector<double>& probs) {
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // inversion by sequential search; fine for the small means used here
  int poisson(double mu) {
    require(mu >= 0.0 && mu < 50.0, errc::invalid_argument, "poisson: mean out of supported range");
    double p = std::exp(-mu);
    double cdf = p;
    double u = uniform01();
    int k = 0;
    while (u > cdf && k < 200) {
      ++k;
      p *= mu / k;
      cdf += p;
    }
    return k;
  }

  // bounded draw in [0, n); modulo bias is irrelevant at our sizes
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

// Fisher-Yates with explicit index draws (std::shuffle is implementation-defined).
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng.below(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace fairmsm
