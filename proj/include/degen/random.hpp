#pragma once

// Seed derivation and the few sampling laws the generator needs.
//
// Every random stream is seeded from derive_seed(master, purpose, index):
// FNV-1a over the purpose string, then three rounds of splitmix64 mixing the
// master seed, the purpose hash and the index. Streams are std::mt19937_64.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "degen/core_model.hpp"

namespace degen {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ fnv1a(purpose));
  return splitmix64(h ^ index);
}

using Rng = std::mt19937_64;

struct LogNormalLaw {
  double mu = 0.0;
  double sigma = 1.0;
  bool operator==(const LogNormalLaw&) const = default;
};

/// Log-normal restricted to (lower, upper].
struct TruncatedLogNormalLaw {
  double mu = 0.0;
  double sigma = 1.0;
  double lower = 0.0;
  double upper = 1.0;
  bool operator==(const TruncatedLogNormalLaw&) const = default;
};

struct BetaLaw {
  double alpha = 1.0;
  double beta = 1.0;
  bool operator==(const BetaLaw&) const = default;
};

inline constexpr int kMaxRejections = 100000;

inline void validate(const LogNormalLaw& l, const char* name) {
  if (!(l.sigma > 0.0) || !std::isfinite(l.mu)) throw ValidationError(std::string(name) + ": log-normal needs sigma > 0");
}
inline void validate(const TruncatedLogNormalLaw& l, const char* name) {
  if (!(l.sigma > 0.0) || !std::isfinite(l.mu)) throw ValidationError(std::string(name) + ": log-normal needs sigma > 0");
  if (!(l.lower >= 0.0 && l.upper > l.lower))
    throw ValidationError(std::string(name) + ": truncation bounds must satisfy 0 <= lower < upper");
}
inline void validate(const BetaLaw& l, const char* name) {
  if (!(l.alpha > 0.0 && l.beta > 0.0)) throw ValidationError(std::string(name) + ": beta needs alpha, beta > 0");
}

inline double sample(const LogNormalLaw& l, Rng& rng) {
  return std::lognormal_distribution<double>(l.mu, l.sigma)(rng);
}

inline double sample(const TruncatedLogNormalLaw& l, Rng& rng) {
  std::lognormal_distribution<double> dist(l.mu, l.sigma);
  for (int i = 0; i < kMaxRejections; ++i) {
    const double x = dist(rng);
    if (x > l.lower && x <= l.upper) return x;
  }
  throw ValidationError("truncated log-normal: no sample inside (" + std::to_string(l.lower) + ", " +
                        std::to_string(l.upper) + "] after " + std::to_string(kMaxRejections) + " draws");
}

inline double sample(const BetaLaw& l, Rng& rng) {
  std::gamma_distribution<double> gx(l.alpha, 1.0), gy(l.beta, 1.0);
  for (;;) {
    const double x = gx(rng);
    const double y = gy(rng);
    if (x + y > 0.0) return x / (x + y);
  }
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace degen
