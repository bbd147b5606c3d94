#pragma once

// Algorithmic Resilience Quotient over a portfolio of algorithm descriptors.
// Soft form: mean over ordered pairs of K_P * D_s. Hard form: fraction of
// ordered pairs with K_P >= epsilon and D_s > delta.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "degen/core_model.hpp"

namespace degen {

struct AlgorithmDescriptor {
  std::string id;
  std::vector<double> performance;  // P, dimension d
  std::vector<double> structure;    // S, non-negative, non-zero

  bool operator==(const AlgorithmDescriptor&) const = default;
};

using Portfolio = std::vector<AlgorithmDescriptor>;

/// Square matrix, row-major.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size, double fill = 0.0) : n(size), values(size * size, fill) {}
  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

struct ArqReport {
  double hard = 0.0;
  double soft = 0.0;
  SquareMatrix kernel;         // K_P
  SquareMatrix struct_dissim;  // D_s
};

inline void validate(const Portfolio& portfolio) {
  if (portfolio.empty()) return;
  const auto d = portfolio.front().performance.size();
  const auto ks = portfolio.front().structure.size();
  for (const auto& a : portfolio) {
    if (a.performance.size() != d)
      throw ValidationError("algorithm '" + a.id + "' has performance dimension " +
                            std::to_string(a.performance.size()) + ", expected " + std::to_string(d));
    if (a.structure.size() != ks)
      throw ValidationError("algorithm '" + a.id + "' has structure dimension " + std::to_string(a.structure.size()) +
                            ", expected " + std::to_string(ks));
    bool positive = false;
    for (double s : a.structure) {
      if (!(s >= 0.0)) throw ValidationError("algorithm '" + a.id + "' has a negative structure entry");
      positive = positive || s > 0.0;
    }
    if (!positive) throw ValidationError("algorithm '" + a.id + "' has an all-zero structure vector");
  }
}

/// Gaussian similarity exp(-|p-q|^2 / (2 sigma^2)).
inline double performance_kernel(const std::vector<double>& p, const std::vector<double>& q, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("kernel width sigma must be > 0");
  if (p.size() != q.size()) throw ValidationError("performance descriptor dimension mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sq += (p[i] - q[i]) * (p[i] - q[i]);
  return std::exp(-sq / (2.0 * sigma * sigma));
}

/// 1 - cosine similarity. Clamped to [0,1] against rounding.
inline double structural_separation(const std::vector<double>& s, const std::vector<double>& t) {
  if (s.size() != t.size()) throw ValidationError("structural descriptor dimension mismatch");
  double dot = 0.0, ns = 0.0, nt = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    dot += s[i] * t[i];
    ns += s[i] * s[i];
    nt += t[i] * t[i];
  }
  if (ns == 0.0 || nt == 0.0) throw ValidationError("cosine dissimilarity undefined for a zero structure vector");
  const double v = 1.0 - dot / (std::sqrt(ns) * std::sqrt(nt));
  return std::clamp(v, 0.0, 1.0);
}

/// Fills K_P and D_s. Each unordered pair is evaluated once.
inline ArqReport arq_matrices(const Portfolio& portfolio, double sigma, EvalCounters* counters = nullptr) {
  validate(portfolio);
  if (!(sigma > 0.0)) throw ValidationError("kernel width sigma must be > 0");
  const std::size_t n = portfolio.size();
  ArqReport rep;
  rep.kernel = SquareMatrix(n, 1.0);
  rep.struct_dissim = SquareMatrix(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = performance_kernel(portfolio[i].performance, portfolio[j].performance, sigma);
      const double s = structural_separation(portfolio[i].structure, portfolio[j].structure);
      rep.kernel.at(i, j) = rep.kernel.at(j, i) = k;
      rep.struct_dissim.at(i, j) = rep.struct_dissim.at(j, i) = s;
    }
  }
  if (counters && n > 1) counters->kernel_evaluations += n * (n - 1) / 2;
  return rep;
}

namespace detail {

inline void arq_aggregate(ArqReport& rep, double epsilon, double delta, EvalCounters* counters) {
  const std::size_t n = rep.kernel.n;
  rep.soft = rep.hard = 0.0;
  if (n <= 1) return;
  double soft = 0.0, hard = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = rep.kernel(i, j), s = rep.struct_dissim(i, j);
      soft += k * s;
      if (k >= epsilon && s > delta) hard += 1.0;
    }
  }
  if (counters) counters->summand_visits += n * (n - 1);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  rep.soft = 2.0 * soft / pairs;
  rep.hard = 2.0 * hard / pairs;
}

}  // namespace detail

/// Both quotients plus the matrices behind them.
inline ArqReport arq_report(const Portfolio& portfolio, double epsilon, double delta, double sigma,
                            EvalCounters* counters = nullptr) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in [0,1]");
  auto rep = arq_matrices(portfolio, sigma, counters);
  detail::arq_aggregate(rep, epsilon, delta, counters);
  return rep;
}

inline double arq_soft(const Portfolio& portfolio, double sigma, EvalCounters* counters = nullptr) {
  return arq_report(portfolio, 0.0, 1.0, sigma, counters).soft;
}

inline double arq_hard(const Portfolio& portfolio, double epsilon, double delta, double sigma,
                       EvalCounters* counters = nullptr) {
  return arq_report(portfolio, epsilon, delta, sigma, counters).hard;
}

/// Row sums of K_P excluding the diagonal, keyed by algorithm id.
inline std::map<std::string, double> kernel_centrality(const Portfolio& portfolio, double sigma,
                                                       EvalCounters* counters = nullptr) {
  const auto rep = arq_matrices(portfolio, sigma, counters);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < portfolio.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < portfolio.size(); ++j)
      if (j != i) s += rep.kernel(i, j);
    out[portfolio[i].id] = s;
  }
  return out;
}

}  // namespace degen
