#pragma once

// Functional Substitution Score: baseline (fraction of structurally distinct
// ordered pairs) and the capacity/load/admissibility weighted variant.

#include <map>
#include <string>
#include <vector>

#include "degen/core_model.hpp"

namespace degen {

struct FssReport {
  std::string function_id;
  std::size_t n = 0;
  double baseline = 0.0;
  double weighted = 0.0;
  std::map<std::string, double> node_weights;
  std::size_t admissible_count = 0;
};

/// Node-level operational weight w_i.
inline double node_weight(const Element& e, WeightMode mode, const MetricConfig& cfg) {
  switch (mode) {
    case WeightMode::None:
      return 1.0;
    case WeightMode::Availability:
      return e.availability >= cfg.a_min ? e.availability : 0.0;
    case WeightMode::Reliability: {
      const double r = reliability(e.mtbf, cfg.mission_time);
      return r >= cfg.r_min ? r : 0.0;
    }
    case WeightMode::Joint: {
      const double r = reliability(e.mtbf, cfg.mission_time);
      return (e.availability >= cfg.a_min && r >= cfg.r_min) ? e.availability * r : 0.0;
    }
  }
  return 0.0;
}

/// Capacity/load compatibility of a substitute pair, scaled by D_ij.
inline double pair_weight(const Element& a, const Element& b, double dij) {
  return std::min(a.capacity, b.capacity) / (1.0 + std::abs(a.load - b.load)) * dij;
}

namespace detail {

// Sum over unordered pairs (i<j) in ascending order, doubled to cover the
// ordered sum. `term(i, j)` receives instance indices.
template <typename Term>
double ordered_pair_mean(const std::vector<std::size_t>& members, Term&& term, EvalCounters* counters) {
  const std::size_t n = members.size();
  if (n <= 1) return 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) sum += term(members[a], members[b]);
  if (counters) counters->summand_visits += n * (n - 1);
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace detail

inline double fss_baseline(const DeploymentInstance& inst, std::string_view function_id, double delta,
                           EvalCounters* counters = nullptr) {
  const auto members = inst.realizations(function_id);
  const auto& d = inst.dissimilarity;
  return detail::ordered_pair_mean(
      members, [&](std::size_t i, std::size_t j) { return d(i, j) > delta ? 1.0 : 0.0; }, counters);
}

inline FssReport fss_weighted(const DeploymentInstance& inst, std::string_view function_id, const MetricConfig& cfg,
                              EvalCounters* counters = nullptr) {
  validate(cfg);
  const auto members = inst.realizations(function_id);
  FssReport rep;
  rep.function_id = std::string(function_id);
  rep.n = members.size();

  std::vector<double> w(inst.size(), 0.0);
  for (auto i : members) {
    w[i] = node_weight(inst.elements[i], cfg.weight_mode, cfg);
    rep.node_weights[inst.elements[i].id] = w[i];
    if (w[i] > 0.0) ++rep.admissible_count;
  }

  // one pass over unordered pairs fills both sums
  const auto& d = inst.dissimilarity;
  const std::size_t n = members.size();
  if (n <= 1) return rep;
  double distinct = 0.0, weighted = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto i = members[a], j = members[b];
      if (!(d(i, j) > cfg.delta)) continue;
      distinct += 1.0;
      weighted += pair_weight(inst.elements[i], inst.elements[j], d(i, j)) * w[i] * w[j];
    }
  }
  if (counters) counters->summand_visits += n * (n - 1);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  rep.baseline = 2.0 * distinct / pairs;
  rep.weighted = 2.0 * weighted / pairs;
  return rep;
}

/// Reports for every function in the catalog, in catalog order.
inline std::vector<FssReport> fss_all(const DeploymentInstance& inst, const MetricConfig& cfg,
                                      EvalCounters* counters = nullptr) {
  std::vector<FssReport> out;
  out.reserve(inst.functions.size());
  for (const auto& f : inst.functions) out.push_back(fss_weighted(inst, f, cfg, counters));
  return out;
}

}  // namespace degen
