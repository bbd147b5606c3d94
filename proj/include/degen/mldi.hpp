#pragma once

// Multi-Layer Degeneracy Index: upward failure propagation through the
// dependency matrices, the per-layer admissible-distinct ratio, and the
// normalized functional entropy of each layer.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "degen/core_model.hpp"
#include "degen/fss.hpp"

namespace degen {

struct LayerDiagnostics {
  Layer layer = Layer::L1;
  double tau = 0.0;
  double entropy_raw = 0.0;
  double entropy_norm = 0.0;
  std::map<std::string, double> coverage;  // function id -> share of active layer elements supporting it
  std::size_t layer_size = 0;
  std::size_t active = 0;
  std::size_t distinct = 0;
};

struct MldiReport {
  double baseline = 0.0;
  double enhanced = 0.0;
  double gamma = 0.0;  // echoed from the config
  std::vector<LayerDiagnostics> per_layer;
};

/// Propagation from per-element direct-failure flags (indexed like
/// inst.elements). An L2/L3 element with a non-empty dependency row is active
/// iff it did not fail directly and at least one upstream element is active.
inline PropagationState propagate_failures(const DeploymentInstance& inst, const std::vector<bool>& failed) {
  if (failed.size() != inst.size()) throw ValidationError("failure vector length does not match element count");
  PropagationState st;
  st.active.assign(inst.size(), 0);
  for (std::size_t i = 0; i < inst.size(); ++i) st.active[i] = failed[i] ? 0 : 1;

  auto sweep = [&](Layer lower, Layer upper, const BinaryMatrix& b) {
    const auto lo = inst.layer_members(lower);
    const auto up = inst.layer_members(upper);
    for (std::size_t r = 0; r < up.size(); ++r) {
      if (!st.active[up[r]] || b.row_empty(r)) continue;
      bool any = false;
      for (std::size_t c = 0; c < lo.size() && !any; ++c) any = b(r, c) && st.active[lo[c]];
      st.active[up[r]] = any ? 1 : 0;
    }
  };
  sweep(Layer::L1, Layer::L2, inst.topology.b12);
  sweep(Layer::L2, Layer::L3, inst.topology.b23);
  return st;
}

/// Id-based form. Each failed id must belong to the layer of its set.
inline PropagationState propagate_failures(const DeploymentInstance& inst, const std::set<std::string>& failed_l1,
                                           const std::set<std::string>& failed_l2,
                                           const std::set<std::string>& failed_l3) {
  std::vector<bool> failed(inst.size(), false);
  auto mark = [&](const std::set<std::string>& ids, Layer layer) {
    for (const auto& id : ids) {
      const auto idx = inst.index_of(id);
      if (!idx) throw ValidationError("unknown element id '" + id + "'");
      if (inst.elements[*idx].layer != layer)
        throw ValidationError("element '" + id + "' is not in layer " + layer_name(layer));
      failed[*idx] = true;
    }
  };
  mark(failed_l1, Layer::L1);
  mark(failed_l2, Layer::L2);
  mark(failed_l3, Layer::L3);
  return propagate_failures(inst, failed);
}

inline PropagationState all_active(const DeploymentInstance& inst) {
  return PropagationState{std::vector<std::uint8_t>(inst.size(), 1)};
}

/// Greedy D_l: active layer elements with positive Joint weight, scanned in
/// ascending id order, each kept iff D > delta against everything kept so far.
/// Returns instance indices.
inline std::vector<std::size_t> admissible_distinct_set(const DeploymentInstance& inst, Layer layer,
                                                        const PropagationState& state, const MetricConfig& cfg,
                                                        EvalCounters* counters = nullptr) {
  auto members = inst.layer_members(layer);
  std::sort(members.begin(), members.end(),
            [&](std::size_t a, std::size_t b) { return natural_less(inst.elements[a].id, inst.elements[b].id); });
  std::vector<std::size_t> kept;
  for (auto i : members) {
    if (!state.is_active(i)) continue;
    if (!(node_weight(inst.elements[i], WeightMode::Joint, cfg) > 0.0)) continue;
    bool distinct = true;
    for (auto j : kept) {
      if (counters) ++counters->layer_pair_checks;
      if (!(inst.dissimilarity(i, j) > cfg.delta)) {
        distinct = false;
        break;
      }
    }
    if (distinct) kept.push_back(i);
  }
  return kept;
}

struct LayerEntropy {
  double raw = 0.0;
  double normalized = 0.0;
};

/// Shannon entropy (natural log) of active support counts over `functions`,
/// renormalized into a distribution; normalized by log m.
inline LayerEntropy layer_entropy(const DeploymentInstance& inst, Layer layer, const PropagationState& state,
                                  const std::vector<std::string>& functions) {
  const std::size_t m = functions.size();
  std::vector<double> counts(m, 0.0);
  double total = 0.0;
  for (auto i : inst.layer_members(layer)) {
    if (!state.is_active(i)) continue;
    for (std::size_t f = 0; f < m; ++f) {
      if (inst.elements[i].supports_function(functions[f])) {
        counts[f] += 1.0;
        total += 1.0;
      }
    }
  }
  LayerEntropy h;
  if (total == 0.0) return h;
  for (double c : counts) {
    if (c == 0.0) continue;
    const double p = c / total;
    h.raw -= p * std::log(p);
  }
  h.normalized = m >= 2 ? h.raw / std::log(static_cast<double>(m)) : 0.0;
  return h;
}

inline LayerDiagnostics layer_diagnostics(const DeploymentInstance& inst, Layer layer, const PropagationState& state,
                                          const MetricConfig& cfg, EvalCounters* counters = nullptr) {
  LayerDiagnostics diag;
  diag.layer = layer;
  const auto members = inst.layer_members(layer);
  if (members.empty()) throw ValidationError("layer " + layer_name(layer) + " has no elements");
  diag.layer_size = members.size();
  for (auto i : members) diag.active += state.is_active(i) ? 1 : 0;
  diag.distinct = admissible_distinct_set(inst, layer, state, cfg, counters).size();
  diag.tau = static_cast<double>(diag.distinct) / static_cast<double>(diag.layer_size);
  const auto h = layer_entropy(inst, layer, state, inst.functions);
  diag.entropy_raw = h.raw;
  diag.entropy_norm = h.normalized;
  for (const auto& f : inst.functions) {
    std::size_t c = 0;
    for (auto i : members)
      if (state.is_active(i) && inst.elements[i].supports_function(f)) ++c;
    diag.coverage[f] = diag.active ? static_cast<double>(c) / static_cast<double>(diag.active) : 0.0;
  }
  return diag;
}

namespace detail {

inline void check_mldi_shape(const DeploymentInstance& inst, const MetricConfig& cfg) {
  validate(cfg);
  if (static_cast<std::size_t>(cfg.k) != inst.topology.layers.size())
    throw ValidationError("k = " + std::to_string(cfg.k) + " but the instance declares " +
                          std::to_string(inst.topology.layers.size()) + " layers");
  if (static_cast<std::size_t>(cfg.m) != inst.functions.size())
    throw ValidationError("m = " + std::to_string(cfg.m) + " but the instance catalogs " +
                          std::to_string(inst.functions.size()) + " functions");
  if (inst.topology.layers.empty()) throw ValidationError("instance declares no layers");
}

}  // namespace detail

/// Per-layer diagnostics plus both indices.
inline MldiReport mldi_report(const DeploymentInstance& inst, const PropagationState& state, const MetricConfig& cfg,
                              EvalCounters* counters = nullptr) {
  detail::check_mldi_shape(inst, cfg);
  if (state.active.size() != inst.size()) throw ValidationError("propagation state does not cover every element");
  MldiReport rep;
  rep.gamma = cfg.gamma;
  for (Layer l : inst.topology.layers) rep.per_layer.push_back(layer_diagnostics(inst, l, state, cfg, counters));
  const double k = static_cast<double>(rep.per_layer.size());
  for (const auto& d : rep.per_layer) {
    rep.baseline += d.tau;
    rep.enhanced += d.entropy_norm;
  }
  rep.baseline /= k;
  rep.enhanced /= k;
  return rep;
}

inline double mldi_baseline(const DeploymentInstance& inst, const PropagationState& state, const MetricConfig& cfg) {
  return mldi_report(inst, state, cfg).baseline;
}

inline double mldi_enhanced(const DeploymentInstance& inst, const PropagationState& state, const MetricConfig& cfg) {
  return mldi_report(inst, state, cfg).enhanced;
}

}  // namespace degen
