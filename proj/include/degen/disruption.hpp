#pragma once

// Targeted-removal sweeps: score candidates, rank, remove the top-q fraction,
// re-evaluate the target metric, and aggregate per q over trials.

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "degen/arq.hpp"
#include "degen/core_model.hpp"
#include "degen/fss.hpp"
#include "degen/generator.hpp"
#include "degen/mldi.hpp"
#include "degen/random.hpp"

namespace degen {

struct FssTarget {
  std::string function_id;
};
struct ArqTarget {
  std::string portfolio;  // label only
};
struct MldiTarget {};

using SweepTarget = std::variant<FssTarget, ArqTarget, MldiTarget>;

inline std::string target_label(const SweepTarget& t) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FssTarget>) return "FSS(" + v.function_id + ")";
        else if constexpr (std::is_same_v<T, ArqTarget>) return "ARQ(" + v.portfolio + ")";
        else return "MLDI";
      },
      t);
}

enum class AttackKind : std::uint8_t { Targeted, Random };

inline std::string attack_name(AttackKind a) { return a == AttackKind::Targeted ? "Targeted" : "Random"; }

inline AttackKind parse_attack(std::string_view s) {
  if (s == "Targeted") return AttackKind::Targeted;
  if (s == "Random") return AttackKind::Random;
  throw ValidationError("unknown attack '" + std::string(s) + "' (expected Targeted or Random)");
}

struct SweepConfig {
  std::vector<double> q_list{0.0, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50};
  int trials = 10;
  std::uint64_t seed = 1;
  SweepTarget target = MldiTarget{};
  AttackKind attack = AttackKind::Targeted;
  // Per-trial redraw of availability/MTBF (instances) or regeneration
  // (portfolios). Off means every trial sees the input unchanged.
  bool resample = true;
  int threads = 1;
};

inline void validate(const SweepConfig& c) {
  if (c.q_list.empty()) throw ValidationError("q_list must not be empty");
  for (std::size_t i = 0; i < c.q_list.size(); ++i) {
    if (!(c.q_list[i] >= 0.0 && c.q_list[i] < 1.0)) throw ValidationError("q_list entries must lie in [0,1)");
    if (i > 0 && !(c.q_list[i] > c.q_list[i - 1])) throw ValidationError("q_list must be strictly increasing");
  }
  if (c.trials < 1) throw ValidationError("trials must be >= 1");
  if (c.threads < 1) throw ValidationError("threads must be >= 1");
}

struct TrialRecord {
  double q = 0.0;
  int trial = 0;
  std::size_t candidates = 0;
  std::size_t removed = 0;
  std::size_t survivors = 0;
  bool flagged = false;  // nothing left to evaluate; values reported as 0
  std::vector<std::string> removed_ids;
  std::map<std::string, double> values;
};

struct SweepAggregate {
  std::string metric;
  double q = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single trial
  int trials = 0;
};

struct SweepResult {
  std::string target;
  std::vector<TrialRecord> records;  // ordered by (q index, trial)
  std::vector<SweepAggregate> aggregates;
  EvalCounters counters;
};

// ---------------------------------------------------------------------------
// Importance scores

/// FSS: each realization's own share of the weighted sum, i.e.
/// s_i = sum_{j != i} 1{D_ij > delta} W_ij w_i w_j over E_f.
inline std::map<std::string, double> fss_importance(const DeploymentInstance& inst, std::string_view function_id,
                                                    const MetricConfig& cfg, EvalCounters* counters = nullptr) {
  const auto members = inst.realizations(function_id);
  std::vector<double> w(members.size());
  for (std::size_t a = 0; a < members.size(); ++a) w[a] = node_weight(inst.elements[members[a]], cfg.weight_mode, cfg);
  std::vector<double> s(members.size(), 0.0);
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const auto i = members[a], j = members[b];
      const double dij = inst.dissimilarity(i, j);
      if (!(dij > cfg.delta)) continue;
      const double c = pair_weight(inst.elements[i], inst.elements[j], dij) * w[a] * w[b];
      s[a] += c;
      s[b] += c;
    }
  }
  if (counters && members.size() > 1) counters->scoring_pair_visits += members.size() * (members.size() - 1) / 2;
  std::map<std::string, double> out;
  for (std::size_t a = 0; a < members.size(); ++a) out[inst.elements[members[a]].id] = s[a];
  return out;
}

/// MLDI: number of elements reachable upward through B12/B23 plus the
/// element's own function-support count.
inline std::map<std::string, double> mldi_importance(const DeploymentInstance& inst) {
  const auto l1 = inst.layer_members(Layer::L1);
  const auto l2 = inst.layer_members(Layer::L2);
  const auto l3 = inst.layer_members(Layer::L3);
  const auto& b12 = inst.topology.b12;
  const auto& b23 = inst.topology.b23;

  auto l3_reach = [&](std::size_t c2, std::vector<std::uint8_t>& hit) {
    for (std::size_t r = 0; r < l3.size(); ++r)
      if (b23(r, c2)) hit[r] = 1;
  };
  std::map<std::string, double> out;
  for (std::size_t c = 0; c < l1.size(); ++c) {
    std::size_t reach = 0;
    std::vector<std::uint8_t> hit3(l3.size(), 0);
    for (std::size_t r = 0; r < l2.size(); ++r) {
      if (!b12(r, c)) continue;
      ++reach;
      l3_reach(r, hit3);
    }
    reach += static_cast<std::size_t>(std::count(hit3.begin(), hit3.end(), std::uint8_t{1}));
    const auto& e = inst.elements[l1[c]];
    out[e.id] = static_cast<double>(reach + e.supports.size());
  }
  for (std::size_t c = 0; c < l2.size(); ++c) {
    std::vector<std::uint8_t> hit3(l3.size(), 0);
    l3_reach(c, hit3);
    const auto reach = static_cast<std::size_t>(std::count(hit3.begin(), hit3.end(), std::uint8_t{1}));
    const auto& e = inst.elements[l2[c]];
    out[e.id] = static_cast<double>(reach + e.supports.size());
  }
  for (auto i : l3) out[inst.elements[i].id] = static_cast<double>(inst.elements[i].supports.size());
  return out;
}

/// Importance scores for an instance target (FSS or MLDI).
inline std::map<std::string, double> importance_scores(const SweepTarget& target, const DeploymentInstance& inst,
                                                       const MetricConfig& cfg, EvalCounters* counters = nullptr) {
  if (const auto* f = std::get_if<FssTarget>(&target)) return fss_importance(inst, f->function_id, cfg, counters);
  if (std::holds_alternative<MldiTarget>(target)) return mldi_importance(inst);
  throw ValidationError("ARQ targets are scored on a portfolio, not an instance");
}

/// Importance scores for an ARQ target: kernel centrality.
inline std::map<std::string, double> importance_scores(const Portfolio& portfolio, const MetricConfig& cfg,
                                                       EvalCounters* counters = nullptr) {
  EvalCounters scratch;
  auto out = kernel_centrality(portfolio, cfg.sigma, &scratch);
  if (counters) counters->scoring_pair_visits += scratch.kernel_evaluations;
  return out;
}

// ---------------------------------------------------------------------------
// Removal

/// Round-half-up: floor(q n + 1/2).
inline std::size_t removal_count(std::size_t n, double q) {
  return static_cast<std::size_t>(std::floor(q * static_cast<double>(n) + 0.5));
}

struct RemovalPlan {
  std::vector<std::string> survivors;  // input order
  std::vector<std::string> removed;    // removal order
};

/// Removes the top floor(q n + 1/2) ids by descending score; ties go to the
/// smaller id first. Ids missing from `scores` count as 0.
inline RemovalPlan rank_and_remove(const std::vector<std::string>& ids, const std::map<std::string, double>& scores,
                                   double q) {
  if (!(q >= 0.0 && q < 1.0)) throw ValidationError("removal fraction must lie in [0,1)");
  auto score = [&](const std::string& id) {
    const auto it = scores.find(id);
    return it == scores.end() ? 0.0 : it->second;
  };
  std::vector<std::string> order = ids;
  std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    const double sa = score(a), sb = score(b);
    if (sa != sb) return sa > sb;
    return natural_less(a, b);
  });
  const std::size_t r = std::min(removal_count(ids.size(), q), ids.size());
  RemovalPlan plan;
  plan.removed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r));
  for (const auto& id : ids)
    if (std::find(plan.removed.begin(), plan.removed.end(), id) == plan.removed.end()) plan.survivors.push_back(id);
  return plan;
}

/// Uniformly random removal of the same count, for the diagnostic baseline.
inline RemovalPlan random_remove(const std::vector<std::string>& ids, double q, Rng& rng) {
  if (!(q >= 0.0 && q < 1.0)) throw ValidationError("removal fraction must lie in [0,1)");
  std::vector<std::string> order = ids;
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t r = std::min(removal_count(ids.size(), q), ids.size());
  RemovalPlan plan;
  plan.removed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r));
  for (const auto& id : ids)
    if (std::find(plan.removed.begin(), plan.removed.end(), id) == plan.removed.end()) plan.survivors.push_back(id);
  return plan;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace detail {

inline std::vector<SweepAggregate> aggregate(const std::vector<TrialRecord>& records, const std::vector<double>& q_list) {
  std::vector<SweepAggregate> out;
  for (double q : q_list) {
    std::map<std::string, std::vector<double>> by_metric;
    for (const auto& r : records)
      if (r.q == q)
        for (const auto& [k, v] : r.values) by_metric[k].push_back(v);
    for (const auto& [metric, vals] : by_metric) {
      SweepAggregate a;
      a.metric = metric;
      a.q = q;
      a.trials = static_cast<int>(vals.size());
      for (double v : vals) a.mean += v;
      a.mean /= static_cast<double>(vals.size());
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - a.mean) * (v - a.mean);
        a.std = std::sqrt(ss / static_cast<double>(vals.size() - 1));
      }
      out.push_back(std::move(a));
    }
  }
  return out;
}

// Runs `trial_fn(t, records_out, counters_out)` for every trial, possibly on
// several threads, and stitches results back in (q, trial) order.
template <typename TrialFn>
SweepResult run_trials(const SweepConfig& sc, TrialFn&& trial_fn) {
  const auto trials = static_cast<std::size_t>(sc.trials);
  std::vector<std::vector<TrialRecord>> per_trial(trials);
  std::vector<EvalCounters> per_counters(trials);
  std::vector<std::exception_ptr> errors(trials);

  auto work = [&](std::size_t t) {
    try {
      trial_fn(static_cast<int>(t), per_trial[t], per_counters[t]);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(sc.threads), trials);
  if (threads <= 1) {
    for (std::size_t t = 0; t < trials; ++t) work(t);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < trials; t += threads) work(t);
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepResult res;
  res.target = target_label(sc.target);
  for (std::size_t qi = 0; qi < sc.q_list.size(); ++qi)
    for (std::size_t t = 0; t < trials; ++t) res.records.push_back(per_trial[t][qi]);
  for (const auto& c : per_counters) res.counters += c;
  res.aggregates = aggregate(res.records, sc.q_list);
  return res;
}

inline RemovalPlan plan_removal(const SweepConfig& sc, const std::vector<std::string>& ids,
                                const std::map<std::string, double>& scores, double q, int trial) {
  if (sc.attack == AttackKind::Targeted) return rank_and_remove(ids, scores, q);
  // same shuffle stream per (trial, q) regardless of thread layout
  Rng rng(derive_seed(sc.seed, "trial/random-attack", static_cast<std::uint64_t>(trial) * 1000003ULL +
                                                          static_cast<std::uint64_t>(std::llround(q * 1e6))));
  return random_remove(ids, q, rng);
}

}  // namespace detail

/// The instance a given trial evaluates: the input itself, or the input with
/// availability/MTBF redrawn from `laws` under a trial-derived seed.
inline DeploymentInstance trial_instance(const DeploymentInstance& inst, const SweepConfig& sc,
                                         const std::optional<OperationalLaws>& laws, int trial) {
  if (!sc.resample || !laws) return inst;
  return resample_operational(inst, *laws, derive_seed(sc.seed, "trial/operational", static_cast<std::uint64_t>(trial)));
}

/// FSS or MLDI sweep over a deployment instance.
inline SweepResult run_sweep(const DeploymentInstance& inst, const SweepConfig& sc, const MetricConfig& cfg,
                             const std::optional<OperationalLaws>& laws = std::nullopt) {
  validate(sc);
  validate(cfg);
  if (std::holds_alternative<ArqTarget>(sc.target)) throw ValidationError("ARQ sweeps take a portfolio");
  if (const auto* f = std::get_if<FssTarget>(&sc.target); f && !inst.has_function(f->function_id))
    throw ValidationError("unknown function id '" + f->function_id + "'");
  if (std::holds_alternative<MldiTarget>(sc.target)) detail::check_mldi_shape(inst, cfg);

  return detail::run_trials(sc, [&](int t, std::vector<TrialRecord>& out, EvalCounters& counters) {
    const auto ti = trial_instance(inst, sc, laws, t);
    const auto scores = importance_scores(sc.target, ti, cfg, &counters);

    std::vector<std::size_t> candidates;
    if (const auto* f = std::get_if<FssTarget>(&sc.target)) candidates = ti.realizations(f->function_id);
    else {
      candidates.resize(ti.size());
      std::iota(candidates.begin(), candidates.end(), 0);
    }
    std::vector<std::string> ids;
    for (auto i : candidates) ids.push_back(ti.elements[i].id);

    for (double q : sc.q_list) {
      const auto plan = detail::plan_removal(sc, ids, scores, q, t);
      TrialRecord rec;
      rec.q = q;
      rec.trial = t;
      rec.candidates = ids.size();
      rec.removed = plan.removed.size();
      rec.survivors = plan.survivors.size();
      rec.removed_ids = plan.removed;

      if (const auto* f = std::get_if<FssTarget>(&sc.target)) {
        std::vector<std::size_t> keep;
        for (const auto& id : plan.survivors) keep.push_back(*ti.index_of(id));
        std::sort(keep.begin(), keep.end());
        const auto sub = subset(ti, keep, &counters);
        const auto rep = fss_weighted(sub, f->function_id, cfg, &counters);
        rec.flagged = keep.empty();
        rec.values["fss_baseline"] = rep.baseline;
        rec.values["fss_weighted"] = rep.weighted;
      } else {
        std::vector<bool> failed(ti.size(), false);
        for (const auto& id : plan.removed) failed[*ti.index_of(id)] = true;
        const auto state = propagate_failures(ti, failed);
        const auto rep = mldi_report(ti, state, cfg, &counters);
        rec.flagged = state.active_count() == 0;
        rec.values["mldi"] = rep.baseline;
        rec.values["mldi_enhanced"] = rep.enhanced;
        for (const auto& d : rep.per_layer) {
          const auto ln = layer_name(d.layer);
          rec.values["tau_" + ln] = d.tau;
          rec.values["entropy_" + ln] = d.entropy_norm;
          for (const auto& [fid, cov] : d.coverage) rec.values["coverage_" + ln + "_" + fid] = cov;
        }
      }
      out.push_back(std::move(rec));
    }
  });
}

/// ARQ sweep over a portfolio. With `regenerate` set and resampling on, each
/// trial evaluates a fresh portfolio generated under a trial-derived seed.
inline SweepResult run_sweep(const Portfolio& portfolio, const SweepConfig& sc, const MetricConfig& cfg,
                             const std::optional<PortfolioConfig>& regenerate = std::nullopt) {
  validate(sc);
  validate(cfg);
  validate(portfolio);
  if (!std::holds_alternative<ArqTarget>(sc.target)) throw ValidationError("portfolio sweeps need an ARQ target");

  return detail::run_trials(sc, [&](int t, std::vector<TrialRecord>& out, EvalCounters& counters) {
    Portfolio tp = portfolio;
    if (sc.resample && regenerate) {
      auto pc = *regenerate;
      pc.seed = derive_seed(sc.seed, "trial/portfolio", static_cast<std::uint64_t>(t));
      tp = generate_portfolio(pc);
    }
    const auto scores = importance_scores(tp, cfg, &counters);
    std::vector<std::string> ids;
    for (const auto& a : tp) ids.push_back(a.id);

    for (double q : sc.q_list) {
      const auto plan = detail::plan_removal(sc, ids, scores, q, t);
      Portfolio survivors;
      for (const auto& a : tp)
        if (std::find(plan.survivors.begin(), plan.survivors.end(), a.id) != plan.survivors.end()) survivors.push_back(a);
      const auto rep = arq_report(survivors, cfg.epsilon, cfg.delta, cfg.sigma, &counters);
      TrialRecord rec;
      rec.q = q;
      rec.trial = t;
      rec.candidates = ids.size();
      rec.removed = plan.removed.size();
      rec.survivors = survivors.size();
      rec.removed_ids = plan.removed;
      rec.flagged = survivors.empty();
      rec.values["arq_soft"] = rep.soft;
      rec.values["arq_hard"] = rep.hard;
      out.push_back(std::move(rec));
    }
  });
}

}  // namespace degen
