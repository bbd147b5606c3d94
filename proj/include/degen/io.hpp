#pragma once

// File formats: JSON instances, portfolios, configs, reports and sweep
// detail; CSV sweep tables; run manifests.

#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "degen/arq.hpp"
#include "degen/core_model.hpp"
#include "degen/disruption.hpp"
#include "degen/fss.hpp"
#include "degen/generator.hpp"
#include "degen/mldi.hpp"

namespace degen::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Text helpers

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": malformed JSON: " + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// Strict field access. Every error names the offending key path.

namespace detail {

template <typename T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config key '" + path + "' has the wrong type");
  }
}

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  if (!obj.is_object()) throw ValidationError("config key '" + prefix + "' must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ValidationError("unknown config key '" + (prefix.empty() ? k : prefix + "." + k) + "'");
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out, const std::string& prefix) {
  if (obj.contains(key)) out = get_as<T>(obj.at(key), prefix.empty() ? key : prefix + "." + key);
}

template <typename T>
T read_req(const json& obj, const char* key, const std::string& prefix) {
  const auto path = prefix.empty() ? std::string(key) : prefix + "." + key;
  if (!obj.is_object() || !obj.contains(key)) throw ValidationError("missing key '" + path + "'");
  return get_as<T>(obj.at(key), path);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instances

inline json to_json(const BinaryMatrix& b) {
  json rows = json::array();
  for (std::size_t r = 0; r < b.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < b.cols; ++c) row.push_back(static_cast<int>(b(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const DeploymentInstance& inst) {
  json j;
  j["format"] = "degen-instance";
  j["version"] = 1;
  j["functions"] = inst.functions;
  json layers = json::array();
  for (Layer l : inst.topology.layers) layers.push_back(layer_name(l));
  j["layers"] = layers;
  json els = json::array();
  for (const auto& e : inst.elements) {
    els.push_back({{"id", e.id},
                   {"layer", layer_name(e.layer)},
                   {"capacity", e.capacity},
                   {"load", e.load},
                   {"availability", e.availability},
                   {"mtbf", e.mtbf},
                   {"supports", e.supports},
                   {"signature", {{"categorical", e.signature.categorical}, {"numeric", e.signature.numeric}}}});
  }
  j["elements"] = els;
  j["b12"] = to_json(inst.topology.b12);
  j["b23"] = to_json(inst.topology.b23);
  json d = json::array();
  for (std::size_t r = 0; r < inst.dissimilarity.size(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < inst.dissimilarity.size(); ++c) row.push_back(inst.dissimilarity(r, c));
    d.push_back(std::move(row));
  }
  j["dissimilarity"] = d;
  return j;
}

namespace detail {

inline BinaryMatrix binary_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& key) {
  BinaryMatrix b(rows, cols);
  if (!j.is_array() || j.size() != rows)
    throw ValidationError("'" + key + "' must have " + std::to_string(rows) + " rows");
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols)
      throw ValidationError("'" + key + "' row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) {
      const int v = get_as<int>(row[c], key);
      if (v != 0 && v != 1) throw ValidationError("'" + key + "' entries must be 0 or 1");
      b.set(r, c, v == 1);
    }
  }
  return b;
}

}  // namespace detail

/// Rebuilds the dissimilarity cache; a stored matrix that disagrees with the
/// recomputation is rejected as stale.
namespace detail {

inline DeploymentInstance instance_from_json_unchecked(const json& j) {
  if (!j.is_object() || j.value("format", "") != "degen-instance")
    throw ValidationError("not an instance file (format must be 'degen-instance')");
  std::vector<Element> elements;
  const auto& els = j.at("elements");
  if (!els.is_array()) throw ValidationError("'elements' must be an array");
  for (std::size_t i = 0; i < els.size(); ++i) {
    const auto& ej = els[i];
    const std::string p = "elements[" + std::to_string(i) + "]";
    Element e;
    e.id = read_req<std::string>(ej, "id", p);
    e.layer = parse_layer(read_req<std::string>(ej, "layer", p));
    e.capacity = read_req<double>(ej, "capacity", p);
    e.load = read_req<double>(ej, "load", p);
    e.availability = read_req<double>(ej, "availability", p);
    e.mtbf = read_req<double>(ej, "mtbf", p);
    e.supports = read_req<std::vector<std::string>>(ej, "supports", p);
    const auto sig = ej.at("signature");
    e.signature.categorical = read_req<std::vector<int>>(sig, "categorical", p + ".signature");
    e.signature.numeric = read_req<std::vector<double>>(sig, "numeric", p + ".signature");
    elements.push_back(std::move(e));
  }
  auto count = [&](Layer l) {
    return static_cast<std::size_t>(
        std::count_if(elements.begin(), elements.end(), [l](const Element& e) { return e.layer == l; }));
  };
  LayerTopology topo;
  if (j.contains("layers"))
    for (const auto& s : read_req<std::vector<std::string>>(j, "layers", "")) topo.layers.push_back(parse_layer(s));
  topo.b12 = j.contains("b12") ? detail::binary_from_json(j.at("b12"), count(Layer::L2), count(Layer::L1), "b12")
                               : BinaryMatrix(count(Layer::L2), count(Layer::L1));
  topo.b23 = j.contains("b23") ? detail::binary_from_json(j.at("b23"), count(Layer::L3), count(Layer::L2), "b23")
                               : BinaryMatrix(count(Layer::L3), count(Layer::L2));
  auto inst = make_instance(std::move(elements), read_req<std::vector<std::string>>(j, "functions", ""), std::move(topo));

  if (j.contains("dissimilarity")) {
    const auto& d = j.at("dissimilarity");
    if (!d.is_array() || d.size() != inst.size()) throw ValidationError("'dissimilarity' dimension mismatch");
    for (std::size_t r = 0; r < inst.size(); ++r) {
      if (!d[r].is_array() || d[r].size() != inst.size()) throw ValidationError("'dissimilarity' dimension mismatch");
      for (std::size_t c = 0; c < inst.size(); ++c)
        if (std::abs(detail::get_as<double>(d[r][c], "dissimilarity") - inst.dissimilarity(r, c)) > 1e-9)
          throw ValidationError("'dissimilarity' does not match the element signatures (stale cache)");
    }
  }
  return inst;
}

}  // namespace detail

inline DeploymentInstance instance_from_json(const json& j) {
  try {
    return detail::instance_from_json_unchecked(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed instance: ") + e.what());
  }
}

inline DeploymentInstance load_instance(const std::string& path) {
  return instance_from_json(parse_json(read_text(path), path));
}

// ---------------------------------------------------------------------------
// Portfolios

struct NamedPortfolio {
  std::string name = "portfolio";
  Portfolio algorithms;
};

inline json to_json(const NamedPortfolio& p) {
  json algs = json::array();
  for (const auto& a : p.algorithms)
    algs.push_back({{"id", a.id}, {"performance", a.performance}, {"structure", a.structure}});
  return {{"format", "degen-portfolio"}, {"version", 1}, {"name", p.name}, {"algorithms", algs}};
}

namespace detail {

inline NamedPortfolio portfolio_from_json_unchecked(const json& j) {
  if (!j.is_object() || j.value("format", "") != "degen-portfolio")
    throw ValidationError("not a portfolio file (format must be 'degen-portfolio')");
  NamedPortfolio p;
  detail::read_opt(j, "name", p.name, "");
  const auto& algs = j.at("algorithms");
  if (!algs.is_array()) throw ValidationError("'algorithms' must be an array");
  for (std::size_t i = 0; i < algs.size(); ++i) {
    const std::string path = "algorithms[" + std::to_string(i) + "]";
    p.algorithms.push_back({read_req<std::string>(algs[i], "id", path),
                            read_req<std::vector<double>>(algs[i], "performance", path),
                            read_req<std::vector<double>>(algs[i], "structure", path)});
  }
  validate(p.algorithms);
  return p;
}

}  // namespace detail

inline NamedPortfolio portfolio_from_json(const json& j) {
  try {
    return detail::portfolio_from_json_unchecked(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed portfolio: ") + e.what());
  }
}

inline NamedPortfolio load_portfolio(const std::string& path) {
  return portfolio_from_json(parse_json(read_text(path), path));
}

// ---------------------------------------------------------------------------
// Configuration

/// Everything a run depends on. `explicit_m` / `explicit_k` record whether
/// the config pinned them; otherwise commands take them from the instance.
struct RunConfig {
  MetricConfig metric;
  SweepConfig sweep;
  GeneratorConfig generator;
  PortfolioConfig portfolio;
  bool explicit_m = false;
  bool explicit_k = false;
};

inline std::string target_kind(const SweepTarget& t) {
  if (std::holds_alternative<FssTarget>(t)) return "fss";
  if (std::holds_alternative<ArqTarget>(t)) return "arq";
  return "mldi";
}

inline json to_json(const RunConfig& c) {
  const auto& m = c.metric;
  const auto& s = c.sweep;
  const auto& g = c.generator;
  const auto& p = c.portfolio;
  json target = {{"kind", target_kind(s.target)}};
  if (const auto* f = std::get_if<FssTarget>(&s.target)) target["function"] = f->function_id;
  if (const auto* a = std::get_if<ArqTarget>(&s.target)) target["portfolio"] = a->portfolio;
  return {
      {"metric",
       {{"delta", m.delta},
        {"a_min", m.a_min},
        {"r_min", m.r_min},
        {"mission_time", m.mission_time},
        {"weight_mode", weight_mode_name(m.weight_mode)},
        {"epsilon", m.epsilon},
        {"sigma", m.sigma},
        {"m", m.m},
        {"k", m.k},
        {"gamma", m.gamma}}},
      {"sweep",
       {{"q_list", s.q_list},
        {"trials", s.trials},
        {"seed", s.seed},
        {"attack", attack_name(s.attack)},
        {"resample", s.resample},
        {"threads", s.threads},
        {"target", target}}},
      {"generator",
       {{"seed", g.seed},
        {"layer_sizes", g.layer_sizes},
        {"function_count", g.function_count},
        {"dependency_density", g.dependency_density},
        {"extra_support_probability", g.extra_support_probability},
        {"schema",
         {{"category_cardinalities", g.schema.category_cardinalities}, {"numeric_features", g.schema.numeric_features}}},
        {"laws",
         {{"capacity",
           {{"mu", g.laws.capacity.mu},
            {"sigma", g.laws.capacity.sigma},
            {"lower", g.laws.capacity.lower},
            {"upper", g.laws.capacity.upper}}},
          {"load", {{"alpha", g.laws.load.alpha}, {"beta", g.laws.load.beta}}},
          {"availability", {{"alpha", g.laws.availability.alpha}, {"beta", g.laws.availability.beta}}},
          {"mtbf", {{"mu", g.laws.mtbf.mu}, {"sigma", g.laws.mtbf.sigma}}}}}}},
      {"portfolio",
       {{"seed", p.seed},
        {"count", p.count},
        {"families", p.families},
        {"performance_centers", p.performance_centers},
        {"performance_dim", p.performance_dim},
        {"structure_dim", p.structure_dim},
        {"performance_jitter", p.performance_jitter},
        {"structure_noise", p.structure_noise}}},
  };
}

/// Overlays `j` onto `base`. Unknown keys and type mismatches raise
/// ValidationError naming the key.
inline RunConfig config_from_json(const json& j, RunConfig base = {}) {
  using detail::read_opt;
  using detail::reject_unknown;
  reject_unknown(j, {"metric", "sweep", "generator", "portfolio"}, "");
  RunConfig c = std::move(base);

  if (j.contains("metric")) {
    const auto& mj = j.at("metric");
    reject_unknown(mj, {"delta", "a_min", "r_min", "mission_time", "weight_mode", "epsilon", "sigma", "m", "k", "gamma"},
                   "metric");
    auto& m = c.metric;
    read_opt(mj, "delta", m.delta, "metric");
    read_opt(mj, "a_min", m.a_min, "metric");
    read_opt(mj, "r_min", m.r_min, "metric");
    read_opt(mj, "mission_time", m.mission_time, "metric");
    if (mj.contains("weight_mode"))
      m.weight_mode = parse_weight_mode(detail::get_as<std::string>(mj.at("weight_mode"), "metric.weight_mode"));
    read_opt(mj, "epsilon", m.epsilon, "metric");
    read_opt(mj, "sigma", m.sigma, "metric");
    if (mj.contains("m")) c.explicit_m = true;
    if (mj.contains("k")) c.explicit_k = true;
    read_opt(mj, "m", m.m, "metric");
    read_opt(mj, "k", m.k, "metric");
    read_opt(mj, "gamma", m.gamma, "metric");
  }
  if (j.contains("sweep")) {
    const auto& sj = j.at("sweep");
    reject_unknown(sj, {"q_list", "trials", "seed", "attack", "resample", "threads", "target"}, "sweep");
    auto& s = c.sweep;
    read_opt(sj, "q_list", s.q_list, "sweep");
    read_opt(sj, "trials", s.trials, "sweep");
    read_opt(sj, "seed", s.seed, "sweep");
    if (sj.contains("attack")) s.attack = parse_attack(detail::get_as<std::string>(sj.at("attack"), "sweep.attack"));
    read_opt(sj, "resample", s.resample, "sweep");
    read_opt(sj, "threads", s.threads, "sweep");
    if (sj.contains("target")) {
      const auto& tj = sj.at("target");
      reject_unknown(tj, {"kind", "function", "portfolio"}, "sweep.target");
      const auto kind = detail::read_req<std::string>(tj, "kind", "sweep.target");
      if (kind == "fss") s.target = FssTarget{tj.value("function", std::string("F1"))};
      else if (kind == "arq") s.target = ArqTarget{tj.value("portfolio", std::string("portfolio"))};
      else if (kind == "mldi") s.target = MldiTarget{};
      else throw ValidationError("config key 'sweep.target.kind' must be fss, arq or mldi");
    }
  }
  if (j.contains("generator")) {
    const auto& gj = j.at("generator");
    reject_unknown(gj, {"seed", "layer_sizes", "element_count", "function_count", "dependency_density",
                        "extra_support_probability", "schema", "laws"},
                   "generator");
    auto& g = c.generator;
    read_opt(gj, "seed", g.seed, "generator");
    read_opt(gj, "layer_sizes", g.layer_sizes, "generator");
    if (gj.contains("element_count") &&
        detail::get_as<std::size_t>(gj.at("element_count"), "generator.element_count") != g.element_count())
      throw ValidationError("config key 'generator.element_count' disagrees with the sum of generator.layer_sizes");
    read_opt(gj, "function_count", g.function_count, "generator");
    read_opt(gj, "dependency_density", g.dependency_density, "generator");
    read_opt(gj, "extra_support_probability", g.extra_support_probability, "generator");
    if (gj.contains("schema")) {
      const auto& sc = gj.at("schema");
      reject_unknown(sc, {"category_cardinalities", "numeric_features"}, "generator.schema");
      read_opt(sc, "category_cardinalities", g.schema.category_cardinalities, "generator.schema");
      read_opt(sc, "numeric_features", g.schema.numeric_features, "generator.schema");
    }
    if (gj.contains("laws")) {
      const auto& lj = gj.at("laws");
      reject_unknown(lj, {"capacity", "load", "availability", "mtbf"}, "generator.laws");
      if (lj.contains("capacity")) {
        const auto& x = lj.at("capacity");
        reject_unknown(x, {"mu", "sigma", "lower", "upper"}, "generator.laws.capacity");
        read_opt(x, "mu", g.laws.capacity.mu, "generator.laws.capacity");
        read_opt(x, "sigma", g.laws.capacity.sigma, "generator.laws.capacity");
        read_opt(x, "lower", g.laws.capacity.lower, "generator.laws.capacity");
        read_opt(x, "upper", g.laws.capacity.upper, "generator.laws.capacity");
      }
      for (const char* name : {"load", "availability"}) {
        if (!lj.contains(name)) continue;
        auto& law = std::string(name) == "load" ? g.laws.load : g.laws.availability;
        const auto& x = lj.at(name);
        const std::string pfx = std::string("generator.laws.") + name;
        reject_unknown(x, {"alpha", "beta"}, pfx);
        read_opt(x, "alpha", law.alpha, pfx);
        read_opt(x, "beta", law.beta, pfx);
      }
      if (lj.contains("mtbf")) {
        const auto& x = lj.at("mtbf");
        reject_unknown(x, {"mu", "sigma"}, "generator.laws.mtbf");
        read_opt(x, "mu", g.laws.mtbf.mu, "generator.laws.mtbf");
        read_opt(x, "sigma", g.laws.mtbf.sigma, "generator.laws.mtbf");
      }
    }
  }
  if (j.contains("portfolio")) {
    const auto& pj = j.at("portfolio");
    reject_unknown(pj, {"seed", "count", "families", "performance_centers", "performance_dim", "structure_dim",
                        "performance_jitter", "structure_noise"},
                   "portfolio");
    auto& p = c.portfolio;
    read_opt(pj, "seed", p.seed, "portfolio");
    read_opt(pj, "count", p.count, "portfolio");
    read_opt(pj, "families", p.families, "portfolio");
    read_opt(pj, "performance_centers", p.performance_centers, "portfolio");
    read_opt(pj, "performance_dim", p.performance_dim, "portfolio");
    read_opt(pj, "structure_dim", p.structure_dim, "portfolio");
    read_opt(pj, "performance_jitter", p.performance_jitter, "portfolio");
    read_opt(pj, "structure_noise", p.structure_noise, "portfolio");
  }
  return c;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  const auto j = parse_json(read_text(path), path);
  try {
    return config_from_json(j, std::move(base));
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed config: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Manifest

struct RunManifest {
  RunConfig config;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::string timestamp;  // ISO-8601 UTC; only written to the sidecar file
};

inline std::string config_digest(const RunConfig& c) { return hex64(fnv1a(to_json(c).dump())); }

/// The manifest as embedded in result files: no timestamp, so identical
/// configurations yield identical result bytes.
inline json embedded_manifest(const RunManifest& m, const std::string& manifest_file) {
  return {{"tool", "degen"},
          {"tool_version", m.tool_version},
          {"master_seed", m.master_seed},
          {"config_digest", config_digest(m.config)},
          {"config", to_json(m.config)},
          {"manifest_file", manifest_file}};
}

inline json to_json(const RunManifest& m) {
  json j = embedded_manifest(m, "");
  j.erase("manifest_file");
  j["timestamp"] = m.timestamp;
  return j;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const FssReport& r) {
  return {{"function", r.function_id},     {"n", r.n},
          {"baseline", r.baseline},        {"weighted", r.weighted},
          {"node_weights", r.node_weights}, {"admissible_count", r.admissible_count}};
}

inline json labeled_matrix(const SquareMatrix& m, const std::vector<std::string>& labels) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.n; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"labels", labels}, {"values", rows}};
}

inline json to_json(const ArqReport& r, const Portfolio& p) {
  std::vector<std::string> labels;
  for (const auto& a : p) labels.push_back(a.id);
  return {{"hard", r.hard},
          {"soft", r.soft},
          {"kernel", labeled_matrix(r.kernel, labels)},
          {"struct_dissim", labeled_matrix(r.struct_dissim, labels)}};
}

inline json to_json(const MldiReport& r) {
  json layers = json::array();
  for (const auto& d : r.per_layer)
    layers.push_back({{"layer", layer_name(d.layer)},
                      {"tau", d.tau},
                      {"entropy_raw", d.entropy_raw},
                      {"entropy_norm", d.entropy_norm},
                      {"coverage", d.coverage},
                      {"layer_size", d.layer_size},
                      {"active", d.active},
                      {"distinct", d.distinct}});
  return {{"baseline", r.baseline}, {"enhanced", r.enhanced}, {"gamma", r.gamma}, {"per_layer", layers}};
}

inline json to_json(const EvalCounters& c) {
  return {{"dissimilarity_evaluations", c.dissimilarity_evaluations},
          {"summand_visits", c.summand_visits},
          {"kernel_evaluations", c.kernel_evaluations},
          {"layer_pair_checks", c.layer_pair_checks},
          {"scoring_pair_visits", c.scoring_pair_visits}};
}

inline json to_json(const SweepResult& r) {
  json recs = json::array();
  for (const auto& t : r.records)
    recs.push_back({{"q", t.q},
                    {"trial", t.trial},
                    {"candidates", t.candidates},
                    {"removed", t.removed},
                    {"survivors", t.survivors},
                    {"flagged", t.flagged},
                    {"removed_ids", t.removed_ids},
                    {"values", t.values}});
  json aggs = json::array();
  for (const auto& a : r.aggregates)
    aggs.push_back({{"metric", a.metric}, {"q", a.q}, {"mean", a.mean}, {"std", a.std}, {"trials", a.trials}});
  return {{"target", r.target}, {"records", recs}, {"aggregates", aggs}, {"counters", to_json(r.counters)}};
}

/// Long-form heatmap table: row,col,value.
inline std::string matrix_csv(const SquareMatrix& m, const std::vector<std::string>& labels) {
  std::string out = "row,col,value\n";
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) out += labels[i] + "," + labels[j] + "," + format_double(m(i, j)) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Sweep CSV

inline constexpr const char* kSweepCsvHeader = "metric,target,q,mean,std,trials";

/// One row per (q, metric) in aggregate order. The leading comment line
/// references the manifest sidecar.
inline std::string sweep_csv(const SweepResult& r, const std::string& manifest_ref) {
  std::string out = "# degen sweep; manifest=" + manifest_ref + "\n";
  out += kSweepCsvHeader;
  out += "\n";
  for (const auto& a : r.aggregates)
    out += a.metric + "," + r.target + "," + format_double(a.q) + "," + format_double(a.mean) + "," +
           format_double(a.std) + "," + std::to_string(a.trials) + "\n";
  return out;
}

struct CsvTable {
  std::string header;
  std::vector<std::string> rows;  // raw lines, verbatim
};

inline CsvTable parse_sweep_csv(const std::string& text, const std::string& origin) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (t.header.empty()) {
      t.header = line;
      if (t.header != kSweepCsvHeader) throw ValidationError(origin + ": unexpected CSV header '" + line + "'");
      continue;
    }
    t.rows.push_back(line);
  }
  if (t.header.empty()) throw ValidationError(origin + ": missing CSV header");
  return t;
}

/// Concatenates sweep tables under a single header. Rows are copied verbatim.
inline std::string merge_sweep_csv(const std::vector<std::pair<std::string, std::string>>& named_texts) {
  std::string sources;
  std::string body;
  for (const auto& [name, text] : named_texts) {
    const auto t = parse_sweep_csv(text, name);
    sources += (sources.empty() ? "" : ",") + name;
    for (const auto& r : t.rows) body += r + "\n";
  }
  return "# degen report; sources=" + sources + "\n" + kSweepCsvHeader + "\n" + body;
}

}  // namespace degen::io
