#pragma once

// Synthetic deployment instances and algorithm portfolios, plus the small
// hand-shaped fixtures used by the golden tests.

#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "degen/arq.hpp"
#include "degen/core_model.hpp"
#include "degen/random.hpp"

namespace degen {

/// Operational laws. Capacities are normalized by the largest draw after
/// sampling; loads are a beta fraction of the element's capacity.
struct OperationalLaws {
  TruncatedLogNormalLaw capacity{-1.0, 0.5, 0.05, 1.0};
  BetaLaw load{2.0, 5.0};
  BetaLaw availability{9.0, 1.0};
  LogNormalLaw mtbf{std::log(500.0), 0.6};

  bool operator==(const OperationalLaws&) const = default;
};

struct SignatureSchema {
  std::vector<int> category_cardinalities{3, 4, 3};  // placement domain, lineage, software stack
  int numeric_features = 2;

  bool operator==(const SignatureSchema&) const = default;
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::array<std::size_t, 3> layer_sizes{3, 2, 2};
  int function_count = 3;
  OperationalLaws laws;
  SignatureSchema schema;
  double dependency_density = 0.5;
  double extra_support_probability = 0.2;

  std::size_t element_count() const { return layer_sizes[0] + layer_sizes[1] + layer_sizes[2]; }
  bool operator==(const GeneratorConfig&) const = default;
};

inline void validate(const OperationalLaws& laws) {
  validate(laws.capacity, "capacity");
  if (laws.capacity.upper > 1.0) throw ValidationError("capacity: truncation upper bound must be <= 1");
  validate(laws.load, "load");
  validate(laws.availability, "availability");
  validate(laws.mtbf, "mtbf");
}

inline void validate(const GeneratorConfig& c) {
  for (auto s : c.layer_sizes)
    if (s < 1) throw ValidationError("layer_sizes: every layer needs at least one element");
  if (c.function_count < 1) throw ValidationError("function_count must be >= 1");
  if (c.element_count() < static_cast<std::size_t>(c.function_count))
    throw ValidationError("infeasible support assignment: " + std::to_string(c.element_count()) + " elements for " +
                          std::to_string(c.function_count) + " functions");
  validate(c.laws);
  for (int card : c.schema.category_cardinalities)
    if (card < 1) throw ValidationError("schema: category cardinalities must be >= 1");
  if (c.schema.numeric_features < 0) throw ValidationError("schema: numeric_features must be >= 0");
  if (!(c.dependency_density > 0.0 && c.dependency_density <= 1.0))
    throw ValidationError("dependency_density must lie in (0,1]");
  if (!(c.extra_support_probability >= 0.0 && c.extra_support_probability <= 1.0))
    throw ValidationError("extra_support_probability must lie in [0,1]");
}

inline std::vector<std::string> function_catalog(int m) {
  std::vector<std::string> out;
  for (int f = 1; f <= m; ++f) out.push_back("F" + std::to_string(f));
  return out;
}

/// Redraws capacity (then normalizes by the max) and loads for all elements.
inline void draw_capacity_and_load(std::vector<Element>& elements, const OperationalLaws& laws, Rng& rng) {
  double max_cap = 0.0;
  for (auto& e : elements) {
    e.capacity = sample(laws.capacity, rng);
    max_cap = std::max(max_cap, e.capacity);
  }
  for (auto& e : elements) {
    e.capacity /= max_cap;
    e.load = sample(laws.load, rng) * e.capacity;
  }
}

inline void draw_availability_and_mtbf(std::vector<Element>& elements, const OperationalLaws& laws, Rng& rng) {
  for (auto& e : elements) {
    e.availability = sample(laws.availability, rng);
    e.mtbf = sample(laws.mtbf, rng);
  }
}

/// Same instance with availability and MTBF redrawn from `laws`. Structure,
/// capacities, loads and the dissimilarity cache are untouched.
inline DeploymentInstance resample_operational(const DeploymentInstance& inst, const OperationalLaws& laws,
                                               std::uint64_t seed) {
  validate(laws);
  Rng rng(seed);
  DeploymentInstance out = inst;
  draw_availability_and_mtbf(out.elements, laws, rng);
  return out;
}

namespace detail {

inline BinaryMatrix random_dependencies(std::size_t rows, std::size_t cols, double density, Rng& rng) {
  BinaryMatrix b(rows, cols);
  std::bernoulli_distribution coin(density);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) b.set(r, c, coin(rng));
    if (b.row_empty(r)) b.set(r, uniform_index(rng, cols), true);
  }
  return b;
}

}  // namespace detail

inline DeploymentInstance generate_instance(const GeneratorConfig& cfg, EvalCounters* counters = nullptr) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, "instance"));
  const std::size_t n = cfg.element_count();
  const auto functions = function_catalog(cfg.function_count);

  std::vector<Element> elements(n);
  std::size_t idx = 0;
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t i = 0; i < cfg.layer_sizes[l]; ++i, ++idx) {
      elements[idx].id = "e" + std::to_string(idx + 1);
      elements[idx].layer = kAllLayers[l];
    }

  draw_capacity_and_load(elements, cfg.laws, rng);
  draw_availability_and_mtbf(elements, cfg.laws, rng);

  for (auto& e : elements) {
    for (int card : cfg.schema.category_cardinalities)
      e.signature.categorical.push_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(card))));
    for (int f = 0; f < cfg.schema.numeric_features; ++f) e.signature.numeric.push_back(uniform01(rng));
  }

  // Round-robin over a random permutation: each function gets floor(n/m)
  // realizations, then optional extra supports.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto m = static_cast<std::size_t>(cfg.function_count);
  for (std::size_t i = 0; i < n; ++i) elements[perm[i]].supports.push_back(functions[i % m]);
  std::bernoulli_distribution extra(cfg.extra_support_probability);
  for (auto& e : elements)
    for (const auto& f : functions)
      if (!e.supports_function(f) && extra(rng)) e.supports.push_back(f);

  LayerTopology topo;
  topo.layers = {Layer::L1, Layer::L2, Layer::L3};
  topo.b12 = detail::random_dependencies(cfg.layer_sizes[1], cfg.layer_sizes[0], cfg.dependency_density, rng);
  topo.b23 = detail::random_dependencies(cfg.layer_sizes[2], cfg.layer_sizes[1], cfg.dependency_density, rng);
  return make_instance(std::move(elements), functions, std::move(topo), counters);
}

struct PortfolioConfig {
  std::uint64_t seed = 1;
  int count = 12;
  int families = 4;             // implementation lineages; contiguous id blocks
  int performance_centers = 2;  // family f uses center f % performance_centers
  int performance_dim = 3;
  int structure_dim = 8;
  double performance_jitter = 0.03;  // uniform half-width around the center
  double structure_noise = 0.05;     // uniform [0, noise) added to every S entry

  bool operator==(const PortfolioConfig&) const = default;
};

inline void validate(const PortfolioConfig& c) {
  if (c.count < 2) throw ValidationError("portfolio count must be >= 2");
  if (c.families < 1 || c.families > c.count) throw ValidationError("families must lie in [1, count]");
  if (c.performance_centers < 1) throw ValidationError("performance_centers must be >= 1");
  if (c.performance_dim < 1) throw ValidationError("performance_dim must be >= 1");
  if (c.structure_dim < c.families) throw ValidationError("structure_dim must be >= families");
  if (!(c.performance_jitter >= 0.0)) throw ValidationError("performance_jitter must be >= 0");
  if (!(c.structure_noise >= 0.0)) throw ValidationError("structure_noise must be >= 0");
}

inline int family_of(const PortfolioConfig& c, int index) { return index * c.families / c.count; }

/// Algorithms A1..An. Each family owns a disjoint block of structure
/// dimensions, so cross-family pairs are nearly orthogonal in S while
/// same-family pairs are nearly parallel.
inline Portfolio generate_portfolio(const PortfolioConfig& cfg) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, "portfolio"));
  const auto d = static_cast<std::size_t>(cfg.performance_dim);
  const auto ks = static_cast<std::size_t>(cfg.structure_dim);
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(cfg.performance_centers));
  for (auto& c : centers)
    for (std::size_t i = 0; i < d; ++i) c.push_back(uniform01(rng));

  const std::size_t block = ks / static_cast<std::size_t>(cfg.families);
  Portfolio out;
  for (int a = 0; a < cfg.count; ++a) {
    const int fam = family_of(cfg, a);
    AlgorithmDescriptor alg;
    alg.id = "A" + std::to_string(a + 1);
    const auto& center = centers[static_cast<std::size_t>(fam % cfg.performance_centers)];
    for (std::size_t i = 0; i < d; ++i)
      alg.performance.push_back(center[i] + uniform(rng, -cfg.performance_jitter, cfg.performance_jitter));
    const std::size_t lo = static_cast<std::size_t>(fam) * block;
    for (std::size_t i = 0; i < ks; ++i) {
      const double owned = (i >= lo && i < lo + block) ? 1.0 : 0.0;
      alg.structure.push_back(owned + (cfg.structure_noise > 0.0 ? uniform(rng, 0.0, cfg.structure_noise) : 0.0));
    }
    out.push_back(std::move(alg));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixtures

/// An instance together with the laws its trials resample from.
struct InstanceFixture {
  DeploymentInstance instance;
  OperationalLaws laws;
};

namespace detail {

inline Element fixture_element(std::string id, std::vector<int> cats, std::vector<double> nums,
                               std::vector<std::string> supports, Layer layer = Layer::L1) {
  Element e;
  e.id = std::move(id);
  e.signature = {std::move(cats), std::move(nums)};
  e.supports = std::move(supports);
  e.layer = layer;
  return e;
}

inline double clone_jitter(Rng& rng) { return uniform(rng, -0.02, 0.02); }

}  // namespace detail

/// Seven nodes, functions F1..F3. F1 has four near-clone realizations
/// (e1..e4), F3 has three mutually distinct ones (e5..e7), F2 sits on two of
/// the clones.
inline InstanceFixture make_redundancy_fixture(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "fixture/redundancy"));
  std::vector<Element> el;
  for (int i = 1; i <= 4; ++i) {
    std::vector<std::string> sup{"F1"};
    if (i <= 2) sup.push_back("F2");
    el.push_back(detail::fixture_element("e" + std::to_string(i), {0, 0, 0},
                                         {0.5 + detail::clone_jitter(rng), 0.5 + detail::clone_jitter(rng)}, sup));
  }
  for (int i = 5; i <= 7; ++i)
    el.push_back(detail::fixture_element("e" + std::to_string(i), {i - 4, i - 4, i - 4},
                                         {uniform01(rng), uniform01(rng)}, {"F3"}));
  InstanceFixture fx;
  draw_capacity_and_load(el, fx.laws, rng);
  draw_availability_and_mtbf(el, fx.laws, rng);
  fx.instance = make_flat_instance(std::move(el), function_catalog(3));
  return fx;
}

/// Seven nodes all realizing F1: three structurally distinct nodes (e1..e3)
/// and four near-clones (e4..e7). MTBFs are drawn short relative to a 168 h
/// mission, so the Joint admissibility filter rejects most nodes.
inline InstanceFixture make_fss_collapse_fixture(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "fixture/collapse"));
  InstanceFixture fx;
  fx.laws.mtbf = {std::log(180.0), 0.2};
  std::vector<Element> el;
  for (int i = 1; i <= 3; ++i)
    el.push_back(detail::fixture_element("e" + std::to_string(i), {i, i, i}, {uniform01(rng), uniform01(rng)},
                                         {"F1", i == 1 ? "F2" : "F3"}));
  for (int i = 4; i <= 7; ++i)
    el.push_back(detail::fixture_element("e" + std::to_string(i), {0, 0, 0},
                                         {0.5 + detail::clone_jitter(rng), 0.5 + detail::clone_jitter(rng)},
                                         {"F1", i % 2 ? "F2" : "F3"}));
  draw_capacity_and_load(el, fx.laws, rng);
  draw_availability_and_mtbf(el, fx.laws, rng);
  fx.instance = make_flat_instance(std::move(el), function_catalog(3));
  return fx;
}

/// Three layers, four functions. L1 is a single-lineage block of 14 near-clones
/// concentrated on F1; L2 (6 elements, two lineages) spreads support evenly
/// over F1..F4; L3 (6 elements, three lineages) leans on F3/F4. Every L2
/// element depends on every L1 element; B23 is drawn at density 0.5.
inline InstanceFixture make_layered_fixture(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "fixture/layered"));
  InstanceFixture fx;
  std::vector<Element> el;
  int next = 1;
  auto id = [&] { return "e" + std::to_string(next++); };
  for (int i = 0; i < 14; ++i) {
    std::vector<std::string> sup{"F1"};
    if (i >= 12) sup.push_back("F2");
    el.push_back(detail::fixture_element(id(), {0, 0, 0},
                                         {0.5 + detail::clone_jitter(rng), 0.5 + detail::clone_jitter(rng)}, sup,
                                         Layer::L1));
  }
  const char* fn[] = {"F1", "F2", "F3", "F4"};
  for (int j = 0; j < 6; ++j) {
    const int lineage = j % 2;
    el.push_back(detail::fixture_element(
        id(), {lineage + 1, lineage + 1, lineage + 1},
        {0.2 + 0.6 * lineage + detail::clone_jitter(rng), 0.2 + 0.6 * lineage + detail::clone_jitter(rng)},
        {fn[j % 4], fn[(j + 1) % 4]}, Layer::L2));
  }
  const std::vector<std::vector<std::string>> l3_support{{"F3"}, {"F4"}, {"F3", "F4"}, {"F3", "F1"}, {"F4", "F2"},
                                                         {"F3", "F4"}};
  for (int j = 0; j < 6; ++j) {
    const int lineage = j % 3;
    el.push_back(detail::fixture_element(id(), {lineage + 3, lineage + 3, lineage + 3},
                                         {0.1 + 0.4 * lineage + detail::clone_jitter(rng),
                                          0.1 + 0.4 * lineage + detail::clone_jitter(rng)},
                                         l3_support[static_cast<std::size_t>(j)], Layer::L3));
  }
  draw_capacity_and_load(el, fx.laws, rng);
  draw_availability_and_mtbf(el, fx.laws, rng);

  LayerTopology topo;
  topo.layers = {Layer::L1, Layer::L2, Layer::L3};
  topo.b12 = BinaryMatrix(6, 14);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 14; ++c) topo.b12.set(r, c, true);
  topo.b23 = detail::random_dependencies(6, 6, 0.5, rng);
  fx.instance = make_instance(std::move(el), function_catalog(4), std::move(topo));
  return fx;
}

/// Five algorithms: two performance-twin, structure-twin pairs (A1,A2) and
/// (A3,A4) from different lineages, and A5 in between.
inline Portfolio make_five_algorithm_fixture() {
  return {
      {"A1", {0.80, 0.70}, {1.00, 0.10, 0.00}},
      {"A2", {0.78, 0.72}, {0.90, 0.20, 0.00}},
      {"A3", {0.40, 0.35}, {0.05, 1.00, 0.10}},
      {"A4", {0.42, 0.33}, {0.10, 0.90, 0.15}},
      {"A5", {0.60, 0.55}, {0.40, 0.40, 0.80}},
  };
}

}  // namespace degen
