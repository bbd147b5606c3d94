#pragma once

// Domain model shared by every metric: elements, layer topology, the cached
// structural dissimilarity matrix, and the reliability law.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace degen {

/// Raised for malformed inputs: bad ranges, shape mismatches, unknown ids.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for filesystem problems (missing or unreadable files).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Identifier ordering used wherever "ascending id" matters. Digit runs
/// compare numerically so e2 < e10.
inline bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ei = i, ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      auto na = a.substr(i, ei - i), nb = b.substr(j, ej - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

enum class Layer : std::uint8_t { L1 = 1, L2 = 2, L3 = 3 };

inline constexpr Layer kAllLayers[] = {Layer::L1, Layer::L2, Layer::L3};

inline std::string layer_name(Layer l) {
  switch (l) {
    case Layer::L1: return "L1";
    case Layer::L2: return "L2";
    case Layer::L3: return "L3";
  }
  return "L?";
}

inline Layer parse_layer(std::string_view s) {
  if (s == "L1") return Layer::L1;
  if (s == "L2") return Layer::L2;
  if (s == "L3") return Layer::L3;
  throw ValidationError("unknown layer '" + std::string(s) + "' (expected L1, L2 or L3)");
}

enum class WeightMode : std::uint8_t { None, Availability, Reliability, Joint };

inline std::string weight_mode_name(WeightMode m) {
  switch (m) {
    case WeightMode::None: return "None";
    case WeightMode::Availability: return "Availability";
    case WeightMode::Reliability: return "Reliability";
    case WeightMode::Joint: return "Joint";
  }
  return "?";
}

inline WeightMode parse_weight_mode(std::string_view s) {
  if (s == "None") return WeightMode::None;
  if (s == "Availability") return WeightMode::Availability;
  if (s == "Reliability") return WeightMode::Reliability;
  if (s == "Joint") return WeightMode::Joint;
  throw ValidationError("unknown weight_mode '" + std::string(s) + "'");
}

/// Pairwise work counters. Every metric entry point accepts an optional
/// pointer and adds what it did.
struct EvalCounters {
  std::uint64_t dissimilarity_evaluations = 0;  // structural_dissimilarity calls
  std::uint64_t summand_visits = 0;             // ordered-pair summands of FSS/ARQ
  std::uint64_t kernel_evaluations = 0;         // K_P and D_s pair evaluations
  std::uint64_t layer_pair_checks = 0;          // greedy distinctness checks in MLDI
  std::uint64_t scoring_pair_visits = 0;        // unordered pairs read while ranking for removal

  EvalCounters& operator+=(const EvalCounters& o) {
    dissimilarity_evaluations += o.dissimilarity_evaluations;
    summand_visits += o.summand_visits;
    kernel_evaluations += o.kernel_evaluations;
    layer_pair_checks += o.layer_pair_checks;
    scoring_pair_visits += o.scoring_pair_visits;
    return *this;
  }
  bool operator==(const EvalCounters&) const = default;
};

struct StructuralSignature {
  std::vector<int> categorical;  // category codes
  std::vector<double> numeric;   // each in [0,1]

  bool operator==(const StructuralSignature&) const = default;
};

struct Element {
  std::string id;
  StructuralSignature signature;
  double capacity = 1.0;      // (0,1]
  double load = 0.0;          // [0, capacity]
  double availability = 1.0;  // [0,1]
  double mtbf = 1.0;          // hours, > 0
  Layer layer = Layer::L1;
  std::vector<std::string> supports;  // function ids, kept sorted and unique

  bool supports_function(std::string_view f) const {
    return std::find(supports.begin(), supports.end(), f) != supports.end();
  }
  bool operator==(const Element&) const = default;
};

/// Dense symmetric matrix with zero diagonal, row-major.
class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;
  explicit DissimilarityMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const DissimilarityMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Row-major 0/1 matrix.
struct BinaryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  BinaryMatrix() = default;
  BinaryMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}

  std::uint8_t operator()(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
  void set(std::size_t r, std::size_t c, bool v) { bits[r * cols + c] = v ? 1 : 0; }
  bool row_empty(std::size_t r) const {
    for (std::size_t c = 0; c < cols; ++c)
      if (bits[r * cols + c]) return false;
    return true;
  }
  bool operator==(const BinaryMatrix&) const = default;
};

/// B12 is |E2|x|E1| (row: L2 element, column: the L1 element it depends on),
/// B23 is |E3|x|E2|. Layer members are indexed in instance element order.
struct LayerTopology {
  std::vector<Layer> layers;
  BinaryMatrix b12;
  BinaryMatrix b23;

  bool operator==(const LayerTopology&) const = default;
};

/// One activity bit per element, indexed like DeploymentInstance::elements.
struct PropagationState {
  std::vector<std::uint8_t> active;

  bool is_active(std::size_t idx) const { return active[idx] != 0; }
  std::size_t active_count() const {
    return static_cast<std::size_t>(std::count(active.begin(), active.end(), std::uint8_t{1}));
  }
  bool operator==(const PropagationState&) const = default;
};

struct MetricConfig {
  double delta = 0.5;
  double a_min = 0.5;
  double r_min = 0.5;
  double mission_time = 168.0;
  WeightMode weight_mode = WeightMode::Joint;
  double epsilon = 0.6;
  double sigma = 0.5;
  int m = 3;
  int k = 3;
  double gamma = 0.5;  // carried through to reports, not used by any metric

  bool operator==(const MetricConfig&) const = default;
};

inline void validate(const MetricConfig& c) {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
  };
  unit(c.delta, "delta");
  unit(c.a_min, "a_min");
  unit(c.r_min, "r_min");
  unit(c.epsilon, "epsilon");
  if (!(c.mission_time > 0.0)) throw ValidationError("mission_time must be > 0");
  if (!(c.sigma > 0.0)) throw ValidationError("sigma must be > 0");
  if (c.m < 1) throw ValidationError("m must be >= 1");
  if (c.k < 1) throw ValidationError("k must be >= 1");
}

/// R(t) = exp(-t / mtbf).
inline double reliability(double mtbf, double t) {
  if (!(mtbf > 0.0)) throw ValidationError("mtbf must be > 0, got " + std::to_string(mtbf));
  if (!(t >= 0.0)) throw ValidationError("mission time must be >= 0");
  return std::exp(-t / mtbf);
}

/// Gower-style mean of per-feature distances: 0/1 mismatch for categorical
/// codes, absolute difference for numeric features.
inline double structural_dissimilarity(const StructuralSignature& a, const StructuralSignature& b) {
  if (a.categorical.size() != b.categorical.size())
    throw ValidationError("categorical feature count mismatch: " + std::to_string(a.categorical.size()) +
                          " vs " + std::to_string(b.categorical.size()));
  if (a.numeric.size() != b.numeric.size())
    throw ValidationError("numeric feature count mismatch: " + std::to_string(a.numeric.size()) + " vs " +
                          std::to_string(b.numeric.size()));
  const std::size_t total = a.categorical.size() + a.numeric.size();
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t f = 0; f < a.categorical.size(); ++f) sum += a.categorical[f] == b.categorical[f] ? 0.0 : 1.0;
  for (std::size_t f = 0; f < a.numeric.size(); ++f) sum += std::abs(a.numeric[f] - b.numeric[f]);
  return sum / static_cast<double>(total);
}

inline DissimilarityMatrix build_dissimilarity_matrix(const std::vector<Element>& elements,
                                                      EvalCounters* counters = nullptr) {
  const std::size_t n = elements.size();
  DissimilarityMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, structural_dissimilarity(elements[i].signature, elements[j].signature));
  if (counters && n > 1) counters->dissimilarity_evaluations += n * (n - 1) / 2;
  return d;
}

inline void validate(const Element& e) {
  const std::string where = "element '" + e.id + "': ";
  if (e.id.empty()) throw ValidationError("element id must be non-empty");
  if (!(e.capacity > 0.0 && e.capacity <= 1.0)) throw ValidationError(where + "capacity must lie in (0,1]");
  if (!(e.load >= 0.0 && e.load <= e.capacity)) throw ValidationError(where + "load must lie in [0, capacity]");
  if (!(e.availability >= 0.0 && e.availability <= 1.0)) throw ValidationError(where + "availability must lie in [0,1]");
  if (!(e.mtbf > 0.0) || !std::isfinite(e.mtbf)) throw ValidationError(where + "mtbf must be > 0");
  if (e.supports.empty()) throw ValidationError(where + "supports must be non-empty");
  for (double v : e.signature.numeric)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(where + "numeric feature outside [0,1]");
}

struct DeploymentInstance {
  std::vector<Element> elements;
  std::vector<std::string> functions;
  LayerTopology topology;
  DissimilarityMatrix dissimilarity;

  std::size_t size() const { return elements.size(); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i].id == id) return i;
    return std::nullopt;
  }

  bool has_function(std::string_view f) const {
    return std::find(functions.begin(), functions.end(), f) != functions.end();
  }

  /// Indices of the elements in `layer`, in element order.
  std::vector<std::size_t> layer_members(Layer layer) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i].layer == layer) out.push_back(i);
    return out;
  }

  /// Indices of the realizations of function `f` (E_f), in element order.
  std::vector<std::size_t> realizations(std::string_view f) const {
    if (!has_function(f)) throw ValidationError("unknown function id '" + std::string(f) + "'");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i].supports_function(f)) out.push_back(i);
    return out;
  }

  bool operator==(const DeploymentInstance&) const = default;
};

/// Layers that hold at least one element, in L1..L3 order.
inline std::vector<Layer> populated_layers(const std::vector<Element>& elements) {
  std::vector<Layer> out;
  for (Layer l : kAllLayers)
    if (std::any_of(elements.begin(), elements.end(), [l](const Element& e) { return e.layer == l; }))
      out.push_back(l);
  return out;
}

/// Checks everything except the cached matrix contents.
inline void validate_structure(const DeploymentInstance& inst) {
  if (inst.functions.empty()) throw ValidationError("function catalog is empty");
  std::unordered_map<std::string, int> seen;
  for (const auto& e : inst.elements) {
    validate(e);
    if (seen[e.id]++) throw ValidationError("duplicate element id '" + e.id + "'");
    for (const auto& f : e.supports)
      if (!inst.has_function(f))
        throw ValidationError("element '" + e.id + "' supports unknown function '" + f + "'");
  }
  if (!inst.elements.empty()) {
    const auto& ref = inst.elements.front().signature;
    for (const auto& e : inst.elements) {
      if (e.signature.categorical.size() != ref.categorical.size() || e.signature.numeric.size() != ref.numeric.size())
        throw ValidationError("element '" + e.id + "' has signature arity " +
                              std::to_string(e.signature.categorical.size()) + "+" +
                              std::to_string(e.signature.numeric.size()) + ", expected " +
                              std::to_string(ref.categorical.size()) + "+" + std::to_string(ref.numeric.size()));
    }
  }
  const auto n1 = inst.layer_members(Layer::L1).size();
  const auto n2 = inst.layer_members(Layer::L2).size();
  const auto n3 = inst.layer_members(Layer::L3).size();
  const auto& t = inst.topology;
  if (t.b12.rows != n2 || t.b12.cols != n1 || t.b12.bits.size() != n2 * n1)
    throw ValidationError("B12 must be " + std::to_string(n2) + "x" + std::to_string(n1));
  if (t.b23.rows != n3 || t.b23.cols != n2 || t.b23.bits.size() != n3 * n2)
    throw ValidationError("B23 must be " + std::to_string(n3) + "x" + std::to_string(n2));
  for (auto b : t.b12.bits)
    if (b > 1) throw ValidationError("B12 entries must be 0 or 1");
  for (auto b : t.b23.bits)
    if (b > 1) throw ValidationError("B23 entries must be 0 or 1");
  for (std::size_t i = 1; i < t.layers.size(); ++i)
    if (static_cast<int>(t.layers[i]) <= static_cast<int>(t.layers[i - 1]))
      throw ValidationError("topology layers must be listed in ascending order without repeats");
  if (inst.dissimilarity.size() != inst.elements.size())
    throw ValidationError("dissimilarity dimension does not match element count");
}

/// Normalizes supports, fills empty layer list from populated layers, builds
/// the dissimilarity cache, and validates the result.
inline DeploymentInstance make_instance(std::vector<Element> elements, std::vector<std::string> functions,
                                        LayerTopology topology, EvalCounters* counters = nullptr) {
  for (auto& e : elements) {
    std::sort(e.supports.begin(), e.supports.end(), natural_less);
    e.supports.erase(std::unique(e.supports.begin(), e.supports.end()), e.supports.end());
  }
  if (topology.layers.empty()) topology.layers = populated_layers(elements);
  DeploymentInstance inst{std::move(elements), std::move(functions), std::move(topology), {}};
  inst.dissimilarity = DissimilarityMatrix(inst.elements.size());
  validate_structure(inst);
  inst.dissimilarity = build_dissimilarity_matrix(inst.elements, counters);
  return inst;
}

/// Flat instance with every element in L1 and no dependencies.
inline DeploymentInstance make_flat_instance(std::vector<Element> elements, std::vector<std::string> functions,
                                             EvalCounters* counters = nullptr) {
  for (auto& e : elements) e.layer = Layer::L1;
  LayerTopology topo;
  topo.b12 = BinaryMatrix(0, elements.size());
  topo.b23 = BinaryMatrix(0, 0);
  return make_instance(std::move(elements), std::move(functions), std::move(topo), counters);
}

/// Restriction of `inst` to the element indices in `keep` (ascending). The
/// dependency matrices are sliced accordingly and the dissimilarity matrix is
/// recomputed on the survivors.
inline DeploymentInstance subset(const DeploymentInstance& inst, const std::vector<std::size_t>& keep,
                                 EvalCounters* counters = nullptr) {
  std::vector<Element> kept;
  kept.reserve(keep.size());
  for (auto i : keep) kept.push_back(inst.elements.at(i));

  // position of each original element within its layer, and whether kept
  auto slice = [&](Layer rowL, Layer colL, const BinaryMatrix& b) {
    const auto rows = inst.layer_members(rowL);
    const auto cols = inst.layer_members(colL);
    std::vector<std::size_t> rsel, csel;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (std::binary_search(keep.begin(), keep.end(), rows[r])) rsel.push_back(r);
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (std::binary_search(keep.begin(), keep.end(), cols[c])) csel.push_back(c);
    BinaryMatrix out(rsel.size(), csel.size());
    for (std::size_t r = 0; r < rsel.size(); ++r)
      for (std::size_t c = 0; c < csel.size(); ++c) out.set(r, c, b(rsel[r], csel[c]) != 0);
    return out;
  };
  LayerTopology topo;
  topo.b12 = slice(Layer::L2, Layer::L1, inst.topology.b12);
  topo.b23 = slice(Layer::L3, Layer::L2, inst.topology.b23);
  for (Layer l : inst.topology.layers)
    if (std::any_of(kept.begin(), kept.end(), [l](const Element& e) { return e.layer == l; })) topo.layers.push_back(l);

  DeploymentInstance out{std::move(kept), inst.functions, std::move(topo), {}};
  out.dissimilarity = build_dissimilarity_matrix(out.elements, counters);
  return out;
}

}  // namespace degen
