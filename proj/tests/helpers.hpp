#pragma once

#include <string>
#include <vector>

#include "degen/degen.hpp"

namespace testkit {

inline degen::Element element(std::string id, std::vector<int> cats, std::vector<double> nums,
                              std::vector<std::string> supports = {"F1"}, degen::Layer layer = degen::Layer::L1) {
  degen::Element e;
  e.id = std::move(id);
  e.signature = {std::move(cats), std::move(nums)};
  e.supports = std::move(supports);
  e.layer = layer;
  e.capacity = 1.0;
  e.load = 0.0;
  e.availability = 0.95;
  e.mtbf = 1000.0;
  return e;
}

/// Flat instance whose cached dissimilarity matrix is replaced by the upper
/// triangle of `d`, for hand-set pair values.
inline degen::DeploymentInstance with_dissimilarity(std::vector<degen::Element> els,
                                                    const std::vector<std::vector<double>>& d,
                                                    std::vector<std::string> functions = {"F1"}) {
  auto inst = degen::make_flat_instance(std::move(els), std::move(functions));
  degen::DissimilarityMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) m.set(i, j, d[i][j]);
  inst.dissimilarity = m;
  return inst;
}

/// Random generator-backed instance with n in [lo, hi] elements.
inline degen::DeploymentInstance random_instance(std::uint64_t seed, std::size_t lo = 4, std::size_t hi = 12) {
  degen::Rng rng(seed);
  const std::size_t n = lo + degen::uniform_index(rng, hi - lo + 1);
  degen::GeneratorConfig g;
  g.seed = seed;
  const std::size_t upper = n > 6 ? 2 : 1;
  g.layer_sizes = {n - 2 * upper, upper, upper};
  g.function_count = 2;
  g.extra_support_probability = 0.4;
  g.schema.category_cardinalities = {2, 2};
  g.schema.numeric_features = 2;
  return degen::generate_instance(g);
}

/// Six-element layered instance: p1, p2 in L1; c1 <- {p1, p2}, c2 <- {p2} in
/// L2; s1 <- {c1}, s2 <- {c1, c2} in L3.
inline degen::DeploymentInstance micro_fixture() {
  using degen::Layer;
  std::vector<degen::Element> els{element("p1", {0}, {0.1}, {"F1"}, Layer::L1),
                                  element("p2", {1}, {0.9}, {"F2"}, Layer::L1),
                                  element("c1", {0}, {0.4}, {"F1"}, Layer::L2),
                                  element("c2", {1}, {0.6}, {"F2"}, Layer::L2),
                                  element("s1", {0}, {0.2}, {"F1"}, Layer::L3),
                                  element("s2", {1}, {0.7}, {"F2"}, Layer::L3)};
  degen::LayerTopology t;
  t.layers = {Layer::L1, Layer::L2, Layer::L3};
  t.b12 = degen::BinaryMatrix(2, 2);
  t.b12.set(0, 0, true);
  t.b12.set(0, 1, true);
  t.b12.set(1, 1, true);
  t.b23 = degen::BinaryMatrix(2, 2);
  t.b23.set(0, 0, true);
  t.b23.set(1, 0, true);
  t.b23.set(1, 1, true);
  return degen::make_instance(std::move(els), {"F1", "F2"}, std::move(t));
}

}  // namespace testkit
