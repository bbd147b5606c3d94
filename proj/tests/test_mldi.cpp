#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace degen;

namespace {

MetricConfig cfg_for(const DeploymentInstance& inst) {
  MetricConfig c;
  c.m = static_cast<int>(inst.functions.size());
  c.k = static_cast<int>(inst.topology.layers.size());
  return c;
}

std::vector<bool> as_bools(const PropagationState& s) { return {s.active.begin(), s.active.end()}; }

/// Flat single-layer instance of n elements, each supporting the listed function.
DeploymentInstance layer_of(const std::vector<std::vector<std::string>>& supports, std::vector<std::string> functions,
                            bool clones) {
  std::vector<Element> els;
  for (std::size_t i = 0; i < supports.size(); ++i)
    els.push_back(testkit::element("e" + std::to_string(i + 1), {clones ? 0 : static_cast<int>(i)}, {}, supports[i]));
  return make_flat_instance(els, std::move(functions));
}

}  // namespace

TEST_CASE("propagate_failures examples") {
  const auto inst = testkit::micro_fixture();
  const auto idx = [&](const char* id) { return *inst.index_of(id); };

  auto st = propagate_failures(inst, {}, {}, {});
  for (auto a : st.active) CHECK(a == 1);

  st = propagate_failures(inst, {"p1"}, {}, {});
  CHECK(st.is_active(idx("c1")));
  CHECK_FALSE(st.is_active(idx("p1")));

  st = propagate_failures(inst, {"p1", "p2"}, {}, {});
  CHECK_FALSE(st.is_active(idx("c1")));
  CHECK_FALSE(st.is_active(idx("c2")));
  CHECK_FALSE(st.is_active(idx("s1")));  // depended solely on c1
  CHECK_FALSE(st.is_active(idx("s2")));

  st = propagate_failures(inst, {}, {"c1"}, {});
  CHECK_FALSE(st.is_active(idx("s1")));
  CHECK(st.is_active(idx("s2")));

  CHECK_THROWS_AS(propagate_failures(inst, {"zz"}, {}, {}), ValidationError);
  CHECK_THROWS_WITH(propagate_failures(inst, {"c1"}, {}, {}), Catch::Matchers::ContainsSubstring("not in layer"));
}

TEST_CASE("zero dependency rows are self-sufficient") {
  auto els = std::vector<Element>{testkit::element("p1", {0}, {}, {"F1"}, Layer::L1),
                                  testkit::element("c1", {1}, {}, {"F1"}, Layer::L2)};
  LayerTopology t;
  t.b12 = BinaryMatrix(1, 1);
  t.b23 = BinaryMatrix(0, 1);
  const auto inst = make_instance(els, {"F1"}, t);
  auto st = propagate_failures(inst, {"p1"}, {}, {});
  CHECK(st.is_active(1));
  st = propagate_failures(inst, {}, {"c1"}, {});
  CHECK_FALSE(st.is_active(1));
}

TEST_CASE("propagation is monotone in the failed set") {
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const auto inst = testkit::random_instance(s, 7, 12);
    Rng rng(s);
    std::vector<bool> failed(inst.size(), false);
    auto prev = propagate_failures(inst, failed);
    for (std::size_t step = 0; step < inst.size(); ++step) {
      failed[uniform_index(rng, inst.size())] = true;
      const auto cur = propagate_failures(inst, failed);
      for (std::size_t i = 0; i < inst.size(); ++i)
        if (!prev.is_active(i)) CHECK_FALSE(cur.is_active(i));
      prev = cur;
    }
  }
}

TEST_CASE("admissible_distinct_set examples") {
  MetricConfig c;
  SECTION("clones keep one") {
    const auto inst = layer_of({{"F1"}, {"F1"}, {"F1"}, {"F1"}}, {"F1"}, true);
    CHECK(admissible_distinct_set(inst, Layer::L1, all_active(inst), c).size() == 1);
  }
  SECTION("fully distinct keeps all") {
    const auto inst = layer_of({{"F1"}, {"F1"}, {"F1"}, {"F1"}}, {"F1"}, false);
    CHECK(admissible_distinct_set(inst, Layer::L1, all_active(inst), c).size() == 4);
  }
  SECTION("greedy trace in id order") {
    const auto inst = testkit::with_dissimilarity(
        {testkit::element("e1", {0}, {}), testkit::element("e2", {1}, {}), testkit::element("e3", {2}, {})},
        {{0, 0.6, 0.2}, {0.6, 0, 0.2}, {0.2, 0.2, 0}});
    const auto kept = admissible_distinct_set(inst, Layer::L1, all_active(inst), c);
    REQUIRE(kept.size() == 2);
    CHECK(inst.elements[kept[0]].id == "e1");
    CHECK(inst.elements[kept[1]].id == "e2");
  }
  SECTION("natural id order, inactive and inadmissible elements skipped") {
    std::vector<Element> els{testkit::element("e10", {0}, {}), testkit::element("e2", {0}, {}),
                             testkit::element("e3", {1}, {})};
    els[2].availability = 0.3;
    const auto inst = make_flat_instance(els, {"F1"});
    auto kept = admissible_distinct_set(inst, Layer::L1, all_active(inst), c);
    REQUIRE(kept.size() == 1);
    CHECK(inst.elements[kept[0]].id == "e2");
    auto st = all_active(inst);
    st.active[1] = 0;
    kept = admissible_distinct_set(inst, Layer::L1, st, c);
    REQUIRE(kept.size() == 1);
    CHECK(inst.elements[kept[0]].id == "e10");
  }
}

TEST_CASE("layer_entropy examples") {
  const std::vector<std::string> f4{"F1", "F2", "F3", "F4"};
  auto uniform = layer_of({{"F1"}, {"F2"}, {"F3"}, {"F4"}}, f4, false);
  CHECK(layer_entropy(uniform, Layer::L1, all_active(uniform), f4).normalized == Approx(1.0).margin(1e-15));

  auto single = layer_of({{"F2"}, {"F2"}, {"F2"}}, f4, false);
  CHECK(layer_entropy(single, Layer::L1, all_active(single), f4).normalized == 0.0);

  auto half = layer_of({{"F1"}, {"F2"}, {"F1", "F2"}}, f4, false);
  const auto h = layer_entropy(half, Layer::L1, all_active(half), f4);
  CHECK(h.raw == Approx(std::log(2.0)).margin(1e-15));
  CHECK(h.normalized == Approx(0.5).margin(1e-15));

  auto st = all_active(half);
  std::fill(st.active.begin(), st.active.end(), 0);
  CHECK(layer_entropy(half, Layer::L1, st, f4).raw == 0.0);
  CHECK(layer_entropy(half, Layer::L1, st, f4).normalized == 0.0);

  auto m1 = layer_of({{"F1"}, {"F1"}}, {"F1"}, false);
  CHECK(layer_entropy(m1, Layer::L1, all_active(m1), {"F1"}).normalized == 0.0);
}

TEST_CASE("entropy is maximal exactly at equal support counts") {
  const std::vector<std::string> f3{"F1", "F2", "F3"};
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (int c = 0; c <= 3; ++c) {
        if (a + b + c == 0) continue;
        std::vector<std::vector<std::string>> sup;
        for (int i = 0; i < a; ++i) sup.push_back({"F1"});
        for (int i = 0; i < b; ++i) sup.push_back({"F2"});
        for (int i = 0; i < c; ++i) sup.push_back({"F3"});
        const auto inst = layer_of(sup, f3, false);
        const double h = layer_entropy(inst, Layer::L1, all_active(inst), f3).normalized;
        CHECK(h >= 0.0);
        CHECK(h <= 1.0 + 1e-15);
        CHECK((std::fabs(h - 1.0) < 1e-12) == (a == b && b == c));
      }
}

TEST_CASE("mldi indices on the micro fixture") {
  const auto inst = testkit::micro_fixture();
  auto c = cfg_for(inst);
  c.gamma = 0.25;
  const auto rep = mldi_report(inst, all_active(inst), c);
  REQUIRE(rep.per_layer.size() == 3);
  CHECK(rep.gamma == 0.25);
  // every layer has two distinct admissible elements with one function each
  CHECK(rep.baseline == 1.0);
  CHECK(rep.enhanced == Approx(1.0).margin(1e-15));
  CHECK(rep.per_layer[1].coverage.at("F1") == 0.5);

  const auto st = propagate_failures(inst, {"p1", "p2"}, {}, {});
  const auto hit = mldi_report(inst, st, c);
  CHECK(hit.baseline == 0.0);
  CHECK(hit.enhanced == 0.0);
  CHECK(hit.per_layer[0].active == 0);
  CHECK(hit.per_layer[0].layer_size == 2);
}

TEST_CASE("mldi means over layers") {
  // tau = (1/5, 3/4, 4/5): L1 five clones, L2 one clone pair, L3 one clone pair
  std::vector<Element> els;
  for (int i = 0; i < 5; ++i) els.push_back(testkit::element("a" + std::to_string(i), {0}, {}, {"F1"}, Layer::L1));
  for (int i = 0; i < 4; ++i)
    els.push_back(testkit::element("b" + std::to_string(i), {std::max(0, i - 1)}, {}, {"F1", "F2"}, Layer::L2));
  for (int i = 0; i < 5; ++i)
    els.push_back(testkit::element("c" + std::to_string(i), {std::min(i, 3)}, {}, {i < 3 ? "F1" : "F2"}, Layer::L3));
  LayerTopology t;
  t.b12 = BinaryMatrix(4, 5);
  t.b23 = BinaryMatrix(5, 4);
  const auto inst = make_instance(els, {"F1", "F2"}, t);
  const auto c = cfg_for(inst);
  const auto rep = mldi_report(inst, all_active(inst), c);
  CHECK(rep.per_layer[0].tau == Approx(0.2));
  CHECK(rep.per_layer[1].tau == Approx(0.75));
  CHECK(rep.per_layer[2].tau == Approx(0.8));
  CHECK(rep.baseline == Approx((0.2 + 0.75 + 0.8) / 3.0).margin(1e-15));
  // entropies 0, 1, H(3/5, 2/5)/log 2
  const double h3 = -(0.6 * std::log(0.6) + 0.4 * std::log(0.4)) / std::log(2.0);
  CHECK(rep.per_layer[0].entropy_norm == 0.0);
  CHECK(rep.per_layer[1].entropy_norm == Approx(1.0).margin(1e-15));
  CHECK(rep.per_layer[2].entropy_norm == Approx(h3).margin(1e-15));
  CHECK(rep.enhanced == Approx((1.0 + h3) / 3.0).margin(1e-15));
  CHECK(mldi_baseline(inst, all_active(inst), c) == rep.baseline);
  CHECK(mldi_enhanced(inst, all_active(inst), c) == rep.enhanced);
}

TEST_CASE("duplicating a layer keeps MLDI* and changes MLDI") {
  const auto base = layer_of({{"F1"}, {"F2"}, {"F1"}}, {"F1", "F2"}, false);
  auto els = base.elements;
  for (const auto& e : base.elements) {
    auto copy = e;
    copy.id = e.id + "d";
    els.push_back(copy);
  }
  const auto dup = make_flat_instance(els, {"F1", "F2"});
  auto c = cfg_for(base);
  c.k = 1;
  const auto a = mldi_report(base, all_active(base), c), b = mldi_report(dup, all_active(dup), c);
  CHECK(a.enhanced == Approx(b.enhanced).margin(1e-15));
  CHECK(a.baseline == 1.0);
  CHECK(b.baseline == 0.5);
}

TEST_CASE("mldi shape and layer errors") {
  const auto inst = testkit::micro_fixture();
  auto c = cfg_for(inst);
  c.m = 3;
  CHECK_THROWS_AS(mldi_report(inst, all_active(inst), c), ValidationError);
  c = cfg_for(inst);
  c.k = 2;
  CHECK_THROWS_AS(mldi_report(inst, all_active(inst), c), ValidationError);
  auto flat = make_flat_instance({testkit::element("e1", {0}, {})}, {"F1"});
  flat.topology.layers = {Layer::L1, Layer::L2};
  c = cfg_for(flat);
  CHECK_THROWS_AS(mldi_report(flat, all_active(flat), c), ValidationError);
}

TEST_CASE("mldi agrees with the oracle under random failures") {
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const auto inst = testkit::random_instance(s);
    Rng rng(s * 31);
    std::vector<bool> failed(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) failed[i] = uniform01(rng) < 0.25;
    const auto st = propagate_failures(inst, failed);
    auto c = cfg_for(inst);
    c.delta = 0.2 + 0.1 * static_cast<double>(s % 5);
    const auto rep = mldi_report(inst, st, c);
    CHECK(std::fabs(rep.baseline - oracle::mldi_baseline(inst, as_bools(st), c)) <= 1e-12);
    CHECK(std::fabs(rep.enhanced - oracle::mldi_enhanced(inst, as_bools(st))) <= 1e-12);
    CHECK(rep.baseline >= 0.0);
    CHECK(rep.baseline <= 1.0);
    CHECK(rep.enhanced >= 0.0);
    CHECK(rep.enhanced <= 1.0 + 1e-15);
  }
}
