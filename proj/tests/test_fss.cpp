#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace degen;

namespace {

std::vector<Element> three(std::vector<std::string> supports = {"F1"}) {
  return {testkit::element("e1", {0}, {}, supports), testkit::element("e2", {1}, {}, supports),
          testkit::element("e3", {2}, {}, supports)};
}

MetricConfig none_mode() {
  MetricConfig c;
  c.weight_mode = WeightMode::None;
  return c;
}

}  // namespace

TEST_CASE("fss_baseline examples") {
  SECTION("clones") {
    auto inst = testkit::with_dissimilarity(three(), {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    CHECK(fss_baseline(inst, "F1", 0.5) == 0.0);
  }
  SECTION("four of six ordered pairs distinct") {
    auto inst = testkit::with_dissimilarity(three(), {{0, 0.6, 0.4}, {0.6, 0, 0.7}, {0.4, 0.7, 0}});
    CHECK(fss_baseline(inst, "F1", 0.5) == Approx(4.0 / 6.0).margin(1e-15));
    CHECK(fss_baseline(inst, "F1", 0.5) == Approx(0.666667).margin(1e-6));
  }
  SECTION("all pairs maximally distinct") {
    for (std::size_t n = 2; n <= 6; ++n) {
      std::vector<Element> els;
      std::vector<std::vector<double>> d(n, std::vector<double>(n, 1.0));
      for (std::size_t i = 0; i < n; ++i) {
        els.push_back(testkit::element("e" + std::to_string(i + 1), {static_cast<int>(i)}, {}));
        d[i][i] = 0.0;
      }
      CHECK(fss_baseline(testkit::with_dissimilarity(els, d), "F1", 0.5) == 1.0);
    }
  }
  SECTION("threshold ties are not distinct") {
    auto inst = testkit::with_dissimilarity(three(), {{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}});
    CHECK(fss_baseline(inst, "F1", 0.5) == 0.0);
  }
  SECTION("degenerate sets") {
    auto inst = make_flat_instance({testkit::element("e1", {0}, {}, {"F1", "F2"}), testkit::element("e2", {1}, {}, {"F1"})},
                                   {"F1", "F2"});
    CHECK(fss_baseline(inst, "F2", 0.5) == 0.0);
    CHECK(fss_weighted(inst, "F2", none_mode()).weighted == 0.0);
    CHECK(fss_weighted(inst, "F2", none_mode()).n == 1);
  }
  SECTION("unknown function") {
    auto inst = make_flat_instance(three(), {"F1"});
    CHECK_THROWS_AS(fss_baseline(inst, "F7", 0.5), ValidationError);
    CHECK_THROWS_AS(fss_weighted(inst, "F7", MetricConfig{}), ValidationError);
  }
}

TEST_CASE("node_weight examples") {
  MetricConfig c;
  auto e = testkit::element("e1", {0}, {});
  CHECK(node_weight(e, WeightMode::None, c) == 1.0);

  e.availability = 0.4;
  CHECK(node_weight(e, WeightMode::Availability, c) == 0.0);
  e.availability = 0.7;
  CHECK(node_weight(e, WeightMode::Availability, c) == 0.7);

  e.availability = 0.9;
  e.mtbf = 336.0;
  CHECK(node_weight(e, WeightMode::Joint, c) == Approx(0.9 * std::exp(-0.5)).margin(1e-15));
  CHECK(node_weight(e, WeightMode::Joint, c) == Approx(0.545878).margin(1e-6));
  CHECK(node_weight(e, WeightMode::Reliability, c) == Approx(std::exp(-0.5)).margin(1e-15));

  e.mtbf = 168.0;  // R = e^-1 < 0.5
  CHECK(node_weight(e, WeightMode::Reliability, c) == 0.0);
  CHECK(node_weight(e, WeightMode::Joint, c) == 0.0);
}

TEST_CASE("pair_weight examples") {
  auto a = testkit::element("a", {0}, {}), b = testkit::element("b", {1}, {});
  CHECK(pair_weight(a, b, 0.0) == 0.0);

  a.capacity = 1.0;
  b.capacity = 0.5;
  a.load = b.load = 0.2;
  CHECK(pair_weight(a, b, 0.8) == Approx(0.4).margin(1e-15));

  a.capacity = b.capacity = 1.0;
  a.load = 0.0;
  b.load = 1.0;
  CHECK(pair_weight(a, b, 1.0) == 0.5);
}

TEST_CASE("fss_weighted examples") {
  SECTION("two-element symmetric sum") {
    auto a = testkit::element("e1", {0}, {}), b = testkit::element("e2", {1}, {});
    b.capacity = 0.5;
    a.load = b.load = 0.2;
    auto inst = testkit::with_dissimilarity({a, b}, {{0, 0.8}, {0.8, 0}});
    const auto rep = fss_weighted(inst, "F1", none_mode());
    CHECK(rep.weighted == Approx(0.4).margin(1e-15));
    CHECK(rep.baseline == 1.0);
    CHECK(rep.admissible_count == 2);
    CHECK(rep.node_weights.at("e1") == 1.0);
  }
  SECTION("Joint indicator rejects everyone") {
    auto els = three();
    for (auto& e : els) e.mtbf = 100.0;
    auto inst = make_flat_instance(els, {"F1"});
    const auto rep = fss_weighted(inst, "F1", MetricConfig{});
    CHECK(rep.baseline > 0.0);
    CHECK(rep.weighted == 0.0);
    CHECK(rep.admissible_count == 0);
  }
  SECTION("clones") {
    std::vector<Element> els;
    for (int i = 1; i <= 4; ++i) els.push_back(testkit::element("e" + std::to_string(i), {3}, {0.25}));
    CHECK(fss_weighted(make_flat_instance(els, {"F1"}), "F1", none_mode()).weighted == 0.0);
  }
}

TEST_CASE("fss agrees with the naive ordered-pair oracle") {
  for (std::uint64_t s = 1; s <= 60; ++s) {
    const auto inst = testkit::random_instance(s);
    for (auto mode : {WeightMode::None, WeightMode::Availability, WeightMode::Reliability, WeightMode::Joint}) {
      MetricConfig c;
      c.weight_mode = mode;
      c.delta = 0.2 + 0.05 * static_cast<double>(s % 8);
      for (const auto& f : inst.functions) {
        const auto rep = fss_weighted(inst, f, c);
        CHECK(std::fabs(rep.baseline - oracle::fss_baseline(inst, f, c.delta)) <= 1e-12);
        CHECK(std::fabs(fss_baseline(inst, f, c.delta) - rep.baseline) <= 1e-12);
        CHECK(std::fabs(rep.weighted - oracle::fss_weighted(inst, f, c)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("fss bound chain and permutation invariance") {
  for (std::uint64_t s = 100; s < 160; ++s) {
    auto inst = testkit::random_instance(s);
    MetricConfig c;
    c.weight_mode = static_cast<WeightMode>(s % 4);
    for (const auto& f : inst.functions) {
      const auto rep = fss_weighted(inst, f, c);
      CHECK(rep.weighted >= 0.0);
      CHECK(rep.weighted <= rep.baseline + 1e-15);
      CHECK(rep.baseline <= 1.0);
    }
    auto els = inst.elements;
    std::reverse(els.begin(), els.end());
    for (std::size_t i = 0; i < els.size(); ++i) els[i].id = "x" + std::to_string(els.size() - i);
    const auto shuffled = make_flat_instance(els, inst.functions);
    for (const auto& f : inst.functions) {
      const auto a = fss_weighted(inst, f, c), b = fss_weighted(shuffled, f, c);
      CHECK(a.baseline == Approx(b.baseline).margin(1e-12));
      CHECK(a.weighted == Approx(b.weighted).margin(1e-12));
    }
  }
}

TEST_CASE("fss is monotone in its thresholds") {
  const std::vector<double> grid{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  for (std::uint64_t s = 200; s < 240; ++s) {
    const auto inst = testkit::random_instance(s);
    for (const auto& f : inst.functions) {
      double prev = 2.0;
      for (double d : grid) {
        const double v = fss_baseline(inst, f, d);
        CHECK(v <= prev);
        prev = v;
      }
      for (bool vary_a : {true, false}) {
        prev = 2.0;
        for (double t : grid) {
          MetricConfig c;
          (vary_a ? c.a_min : c.r_min) = t;
          const double v = fss_weighted(inst, f, c).weighted;
          CHECK(v <= prev);
          prev = v;
        }
      }
    }
  }
}

TEST_CASE("fss counters count ordered summand visits") {
  const auto inst = make_flat_instance(three(), {"F1"});
  EvalCounters c;
  fss_weighted(inst, "F1", MetricConfig{}, &c);
  CHECK(c.summand_visits == 6);
  fss_baseline(inst, "F1", 0.5, &c);
  CHECK(c.summand_visits == 12);
  CHECK(c.dissimilarity_evaluations == 0);
}

TEST_CASE("fss_all covers the catalog in order") {
  auto inst = make_flat_instance(three({"F1", "F2"}), {"F1", "F2"});
  const auto all = fss_all(inst, MetricConfig{});
  REQUIRE(all.size() == 2);
  CHECK(all[0].function_id == "F1");
  CHECK(all[1].function_id == "F2");
}
