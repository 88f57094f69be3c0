#include <catch_amalgamated.hpp>

#include <algorithm>

#include <detox/detox.hpp>

#include "support/brute.hpp"

using detox::FaultClass;
using detox::FaultClassKind;

namespace {

std::vector<FaultClass> classes_of_bit(const std::vector<FaultClass>& all, uint32_t bit) {
  std::vector<FaultClass> out;
  for (const FaultClass& c : all)
    if (c.bit == bit) out.push_back(c);
  return out;
}

}  // namespace

TEST_CASE("def/use classes of the two-assertion workload") {
  detox::Program p = support::load_workload("p1.dtx");
  detox::GoldenTrace g = detox::golden_run(p);
  auto classes = detox::build_classes(g);

  const auto E = FaultClassKind::Experiment;
  const auto P = FaultClassKind::PrunedBenign;

  for (uint32_t bit = 0; bit < 8; ++bit) {
    CAPTURE(bit);
    CHECK(classes_of_bit(classes, bit) ==
          std::vector<FaultClass>{{bit, 0, 1, 0, P},
                                  {bit, 1, 3, 2, E},
                                  {bit, 3, 4, 3, E},
                                  {bit, 4, 6, 5, E},
                                  {bit, 6, 7, 6, E},
                                  {bit, 7, 8, 7, P}});
  }
  for (uint32_t bit = 8; bit < 16; ++bit) {
    CAPTURE(bit);
    CHECK(classes_of_bit(classes, bit) ==
          std::vector<FaultClass>{{bit, 0, 2, 1, P}, {bit, 2, 8, 7, E}});
  }
}

TEST_CASE("classes partition the whole plane for every corpus workload") {
  for (const char* name : {"p0.dtx", "p1.dtx", "bubble_sort10.dtx", "synthetic_n8.dtx",
                           "trap_timeout.dtx", "no_detect.dtx"}) {
    CAPTURE(name);
    detox::Program p = support::load_workload(name);
    detox::GoldenTrace g = detox::golden_run(p);
    auto classes = detox::build_classes(g);

    uint64_t weight_sum = 0;
    for (uint32_t bit = 0; bit < g.memory.total_bits; ++bit) {
      auto per_bit = classes_of_bit(classes, bit);
      REQUIRE_FALSE(per_bit.empty());
      CHECK(per_bit.front().lo == 0);
      CHECK(per_bit.back().hi == g.total_steps);
      for (size_t i = 0; i < per_bit.size(); ++i) {
        const FaultClass& c = per_bit[i];
        CHECK(c.lo < c.hi);
        CHECK(c.rep_t == c.hi - 1);
        if (i > 0) CHECK(c.lo == per_bit[i - 1].hi);
        weight_sum += c.weight();
      }
    }
    CHECK(weight_sum == detox::total_area(g));
  }
}

TEST_CASE("a write-terminated interval is pruned, a read-terminated one is not") {
  auto p = detox::parse("var x:8 = 1\nvar y:8 = 2\nx = y\noutput x");
  detox::GoldenTrace g = detox::golden_run(p);
  auto classes = detox::build_classes(g);

  // x: written at 0, overwritten at 2, read at 3
  CHECK(classes_of_bit(classes, 0) ==
        std::vector<FaultClass>{{0, 0, 1, 0, FaultClassKind::PrunedBenign},
                                {0, 1, 3, 2, FaultClassKind::PrunedBenign},
                                {0, 3, 4, 3, FaultClassKind::Experiment}});
  // y: written at 1, read at 2, then dead until the end
  CHECK(classes_of_bit(classes, 8) ==
        std::vector<FaultClass>{{8, 0, 2, 1, FaultClassKind::PrunedBenign},
                                {8, 2, 3, 2, FaultClassKind::Experiment},
                                {8, 3, 4, 3, FaultClassKind::PrunedBenign}});
}

TEST_CASE("every coordinate of a pruned-benign class really is benign") {
  detox::Program p = support::load_workload("p1.dtx");
  detox::GoldenTrace g = detox::golden_run(p);
  for (const FaultClass& c : detox::build_classes(g)) {
    if (c.kind != FaultClassKind::PrunedBenign) continue;
    for (uint64_t t = c.lo; t < c.hi; ++t) {
      auto r = detox::run_experiment(p, g, t, c.bit, detox::DiscoveryMode{});
      CAPTURE(c.bit, t);
      CHECK(r.outcome == detox::Outcome::Benign);
      CHECK_FALSE(r.detected());
    }
  }
}

TEST_CASE("every coordinate of an experiment class matches its representative") {
  detox::Program p = support::load_workload("trap_timeout.dtx");
  detox::GoldenTrace g = detox::golden_run(p);
  for (const FaultClass& c : detox::build_classes(g)) {
    if (c.kind != FaultClassKind::Experiment) continue;
    auto rep = detox::run_experiment(p, g, c.rep_t, c.bit, detox::DiscoveryMode{});
    for (uint64_t t = c.lo; t < c.rep_t; ++t) {
      auto r = detox::run_experiment(p, g, t, c.bit, detox::DiscoveryMode{});
      CAPTURE(c.bit, t, c.rep_t);
      CHECK(r == rep);
    }
  }
}
