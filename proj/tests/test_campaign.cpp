#include <catch_amalgamated.hpp>

#include <sstream>

#include <json.hpp>

#include <detox/detox.hpp>

#include "support/brute.hpp"

using detox::FaultClassKind;
using detox::FaultRecord;
using detox::Outcome;

namespace {

const FaultRecord* find_record(const detox::CampaignResult& c, uint32_t bit, uint64_t lo) {
  for (const FaultRecord& r : c.records)
    if (r.bit == bit && r.lo == lo) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("discovery campaign over the two-assertion workload") {
  detox::Program p = support::load_workload("p1.dtx");
  detox::CampaignResult c = detox::run_discovery(p);

  CHECK(c.program_digest == p.source_digest);
  CHECK(c.total_steps == 8);
  CHECK(c.workload_steps == 5);
  CHECK(c.total_bits == 16);
  REQUIRE(c.assertions.size() == 2);
  CHECK(c.assertions[0].id == "A1");
  CHECK(c.assertions[0].windows == std::vector<detox::Interval>{{3, 4}});
  CHECK(c.assertions[1].id == "A2");
  CHECK(c.assertions[1].windows == std::vector<detox::Interval>{{4, 6}});
  CHECK(c.records.size() == 64);

  for (uint32_t bit = 0; bit < 8; ++bit) {
    CAPTURE(bit);
    const FaultRecord* r = find_record(c, bit, 1);
    REQUIRE(r);
    CHECK(r->hi == 3);
    CHECK(r->outcome == Outcome::Sdc);
    CHECK(r->detectors ==
          std::vector<detox::Detection>{{0, 3}, {1, 5}});

    r = find_record(c, bit, 4);
    REQUIRE(r);
    CHECK(r->detectors == std::vector<detox::Detection>{{1, 5}});
    CHECK(r->outcome == Outcome::Sdc);

    r = find_record(c, bit, 6);
    REQUIRE(r);
    CHECK(r->detectors.empty());
    CHECK(r->outcome == Outcome::Sdc);
  }
  for (uint32_t bit = 8; bit < 16; ++bit) {
    CAPTURE(bit);
    const FaultRecord* r = find_record(c, bit, 2);
    REQUIRE(r);
    CHECK(r->hi == 8);
    CHECK(r->detectors.empty());
    CHECK(r->outcome == Outcome::Sdc);
  }
}

TEST_CASE("smallest workload records") {
  detox::Program p = support::load_workload("p0.dtx");
  detox::CampaignResult c = detox::run_discovery(p);
  CHECK(c.records.size() == 24);
  for (uint32_t bit = 0; bit < 8; ++bit) {
    const FaultRecord* r = find_record(c, bit, 1);
    REQUIRE(r);
    CHECK(r->detectors == std::vector<detox::Detection>{{0, 1}});
    CHECK(r->outcome == Outcome::Sdc);
    r = find_record(c, bit, 2);
    REQUIRE(r);
    CHECK(r->detectors.empty());
    CHECK(r->outcome == Outcome::Sdc);
    r = find_record(c, bit, 0);
    REQUIRE(r);
    CHECK(r->origin == FaultClassKind::PrunedBenign);
    CHECK(r->outcome == Outcome::Benign);
  }
}

TEST_CASE("records are sorted and cover the area exactly") {
  for (const char* name : {"p1.dtx", "synthetic_n8.dtx", "trap_timeout.dtx"}) {
    CAPTURE(name);
    detox::CampaignResult c = detox::run_discovery(support::load_workload(name));
    uint64_t area = 0;
    for (size_t i = 0; i < c.records.size(); ++i) {
      area += c.records[i].weight();
      if (i > 0) {
        bool ordered = c.records[i - 1].bit < c.records[i].bit ||
                       (c.records[i - 1].bit == c.records[i].bit &&
                        c.records[i - 1].lo < c.records[i].lo);
        CHECK(ordered);
      }
    }
    CHECK(area == c.total_steps * c.total_bits);
  }
}

TEST_CASE("pruned records never execute, experiments always carry a result") {
  detox::CampaignResult c = detox::run_discovery(support::load_workload("trap_timeout.dtx"));
  for (const FaultRecord& r : c.records) {
    if (r.origin == FaultClassKind::PrunedBenign) {
      CHECK(r.outcome == Outcome::Benign);
      CHECK(r.detectors.empty());
    }
    CHECK(r.rep_t == r.hi - 1);
  }
}

TEST_CASE("worker count changes nothing") {
  detox::Program p = support::load_workload("synthetic_n8.dtx");
  detox::CampaignOptions serial;
  serial.jobs = 1;
  detox::CampaignOptions parallel;
  parallel.jobs = 8;
  detox::CampaignResult a = detox::run_discovery(p, serial);
  detox::CampaignResult b = detox::run_discovery(p, parallel);
  CHECK(a == b);

  std::ostringstream sa, sb;
  detox::save_campaign(a, sa);
  detox::save_campaign(b, sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("result file round-trips untouched") {
  detox::CampaignResult a = detox::run_discovery(support::load_workload("p1.dtx"));
  std::stringstream ss;
  detox::save_campaign(a, ss);
  detox::CampaignResult b = detox::load_campaign(ss);
  CHECK(a == b);

  std::stringstream again;
  detox::save_campaign(b, again);
  CHECK(ss.str() == again.str());
}

TEST_CASE("result file layout: one header line, one line per record") {
  detox::CampaignResult c = detox::run_discovery(support::load_workload("p1.dtx"));
  std::stringstream ss;
  detox::save_campaign(c, ss);

  std::string line;
  REQUIRE(std::getline(ss, line));
  auto header = nlohmann::json::parse(line);
  CHECK(header["format_version"] == 1);
  CHECK(header["program_digest"] == c.program_digest);
  CHECK(header["T"] == 8);
  CHECK(header["workload_steps"] == 5);
  CHECK(header["total_bits"] == 16);
  REQUIRE(header["assertions"].size() == 2);
  CHECK(header["assertions"][0]["index"] == 0);
  CHECK(header["assertions"][0]["id"] == "A1");
  CHECK(header["assertions"][0]["windows"] == nlohmann::json::parse("[[3,4]]"));
  CHECK(header["assertions"][1]["windows"] == nlohmann::json::parse("[[4,6]]"));

  size_t record_lines = 0;
  bool saw_experiment = false;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++record_lines;
    auto jr = nlohmann::json::parse(line);
    for (const char* key : {"bit", "lo", "hi", "rep_t", "detectors", "outcome", "origin"})
      CHECK(jr.contains(key));
    std::string origin = jr["origin"];
    CHECK((origin == "E" || origin == "P"));
    std::string outcome = jr["outcome"];
    CHECK((outcome == "BENIGN" || outcome == "SDC" || outcome == "TRAP" ||
           outcome == "TIMEOUT"));
    if (origin == "E" && !jr["detectors"].empty()) {
      saw_experiment = true;
      CHECK(jr["detectors"][0].size() == 2);  // [assertion_index, trigger_step]
    }
  }
  CHECK(record_lines == c.records.size());
  CHECK(saw_experiment);
}

TEST_CASE("malformed result files are rejected") {
  auto load_str = [](const std::string& text) {
    std::stringstream ss(text);
    return detox::load_campaign(ss);
  };
  CHECK_THROWS_AS(load_str(""), detox::CampaignIoError);
  CHECK_THROWS_AS(load_str("not json\n"), detox::CampaignIoError);
  CHECK_THROWS_AS(load_str("{\"format_version\":2}\n"), detox::CampaignIoError);
  CHECK_THROWS_AS(load_str("{\"format_version\":1}\n"), detox::CampaignIoError);

  detox::CampaignResult c = detox::run_discovery(support::load_workload("p0.dtx"));
  std::stringstream ss;
  detox::save_campaign(c, ss);
  std::string good = ss.str();
  CHECK_THROWS_AS(load_str(good + "{\"bit\":0}\n"), detox::CampaignIoError);
  std::string bad = good;
  auto pos = bad.find("\"SDC\"");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 5, "\"WAT\"");
  CHECK_THROWS_AS(load_str(bad), detox::CampaignIoError);
  CHECK_THROWS_AS(detox::load_campaign("/nonexistent/results.jsonl"),
                  detox::CampaignIoError);
}

TEST_CASE("campaign totals equal per-coordinate injection totals") {
  for (const char* name : {"p0.dtx", "p1.dtx", "no_detect.dtx"}) {
    CAPTURE(name);
    detox::Program p = support::load_workload(name);
    detox::GoldenTrace g = detox::golden_run(p);
    detox::CampaignResult c = detox::run_discovery(p);
    auto cfg = detox::Configuration::all_enabled(p.assertions.size());
    CHECK(support::record_totals(c, cfg) ==
          support::brute_totals(p, g, detox::DiscoveryMode{}));
  }
}
