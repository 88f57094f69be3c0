// end-to-end acceptance checks, one verdict line each
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <detox/detox.hpp>

#include "support/brute.hpp"

using detox::Configuration;

namespace {

int failures = 0;

void verdict(int number, const std::string& name, const std::function<void()>& body) {
  try {
    body();
    std::cout << "[PASS] " << number << ". " << name << "\n";
  } catch (const std::exception& e) {
    ++failures;
    std::cout << "[FAIL] " << number << ". " << name << " (" << e.what() << ")\n";
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

template <typename T>
void require_eq(const T& got, const T& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream ss;
    ss << what << ": got " << got << ", want " << want;
    throw std::runtime_error(ss.str());
  }
}

const std::vector<std::string> kCorpus = {
    "p0.dtx", "p1.dtx", "bubble_sort10.dtx", "synthetic_n8.dtx",
    "trap_timeout.dtx", "no_detect.dtx"};

detox::CampaignOptions parallel_opts() {
  detox::CampaignOptions opts;
  opts.jobs = 8;
  return opts;
}

std::string attr(const std::string& tag, const std::string& name) {
  std::string key = name + "=\"";
  size_t at = tag.find(key);
  if (at == std::string::npos) return {};
  at += key.size();
  return tag.substr(at, tag.find('"', at) - at);
}

std::map<std::string, uint64_t> svg_cell_areas(const std::string& svg) {
  std::map<std::string, uint64_t> areas;
  size_t at = 0;
  while ((at = svg.find("<rect ", at)) != std::string::npos) {
    size_t end = svg.find("/>", at);
    require(end != std::string::npos, "unterminated rect tag");
    std::string tag = svg.substr(at, end - at);
    at = end;
    if (attr(tag, "class") != "cell") continue;
    uint64_t w = std::stoull(attr(tag, "width"));
    uint64_t h = std::stoull(attr(tag, "height"));
    require(w % 12 == 0 && h % 6 == 0, "cell rect not on the cell grid");
    areas[attr(tag, "fill")] += (w / 12) * (h / 6);
  }
  return areas;
}

void check_exactness() {
  for (const char* name : {"p0.dtx", "p1.dtx", "bubble_sort10.dtx", "synthetic_n8.dtx"}) {
    detox::Program p = support::load_workload(name);
    detox::CampaignOptions opts = parallel_opts();
    detox::CampaignResult c = detox::run_discovery(p, opts);
    size_t n = p.assertions.size();
    for (uint64_t k = 0; k < (1ull << n); ++k) {
      Configuration cfg = Configuration::from_index(k, n);
      detox::PredictedCounts predicted = detox::predict(c, cfg);
      detox::TrueCounts actual = detox::ground_truth(p, cfg, opts);
      require(predicted == actual,
              std::string(name) + " config " + cfg.to_string() + " prediction diverges");
    }
  }
}

void check_tradeoff_table() {
  detox::CampaignResult c = detox::run_discovery(support::load_workload("p1.dtx"));
  auto counts = [&](const char* bits) {
    return detox::predict(c, Configuration::from_string(bits));
  };
  require_eq(counts("11").sdc, uint64_t{56}, "sdc 11");
  require_eq(counts("01").sdc, uint64_t{48}, "sdc 01");
  require_eq(counts("10").sdc, uint64_t{40}, "sdc 10");
  require_eq(counts("00").sdc, uint64_t{48}, "sdc 00");
  require_eq(counts("11").runtime, uint64_t{8}, "runtime 11");
  require_eq(counts("01").runtime, uint64_t{7}, "runtime 01");
  require_eq(counts("10").runtime, uint64_t{6}, "runtime 10");
  require_eq(counts("00").runtime, uint64_t{5}, "runtime 00");
  require_eq(detox::exhaustive_search(c).best.to_string(), std::string("10"),
             "exhaustive best");
}

void check_pruning() {
  for (const std::string& name : kCorpus) {
    detox::Program p = support::load_workload(name);
    detox::GoldenTrace golden = detox::golden_run(p);
    uint64_t area = detox::total_area(golden);

    std::vector<detox::FaultClass> classes = detox::build_classes(golden);
    std::map<uint32_t, uint64_t> covered;
    for (const detox::FaultClass& fc : classes) {
      require(fc.lo < fc.hi, name + ": empty class");
      require(fc.rep_t == fc.hi - 1, name + ": representative must be last instant");
      covered[fc.bit] += fc.weight();
    }
    require_eq(covered.size(), size_t{golden.memory.total_bits}, name + ": bits covered");
    for (const auto& [bit, w] : covered)
      require_eq(w, golden.total_steps, name + ": bit " + std::to_string(bit) + " coverage");

    if (area > 2000) continue;
    detox::CampaignResult c = detox::run_discovery(p, parallel_opts());
    Configuration all = Configuration::all_enabled(p.assertions.size());
    support::BruteTotals pruned = support::record_totals(c, all);
    support::BruteTotals brute =
        support::brute_totals(p, golden, detox::DiscoveryMode{});
    require(pruned == brute, name + ": pruned totals diverge from full injection");
  }
}

void check_area_conservation() {
  for (const std::string& name : kCorpus) {
    detox::Program p = support::load_workload(name);
    detox::CampaignResult c = detox::run_discovery(p, parallel_opts());
    size_t n = p.assertions.size();
    for (uint64_t k = 0; k < (1ull << n); ++k) {
      Configuration cfg = Configuration::from_index(k, n);
      detox::PredictedCounts pc = detox::predict(c, cfg);
      uint64_t sum = pc.sdc + pc.detected + pc.benign + pc.trap + pc.timeout;
      require_eq(sum, pc.runtime * c.total_bits,
                 name + " " + cfg.to_string() + ": counts must tile the fault space");
      require_eq(pc.area, pc.runtime * c.total_bits, name + ": area field");
      detox::GoldenTrace variant = detox::golden_run(detox::strip(p, cfg).program);
      require_eq(pc.runtime, variant.total_steps,
                 name + " " + cfg.to_string() + ": runtime vs variant golden");
    }
  }
}

void check_search() {
  detox::CampaignResult c =
      detox::run_discovery(support::load_workload("synthetic_n8.dtx"), parallel_opts());

  detox::SearchOutcome ex = detox::exhaustive_search(c);
  auto table = detox::predict_all(c);
  require_eq(table.size(), size_t{256}, "full table size");
  for (const auto& [bits, counts] : table) {
    bool better = counts.sdc < ex.best_counts.sdc ||
                  (counts.sdc == ex.best_counts.sdc &&
                   Configuration::from_string(bits).enabled_count() <
                       ex.best.enabled_count());
    require(!better, "exhaustive missed " + bits);
  }

  uint64_t all_on = detox::predict(c, Configuration::all_enabled(8)).sdc;
  detox::SearchOutcome greedy = detox::greedy_search(c);
  require(greedy.best_counts.sdc <= all_on, "greedy worse than all-enabled");

  detox::GaParams params;  // seed 1, population 32, generations 100
  detox::SearchOutcome ga = detox::ga_search(c, params);
  require(ga.best_counts.sdc <= all_on, "ga worse than all-enabled");
  require_eq(ga.best.to_string(), ex.best.to_string(), "ga vs exhaustive best");
}

void check_render() {
  detox::CampaignResult c = detox::run_discovery(support::load_workload("p1.dtx"));
  Configuration cfg = Configuration::from_string("11");
  std::string svg = detox::render_svg(c, cfg);
  require(svg == detox::render_svg(c, cfg), "render not byte deterministic");

  std::map<std::string, uint64_t> areas = svg_cell_areas(svg);
  require_eq(areas["#808080"], uint64_t{56}, "gray area");
  require_eq(areas["#8fd18f"] + areas["#1a7a1a"], uint64_t{40}, "green area");
  require_eq(areas["#8fd18f"], uint64_t{24}, "light green area");
  require_eq(areas["#1a7a1a"], uint64_t{16}, "dark green area");
  require_eq(areas["#ffffff"], uint64_t{32}, "white area");

  detox::PredictedCounts counts = detox::predict(c, cfg);
  require_eq(areas["#808080"], counts.sdc, "gray vs predicted sdc");
  require_eq(areas["#8fd18f"] + areas["#1a7a1a"], counts.detected, "green vs detected");
  require_eq(areas["#ffffff"], counts.benign, "white vs benign");
}

void check_parallel_determinism() {
  std::string src = support::workload_path("synthetic_n8.dtx");
  std::string one = "/tmp/detox_accept_j1.jsonl";
  std::string eight = "/tmp/detox_accept_j8.jsonl";
  std::string quiet = " >/dev/null 2>&1";
  require(std::system((DETOX_BIN " campaign " + src + " -o " + one + " --jobs 1" + quiet)
                          .c_str()) == 0,
          "campaign --jobs 1 failed");
  require(std::system((DETOX_BIN " campaign " + src + " -o " + eight + " --jobs 8" + quiet)
                          .c_str()) == 0,
          "campaign --jobs 8 failed");
  require(support::read_file(one) == support::read_file(eight),
          "result files differ between 1 and 8 workers");
}

}  // namespace

int main() {
  verdict(1, "predictions match measured ground truth on every configuration",
          check_exactness);
  verdict(2, "two-assertion workload shows the expected cost tradeoff", check_tradeoff_table);
  verdict(3, "pruned campaign agrees with exhaustive per-cell injection", check_pruning);
  verdict(4, "outcome counts tile the fault space for every configuration",
          check_area_conservation);
  verdict(5, "search methods locate the minimum-corruption configuration", check_search);
  verdict(6, "diagram cell areas reproduce the predicted counts", check_render);
  verdict(7, "campaign result files are identical across worker counts",
          check_parallel_determinism);
  if (failures != 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria satisfied\n";
  return 0;
}
