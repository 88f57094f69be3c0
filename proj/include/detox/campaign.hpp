#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "detox/faultspace.hpp"
#include "detox/interpreter.hpp"
#include "detox/interval.hpp"

namespace detox {

class CampaignIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AssertionMeta {
  uint32_t index = 0;
  std::string id;
  std::vector<Interval> windows;  // dynamic instances, in execution order
  friend bool operator==(const AssertionMeta&, const AssertionMeta&) = default;
};

// One fault class with its discovery result. PRUNED_BENIGN classes are kept
// so records cover the whole time×bit area.
struct FaultRecord {
  uint32_t bit = 0;
  uint64_t lo = 0;
  uint64_t hi = 0;
  uint64_t rep_t = 0;
  std::vector<Detection> detectors;
  Outcome outcome = Outcome::Benign;
  FaultClassKind origin = FaultClassKind::PrunedBenign;
  uint64_t weight() const { return hi - lo; }
  friend bool operator==(const FaultRecord&, const FaultRecord&) = default;
};

struct CampaignResult {
  std::string program_digest;
  uint64_t total_steps = 0;
  uint64_t workload_steps = 0;
  uint32_t total_bits = 0;
  std::vector<AssertionMeta> assertions;
  MemoryMap memory;  // may be empty when loaded from an old file
  std::vector<FaultRecord> records;
  friend bool operator==(const CampaignResult&, const CampaignResult&) = default;
};

struct CampaignOptions {
  double timeout_factor = 10.0;
  unsigned jobs = 1;
  RunLimits limits;
};

namespace detail {

// Contiguous chunks, results keyed by index: identical output for any job count.
template <typename Fn>
inline void parallel_for(size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  jobs = static_cast<unsigned>(std::min<size_t>(jobs, n));
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned j = 0; j < jobs; ++j) {
    size_t begin = n * j / jobs;
    size_t end = n * (j + 1) / jobs;
    pool.emplace_back([begin, end, &fn] {
      for (size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline std::vector<AssertionMeta> assertion_metas(const Program& p, const GoldenTrace& golden) {
  std::vector<AssertionMeta> metas;
  metas.reserve(p.assertions.size());
  for (uint32_t i = 0; i < p.assertions.size(); ++i)
    metas.push_back({i, p.assertions[i].id, {}});
  for (const AssertionWindow& w : golden.windows)
    metas[w.assertion].windows.push_back({w.t_start, w.t_end});
  return metas;
}

}  // namespace detail

inline CampaignResult run_discovery(const Program& p, const CampaignOptions& opts = {}) {
  GoldenTrace golden = golden_run(p, opts.limits);
  std::vector<FaultClass> classes = build_classes(golden);

  std::vector<size_t> experiments;
  for (size_t i = 0; i < classes.size(); ++i)
    if (classes[i].kind == FaultClassKind::Experiment) experiments.push_back(i);

  std::vector<ExperimentResult> results(classes.size());
  detail::parallel_for(experiments.size(), opts.jobs, [&](size_t k) {
    const FaultClass& fc = classes[experiments[k]];
    results[experiments[k]] =
        run_experiment(p, golden, fc.rep_t, fc.bit, DiscoveryMode{}, opts.timeout_factor);
  });

  CampaignResult out;
  out.program_digest = p.source_digest;
  out.total_steps = golden.total_steps;
  out.workload_steps = golden.workload_steps;
  out.total_bits = golden.memory.total_bits;
  out.assertions = detail::assertion_metas(p, golden);
  out.memory = golden.memory;
  out.records.reserve(classes.size());
  for (size_t i = 0; i < classes.size(); ++i) {
    const FaultClass& fc = classes[i];
    FaultRecord r;
    r.bit = fc.bit;
    r.lo = fc.lo;
    r.hi = fc.hi;
    r.rep_t = fc.rep_t;
    r.origin = fc.kind;
    if (fc.kind == FaultClassKind::Experiment) {
      r.detectors = std::move(results[i].detectors);
      r.outcome = results[i].outcome;
    }
    out.records.push_back(std::move(r));
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const FaultRecord& a, const FaultRecord& b) {
              return a.bit != b.bit ? a.bit < b.bit : a.lo < b.lo;
            });
  return out;
}

inline std::string outcome_token(Outcome o) {
  switch (o) {
    case Outcome::Benign: return "BENIGN";
    case Outcome::Sdc: return "SDC";
    case Outcome::Trap: return "TRAP";
    case Outcome::Timeout: return "TIMEOUT";
  }
  return "?";
}

inline Outcome outcome_from_token(const std::string& s) {
  if (s == "BENIGN") return Outcome::Benign;
  if (s == "SDC") return Outcome::Sdc;
  if (s == "TRAP") return Outcome::Trap;
  if (s == "TIMEOUT") return Outcome::Timeout;
  throw CampaignIoError("unknown outcome '" + s + "'");
}

inline void save_campaign(const CampaignResult& c, std::ostream& os) {
  nlohmann::ordered_json header;
  header["format_version"] = 1;
  header["program_digest"] = c.program_digest;
  header["T"] = c.total_steps;
  header["workload_steps"] = c.workload_steps;
  header["total_bits"] = c.total_bits;
  auto asserts = nlohmann::ordered_json::array();
  for (const AssertionMeta& a : c.assertions) {
    nlohmann::ordered_json ja;
    ja["index"] = a.index;
    ja["id"] = a.id;
    auto windows = nlohmann::ordered_json::array();
    for (const Interval& w : a.windows) windows.push_back({w.lo, w.hi});
    ja["windows"] = std::move(windows);
    asserts.push_back(std::move(ja));
  }
  header["assertions"] = std::move(asserts);
  auto spans = nlohmann::ordered_json::array();
  for (const MemorySpan& s : c.memory.spans) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    js["first_bit"] = s.first_bit;
    js["width"] = s.width;
    js["length"] = s.length;
    spans.push_back(std::move(js));
  }
  header["memory_map"] = std::move(spans);
  os << header.dump() << '\n';

  for (const FaultRecord& r : c.records) {
    nlohmann::ordered_json jr;
    jr["bit"] = r.bit;
    jr["lo"] = r.lo;
    jr["hi"] = r.hi;
    jr["rep_t"] = r.rep_t;
    auto dets = nlohmann::ordered_json::array();
    for (const Detection& d : r.detectors) dets.push_back({d.assertion, d.step});
    jr["detectors"] = std::move(dets);
    jr["outcome"] = outcome_token(r.outcome);
    jr["origin"] = r.origin == FaultClassKind::Experiment ? "E" : "P";
    os << jr.dump() << '\n';
  }
}

inline void save_campaign(const CampaignResult& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CampaignIoError("cannot open '" + path + "' for writing");
  save_campaign(c, os);
  if (!os) throw CampaignIoError("write to '" + path + "' failed");
}

inline CampaignResult load_campaign(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw CampaignIoError("empty result file");
  CampaignResult c;
  try {
    auto header = nlohmann::json::parse(line);
    if (header.at("format_version").get<int>() != 1)
      throw CampaignIoError("unsupported format_version");
    c.program_digest = header.at("program_digest").get<std::string>();
    c.total_steps = header.at("T").get<uint64_t>();
    c.workload_steps = header.at("workload_steps").get<uint64_t>();
    c.total_bits = header.at("total_bits").get<uint32_t>();
    for (const auto& ja : header.at("assertions")) {
      AssertionMeta a;
      a.index = ja.at("index").get<uint32_t>();
      a.id = ja.at("id").get<std::string>();
      for (const auto& jw : ja.at("windows"))
        a.windows.push_back({jw.at(0).get<uint64_t>(), jw.at(1).get<uint64_t>()});
      c.assertions.push_back(std::move(a));
    }
    if (header.contains("memory_map")) {
      uint32_t next = 0;
      for (const auto& js : header["memory_map"]) {
        MemorySpan s;
        s.name = js.at("name").get<std::string>();
        s.first_bit = js.at("first_bit").get<uint32_t>();
        s.width = js.at("width").get<uint32_t>();
        s.length = js.at("length").get<uint32_t>();
        next = std::max(next, s.first_bit + s.bit_count());
        c.memory.spans.push_back(std::move(s));
      }
      c.memory.total_bits = next;
    }
    size_t line_no = 1;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto jr = nlohmann::json::parse(line);
      FaultRecord r;
      r.bit = jr.at("bit").get<uint32_t>();
      r.lo = jr.at("lo").get<uint64_t>();
      r.hi = jr.at("hi").get<uint64_t>();
      r.rep_t = jr.at("rep_t").get<uint64_t>();
      for (const auto& jd : jr.at("detectors"))
        r.detectors.push_back({jd.at(0).get<uint32_t>(), jd.at(1).get<uint64_t>()});
      r.outcome = outcome_from_token(jr.at("outcome").get<std::string>());
      std::string origin = jr.at("origin").get<std::string>();
      if (origin == "E") r.origin = FaultClassKind::Experiment;
      else if (origin == "P") r.origin = FaultClassKind::PrunedBenign;
      else throw CampaignIoError("unknown origin '" + origin + "'");
      c.records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CampaignIoError(std::string("malformed result file: ") + e.what());
  }
  return c;
}

inline CampaignResult load_campaign(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CampaignIoError("cannot open '" + path + "'");
  return load_campaign(is);
}

}  // namespace detox
