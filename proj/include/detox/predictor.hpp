#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "detox/campaign.hpp"
#include "detox/configuration.hpp"
#include "detox/interval.hpp"

namespace detox {

struct PredictedCounts {
  uint64_t sdc = 0;
  uint64_t detected = 0;
  uint64_t benign = 0;
  uint64_t trap = 0;
  uint64_t timeout = 0;
  uint64_t runtime = 0;
  uint64_t area = 0;  // runtime * total_bits
  friend bool operator==(const PredictedCounts&, const PredictedCounts&) = default;
};

enum class CellClass : uint8_t { Sdc, Detected, Benign, Trap, Timeout };

inline void check_config(const CampaignResult& campaign, const Configuration& c) {
  if (c.size() != campaign.assertions.size())
    throw std::invalid_argument("configuration has " + std::to_string(c.size()) +
                                " bits, campaign has " +
                                std::to_string(campaign.assertions.size()) + " assertions");
}

// Time steps that cease to exist under c: every dynamic window of every
// disabled assertion. Disjoint because assert executions never overlap.
inline std::vector<Interval> excluded_times(const CampaignResult& campaign,
                                            const Configuration& c) {
  check_config(campaign, c);
  std::vector<Interval> xs;
  for (const AssertionMeta& a : campaign.assertions)
    if (!c.enabled(a.index))
      for (const Interval& w : a.windows) xs.push_back(w);
  return normalize(std::move(xs));
}

inline size_t enabled_detector_count(const FaultRecord& r, const Configuration& c) {
  size_t n = 0;
  for (const Detection& d : r.detectors)
    if (c.enabled(d.assertion)) ++n;
  return n;
}

// DETECTED if any enabled assertion caught it; otherwise the cell reverts to
// the outcome the discovery run recorded after carrying on.
inline CellClass classify(const FaultRecord& r, const Configuration& c) {
  if (enabled_detector_count(r, c) > 0) return CellClass::Detected;
  switch (r.outcome) {
    case Outcome::Benign: return CellClass::Benign;
    case Outcome::Sdc: return CellClass::Sdc;
    case Outcome::Trap: return CellClass::Trap;
    case Outcome::Timeout: return CellClass::Timeout;
  }
  return CellClass::Benign;
}

inline PredictedCounts predict(const CampaignResult& campaign, const Configuration& c) {
  std::vector<Interval> excluded = excluded_times(campaign, c);
  PredictedCounts out;
  out.runtime = campaign.total_steps - total_length(excluded);
  out.area = out.runtime * campaign.total_bits;
  for (const FaultRecord& r : campaign.records) {
    uint64_t w = r.weight() - overlap_length({r.lo, r.hi}, excluded);
    if (w == 0) continue;
    switch (classify(r, c)) {
      case CellClass::Sdc: out.sdc += w; break;
      case CellClass::Detected: out.detected += w; break;
      case CellClass::Benign: out.benign += w; break;
      case CellClass::Trap: out.trap += w; break;
      case CellClass::Timeout: out.timeout += w; break;
    }
  }
  return out;
}

inline std::map<std::string, PredictedCounts> predict_all(const CampaignResult& campaign,
                                                          size_t max_n = 20) {
  size_t n = campaign.assertions.size();
  if (n > max_n)
    throw std::invalid_argument("refusing to enumerate 2^" + std::to_string(n) +
                                " configurations (threshold " + std::to_string(max_n) + ")");
  std::map<std::string, PredictedCounts> out;
  for (uint64_t k = 0; k < (1ull << n); ++k) {
    Configuration c = Configuration::from_index(k, n);
    out.emplace(c.to_string(), predict(campaign, c));
  }
  return out;
}

}  // namespace detox
