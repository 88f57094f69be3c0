#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace detox {

// Half-open [lo, hi) over time steps.
struct Interval {
  uint64_t lo = 0;
  uint64_t hi = 0;
  uint64_t length() const { return hi - lo; }
  bool empty() const { return hi <= lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Sorted, disjoint, non-adjacent, non-empty.
inline std::vector<Interval> normalize(std::vector<Interval> xs) {
  std::erase_if(xs, [](const Interval& v) { return v.empty(); });
  std::sort(xs.begin(), xs.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const Interval& v : xs) {
    if (!out.empty() && v.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, v.hi);
    else
      out.push_back(v);
  }
  return out;
}

inline uint64_t total_length(const std::vector<Interval>& xs) {
  uint64_t n = 0;
  for (const Interval& v : xs) n += v.length();
  return n;
}

// |iv ∩ union(xs)|, xs normalized
inline uint64_t overlap_length(const Interval& iv, const std::vector<Interval>& xs) {
  uint64_t n = 0;
  for (const Interval& v : xs) {
    uint64_t lo = std::max(iv.lo, v.lo);
    uint64_t hi = std::min(iv.hi, v.hi);
    if (lo < hi) n += hi - lo;
  }
  return n;
}

// pieces of iv not covered by xs, xs normalized
inline std::vector<Interval> subtract(const Interval& iv, const std::vector<Interval>& xs) {
  std::vector<Interval> out;
  uint64_t cursor = iv.lo;
  for (const Interval& v : xs) {
    if (v.hi <= cursor) continue;
    if (v.lo >= iv.hi) break;
    if (v.lo > cursor) out.push_back({cursor, std::min(v.lo, iv.hi)});
    cursor = std::max(cursor, v.hi);
    if (cursor >= iv.hi) break;
  }
  if (cursor < iv.hi) out.push_back({cursor, iv.hi});
  return out;
}

}  // namespace detox
