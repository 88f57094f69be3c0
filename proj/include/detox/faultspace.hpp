#pragma once

#include <cstdint>
#include <vector>

#include "detox/interpreter.hpp"

namespace detox {

enum class FaultClassKind : uint8_t { Experiment, PrunedBenign };

// A maximal run of injection times on one bit that all behave like injecting
// at rep_t. The interval ends right after an access; if that access only
// wrote the bit, every flip inside is overwritten before anything reads it.
struct FaultClass {
  uint32_t bit = 0;
  uint64_t lo = 0;
  uint64_t hi = 0;
  uint64_t rep_t = 0;  // hi - 1
  FaultClassKind kind = FaultClassKind::PrunedBenign;
  uint64_t weight() const { return hi - lo; }
  friend bool operator==(const FaultClass&, const FaultClass&) = default;
};

inline uint64_t total_area(const GoldenTrace& trace) {
  return trace.total_steps * trace.memory.total_bits;
}

// Per bit, a partition of [0, total_steps) ordered by (bit, lo).
inline std::vector<FaultClass> build_classes(const GoldenTrace& trace) {
  std::vector<std::vector<const BitAccess*>> per_bit(trace.memory.total_bits);
  for (const BitAccess& a : trace.accesses) per_bit[a.bit].push_back(&a);

  std::vector<FaultClass> out;
  for (uint32_t bit = 0; bit < trace.memory.total_bits; ++bit) {
    uint64_t prev = 0;
    for (const BitAccess* a : per_bit[bit]) {
      uint64_t hi = a->step + 1;
      FaultClassKind kind = a->mode == AccessMode::Write ? FaultClassKind::PrunedBenign
                                                         : FaultClassKind::Experiment;
      out.push_back({bit, prev, hi, hi - 1, kind});
      prev = hi;
    }
    if (prev < trace.total_steps)
      out.push_back({bit, prev, trace.total_steps, trace.total_steps - 1,
                     FaultClassKind::PrunedBenign});
  }
  return out;
}

}  // namespace detox
