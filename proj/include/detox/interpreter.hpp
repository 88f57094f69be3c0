#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "detox/ast.hpp"
#include "detox/configuration.hpp"
#include "detox/digest.hpp"

namespace detox {

enum class AccessMode : uint8_t { Read = 1, Write = 2, ReadWrite = 3 };

struct BitAccess {
  uint64_t step = 0;
  uint32_t bit = 0;
  AccessMode mode = AccessMode::Read;
  friend bool operator==(const BitAccess&, const BitAccess&) = default;
};

struct MemorySpan {
  std::string name;
  uint32_t first_bit = 0;
  uint32_t width = 8;
  uint32_t length = 1;
  uint32_t bit_count() const { return width * length; }
  friend bool operator==(const MemorySpan&, const MemorySpan&) = default;
};

struct MemoryMap {
  std::vector<MemorySpan> spans;
  uint32_t total_bits = 0;
  friend bool operator==(const MemoryMap&, const MemoryMap&) = default;
};

inline MemoryMap build_memory_map(const Program& p) {
  MemoryMap m;
  uint32_t next = 0;
  for (const VarDecl& v : p.vars) {
    m.spans.push_back({v.name, next, v.width, v.length});
    next += v.width * v.length;
  }
  m.total_bits = next;
  return m;
}

// One dynamic execution of an assert statement. The statement occupies
// [t_start, t_end); the predicate is evaluated at t_end - 1.
struct AssertionWindow {
  uint32_t assertion = 0;
  uint32_t instance = 0;
  uint64_t t_start = 0;
  uint64_t t_end = 0;
  friend bool operator==(const AssertionWindow&, const AssertionWindow&) = default;
};

struct GoldenTrace {
  uint64_t total_steps = 0;
  uint64_t workload_steps = 0;  // steps not spent inside assert statements
  MemoryMap memory;
  std::vector<BitAccess> accesses;  // sorted by (step, bit)
  std::vector<AssertionWindow> windows;
  std::vector<uint32_t> outputs;
};

struct RunLimits {
  uint64_t max_steps = 10'000'000;
};

enum class GoldenRunErrorKind : uint8_t { Trap, StepLimit };

class GoldenRunError : public std::runtime_error {
 public:
  GoldenRunError(GoldenRunErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  GoldenRunErrorKind kind() const { return kind_; }

 private:
  GoldenRunErrorKind kind_;
};

enum class Outcome : uint8_t { Benign, Sdc, Trap, Timeout };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Benign: return "benign";
    case Outcome::Sdc: return "sdc";
    case Outcome::Trap: return "trap";
    case Outcome::Timeout: return "timeout";
  }
  return "?";
}

struct Detection {
  uint32_t assertion = 0;
  uint64_t step = 0;
  friend bool operator==(const Detection&, const Detection&) = default;
};

// In discovery runs `outcome` is what the run ends as when every failing
// assertion is merely recorded; `detectors` lists each failing assertion once,
// at its first failing step. A deployment run aborts at the first failing
// enabled assertion instead, leaving outcome Benign.
struct ExperimentResult {
  std::vector<Detection> detectors;
  Outcome outcome = Outcome::Benign;
  bool detected() const { return !detectors.empty(); }
  friend bool operator==(const ExperimentResult&, const ExperimentResult&) = default;
};

struct DiscoveryMode {};
struct DeploymentMode {
  Configuration config;
};
using RunMode = std::variant<DiscoveryMode, DeploymentMode>;

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Fault {
  uint64_t t = 0;
  uint32_t bit = 0;
};

struct TrapSignal {};
struct PredicateTrapSignal {};
struct TimeoutSignal {};
struct StepLimitSignal {};
struct AbortSignal {
  uint32_t assertion;
  uint64_t step;
};

class Executor {
 public:
  Executor(const Program& p, const MemoryMap& memory) : program_(&p), memory_(&memory) {
    slot_of_bit_.resize(memory.total_bits);
    uint32_t slot = 0;
    for (const MemorySpan& span : memory.spans) {
      slot_base_.push_back(slot);
      for (uint32_t e = 0; e < span.length; ++e, ++slot) {
        slot_first_bit_.push_back(span.first_bit + e * span.width);
        slot_width_.push_back(span.width);
        for (uint32_t b = 0; b < span.width; ++b)
          slot_of_bit_[span.first_bit + e * span.width + b] = slot;
      }
    }
    values_.assign(slot, 0);
  }

  // knobs, set before run()
  std::optional<Fault> fault;
  std::optional<Configuration> config;        // set: deployment, unset: discovery
  std::optional<uint64_t> workload_budget;    // exceeding it is a timeout
  std::optional<uint64_t> step_limit;         // exceeding it is a hard error
  const std::vector<uint32_t>* expected_outputs = nullptr;
  bool record_trace = false;
  bool collect_state_hashes = false;  // one hash per workload step

  struct RunOutput {
    Outcome outcome = Outcome::Benign;
    std::vector<Detection> detections;
    bool aborted = false;  // deployment run stopped by an enabled detection
    bool step_limit_hit = false;
    uint64_t total_steps = 0;
    uint64_t workload_steps = 0;
    std::vector<uint32_t> outputs;
  };

  RunOutput run() {
    RunOutput out;
    try {
      exec_decls();
      exec_block(program_->body);
      if (expected_outputs && outputs_ != *expected_outputs)
        out.outcome = Outcome::Sdc;
    } catch (const TrapSignal&) {
      out.outcome = Outcome::Trap;
    } catch (const TimeoutSignal&) {
      out.outcome = Outcome::Timeout;
    } catch (const StepLimitSignal&) {
      out.step_limit_hit = true;
    } catch (const AbortSignal& a) {
      detections_.assign(1, {a.assertion, a.step});
      out.aborted = true;
    }
    out.detections = std::move(detections_);
    out.total_steps = now_;
    out.workload_steps = workload_now_;
    out.outputs = std::move(outputs_);
    return out;
  }

  // trace data, valid after run() when record_trace
  std::vector<BitAccess> accesses;
  std::vector<AssertionWindow> windows;
  std::vector<uint64_t> state_hashes;

 private:
  const Program* program_;
  const MemoryMap* memory_;
  std::vector<uint32_t> values_;          // one per element slot
  std::vector<uint32_t> slot_base_;       // var index -> first slot
  std::vector<uint32_t> slot_first_bit_;  // slot -> global bit of its bit 0
  std::vector<uint32_t> slot_width_;
  std::vector<uint32_t> slot_of_bit_;
  uint64_t now_ = 0;
  uint64_t workload_now_ = 0;
  std::vector<uint32_t> outputs_;
  std::vector<Detection> detections_;
  std::vector<uint8_t> seen_assertion_;
  std::vector<uint32_t> instance_count_;
  std::map<uint32_t, uint8_t> step_accesses_;  // bit -> mode, this step only

  void begin_step() {
    if (fault && now_ == fault->t) {
      uint32_t slot = slot_of_bit_.at(fault->bit);
      values_[slot] ^= 1u << (fault->bit - slot_first_bit_[slot]);
    }
  }

  void end_step(bool workload) {
    if (record_trace) {
      for (auto [bit, mode] : step_accesses_)
        accesses.push_back({now_, bit, static_cast<AccessMode>(mode)});
      step_accesses_.clear();
    }
    ++now_;
    if (workload) {
      ++workload_now_;
      if (collect_state_hashes) state_hashes.push_back(memory_hash());
      if (workload_budget && workload_now_ > *workload_budget) throw TimeoutSignal{};
    }
    if (step_limit && now_ > *step_limit) throw StepLimitSignal{};
  }

  void idle(uint32_t n, bool workload) {
    for (uint32_t k = 0; k < n; ++k) {
      begin_step();
      end_step(workload);
    }
  }

  uint64_t memory_hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint32_t v : values_) {
      for (int i = 0; i < 4; ++i) {
        h ^= (v >> (8 * i)) & 0xFF;
        h *= 0x100000001b3ull;
      }
    }
    return h;
  }

  void log_access(uint32_t slot, AccessMode mode) {
    if (!record_trace) return;
    uint32_t first = slot_first_bit_[slot];
    for (uint32_t b = 0; b < slot_width_[slot]; ++b) {
      uint8_t& m = step_accesses_[first + b];
      m |= static_cast<uint8_t>(mode);
    }
  }

  uint32_t element_slot(uint32_t var, uint64_t index, bool predicate_ctx) {
    const VarDecl& decl = program_->vars[var];
    if (index >= decl.length) {
      if (predicate_ctx) throw PredicateTrapSignal{};
      throw TrapSignal{};
    }
    return slot_base_[var] + static_cast<uint32_t>(index);
  }

  uint32_t load(uint32_t slot) {
    log_access(slot, AccessMode::Read);
    return values_[slot];
  }

  void store(uint32_t slot, uint64_t value) {
    log_access(slot, AccessMode::Write);
    uint32_t width = slot_width_[slot];
    uint64_t mask = (width >= 32) ? 0xFFFFFFFFull : ((1ull << width) - 1);
    values_[slot] = static_cast<uint32_t>(value & mask);
  }

  uint64_t eval(ExprId id, bool predicate_ctx) {
    const Expr& e = program_->exprs[id];
    return std::visit(
        overloaded{
            [&](const ConstExpr& c) -> uint64_t { return c.value; },
            [&](const VarExpr& v) -> uint64_t { return load(slot_base_[v.var]); },
            [&](const IndexExpr& x) -> uint64_t {
              uint64_t idx = eval(x.index, predicate_ctx);
              return load(element_slot(x.var, idx, predicate_ctx));
            },
            [&](const NotExpr& n) -> uint64_t {
              return eval(n.operand, predicate_ctx) == 0 ? 1 : 0;
            },
            [&](const BinaryExpr& b) -> uint64_t {
              uint64_t l = eval(b.lhs, predicate_ctx);
              uint64_t r = eval(b.rhs, predicate_ctx);
              constexpr uint64_t kMask = 0xFFFFFFFFull;
              switch (b.op) {
                case BinaryOp::Add: return (l + r) & kMask;
                case BinaryOp::Sub: return (l - r) & kMask;
                case BinaryOp::Mul: return (l * r) & kMask;
                case BinaryOp::Div:
                  if (r == 0) {
                    if (predicate_ctx) throw PredicateTrapSignal{};
                    throw TrapSignal{};
                  }
                  return l / r;
                case BinaryOp::Mod:
                  if (r == 0) {
                    if (predicate_ctx) throw PredicateTrapSignal{};
                    throw TrapSignal{};
                  }
                  return l % r;
                case BinaryOp::Eq: return l == r;
                case BinaryOp::Ne: return l != r;
                case BinaryOp::Lt: return l < r;
                case BinaryOp::Le: return l <= r;
                case BinaryOp::Gt: return l > r;
                case BinaryOp::Ge: return l >= r;
                case BinaryOp::And: return (l != 0 && r != 0) ? 1 : 0;
                case BinaryOp::Or: return (l != 0 || r != 0) ? 1 : 0;
              }
              return 0;
            },
        },
        e);
  }

  void exec_decls() {
    for (uint32_t v = 0; v < program_->vars.size(); ++v) {
      const VarDecl& decl = program_->vars[v];
      begin_step();
      for (uint32_t e = 0; e < decl.length; ++e)
        store(slot_base_[v] + e, decl.init[e]);
      end_step(true);
    }
  }

  void exec_block(const std::vector<StmtId>& block) {
    for (StmtId s : block) exec_stmt(s);
  }

  void on_assert_fail(uint32_t assertion, uint64_t step) {
    if (config) {
      if (config->enabled(assertion)) throw AbortSignal{assertion, step};
      return;
    }
    if (seen_assertion_.empty()) seen_assertion_.assign(program_->assertions.size(), 0);
    if (!seen_assertion_[assertion]) {
      seen_assertion_[assertion] = 1;
      detections_.push_back({assertion, step});
    }
  }

  void exec_stmt(StmtId sid) {
    std::visit(
        overloaded{
            [&](const AssignStmt& s) {
              idle(s.cost - 1, true);
              begin_step();
              uint64_t v = eval(s.value, false);
              uint64_t idx = 0;
              if (s.target.indexed) idx = eval(s.target.index, false);
              store(element_slot(s.target.var, s.target.indexed ? idx : 0, false), v);
              end_step(true);
            },
            [&](const OutputStmt& s) {
              idle(s.cost - 1, true);
              begin_step();
              outputs_.push_back(static_cast<uint32_t>(eval(s.value, false)));
              end_step(true);
            },
            [&](const AssertStmt& s) {
              const AssertionDecl& a = program_->assertions[s.assertion];
              uint64_t t_start = now_;
              idle(a.cost - 1, false);
              begin_step();
              bool ok;
              try {
                ok = eval(a.predicate, true) != 0;
              } catch (const PredicateTrapSignal&) {
                ok = false;
              }
              if (record_trace) {
                if (instance_count_.empty())
                  instance_count_.assign(program_->assertions.size(), 0);
                windows.push_back(
                    {s.assertion, instance_count_[s.assertion]++, t_start, t_start + a.cost});
              }
              uint64_t fail_step = now_;
              end_step(false);
              if (!ok) on_assert_fail(s.assertion, fail_step);
            },
            [&](const IfStmt& s) {
              begin_step();
              uint64_t c = eval(s.cond, false);
              end_step(true);
              exec_block(c != 0 ? s.then_block : s.else_block);
            },
            [&](const WhileStmt& s) {
              for (;;) {
                begin_step();
                uint64_t c = eval(s.cond, false);
                end_step(true);
                if (c == 0) break;
                exec_block(s.block);
              }
            },
        },
        program_->stmts[sid]);
  }
};

}  // namespace detail

inline GoldenTrace golden_run(const Program& p, const RunLimits& limits = {}) {
  GoldenTrace trace;
  trace.memory = build_memory_map(p);
  detail::Executor ex(p, trace.memory);
  ex.record_trace = true;
  ex.step_limit = limits.max_steps;
  auto out = ex.run();
  if (out.outcome == Outcome::Trap)
    throw GoldenRunError(GoldenRunErrorKind::Trap,
                         "fault-free run traps; the workload is broken");
  if (out.step_limit_hit)
    throw GoldenRunError(GoldenRunErrorKind::StepLimit,
                         "fault-free run exceeded " + std::to_string(limits.max_steps) +
                             " steps");
  trace.total_steps = out.total_steps;
  trace.workload_steps = out.workload_steps;
  trace.accesses = std::move(ex.accesses);
  trace.windows = std::move(ex.windows);
  trace.outputs = std::move(out.outputs);
  return trace;
}

// Runs the workload with one bit flipped just before the step at `step`
// executes. Coordinates must satisfy step < golden.total_steps and
// bit < golden.memory.total_bits.
inline ExperimentResult run_experiment(const Program& p, const GoldenTrace& golden,
                                       uint64_t step, uint32_t bit, const RunMode& mode,
                                       double timeout_factor = 10.0) {
  if (step >= golden.total_steps) throw std::invalid_argument("fault step out of range");
  if (bit >= golden.memory.total_bits) throw std::invalid_argument("fault bit out of range");
  detail::Executor ex(p, golden.memory);
  ex.fault = detail::Fault{step, bit};
  ex.expected_outputs = &golden.outputs;
  ex.workload_budget =
      static_cast<uint64_t>(timeout_factor * static_cast<double>(golden.workload_steps));
  if (const auto* dep = std::get_if<DeploymentMode>(&mode)) {
    if (dep->config.size() != p.assertions.size())
      throw std::invalid_argument("configuration size does not match assertion count");
    ex.config = dep->config;
  }
  auto out = ex.run();
  ExperimentResult r;
  r.detectors = std::move(out.detections);
  r.outcome = out.aborted ? Outcome::Benign : out.outcome;
  return r;
}

}  // namespace detox
