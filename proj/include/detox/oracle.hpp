#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detox/campaign.hpp"
#include "detox/configuration.hpp"
#include "detox/faultspace.hpp"
#include "detox/interpreter.hpp"
#include "detox/predictor.hpp"

namespace detox {

using TrueCounts = PredictedCounts;

struct StripResult {
  Program program;
  std::vector<uint32_t> original_index;  // variant assertion index -> original index
};

// Removes every disabled assert statement. Declarations and everything else
// stay put, so the variant's memory layout matches the original.
inline StripResult strip(const Program& p, const Configuration& c) {
  if (c.size() != p.assertions.size())
    throw std::invalid_argument("configuration has " + std::to_string(c.size()) +
                                " bits, program has " + std::to_string(p.assertions.size()) +
                                " assertions");
  StripResult out;
  out.program.vars = p.vars;
  out.program.exprs = p.exprs;
  out.program.source_digest = p.source_digest;

  constexpr uint32_t kDropped = 0xFFFFFFFF;
  std::vector<uint32_t> remap(p.assertions.size(), kDropped);
  for (uint32_t i = 0; i < p.assertions.size(); ++i) {
    if (!c.enabled(i)) continue;
    remap[i] = static_cast<uint32_t>(out.program.assertions.size());
    out.program.assertions.push_back(p.assertions[i]);
    out.original_index.push_back(i);
  }

  auto clone_block = [&](auto&& self, const std::vector<StmtId>& block) -> std::vector<StmtId> {
    std::vector<StmtId> nb;
    for (StmtId sid : block) {
      const Stmt& st = p.stmts[sid];
      if (const auto* a = std::get_if<AssertStmt>(&st)) {
        if (remap[a->assertion] == kDropped) continue;
        out.program.stmts.push_back(AssertStmt{remap[a->assertion]});
      } else if (const auto* f = std::get_if<IfStmt>(&st)) {
        IfStmt ns;
        ns.cond = f->cond;
        ns.then_block = self(self, f->then_block);
        ns.else_block = self(self, f->else_block);
        out.program.stmts.push_back(std::move(ns));
      } else if (const auto* w = std::get_if<WhileStmt>(&st)) {
        WhileStmt ns;
        ns.cond = w->cond;
        ns.block = self(self, w->block);
        out.program.stmts.push_back(std::move(ns));
      } else {
        out.program.stmts.push_back(st);
      }
      nb.push_back(static_cast<StmtId>(out.program.stmts.size() - 1));
    }
    return nb;
  };
  out.program.body = clone_block(clone_block, p.body);
  return out;
}

// Full pruned campaign on the stripped variant, every remaining assertion
// armed: the first failing one classifies the cell DETECTED and ends the run.
inline TrueCounts ground_truth(const Program& p, const Configuration& c,
                               const CampaignOptions& opts = {}) {
  StripResult variant = strip(p, c);
  GoldenTrace golden = golden_run(variant.program, opts.limits);
  std::vector<FaultClass> classes = build_classes(golden);
  RunMode mode = DeploymentMode{Configuration::all_enabled(variant.program.assertions.size())};

  TrueCounts out;
  out.runtime = golden.total_steps;
  out.area = golden.total_steps * golden.memory.total_bits;

  std::vector<size_t> experiments;
  for (size_t i = 0; i < classes.size(); ++i)
    if (classes[i].kind == FaultClassKind::Experiment) experiments.push_back(i);

  std::vector<ExperimentResult> results(classes.size());
  detail::parallel_for(experiments.size(), opts.jobs, [&](size_t k) {
    const FaultClass& fc = classes[experiments[k]];
    results[experiments[k]] = run_experiment(variant.program, golden, fc.rep_t, fc.bit, mode,
                                             opts.timeout_factor);
  });

  for (size_t i = 0; i < classes.size(); ++i) {
    const FaultClass& fc = classes[i];
    uint64_t w = fc.weight();
    if (fc.kind == FaultClassKind::PrunedBenign) {
      out.benign += w;
      continue;
    }
    const ExperimentResult& r = results[i];
    if (r.detected()) {
      out.detected += w;
      continue;
    }
    switch (r.outcome) {
      case Outcome::Benign: out.benign += w; break;
      case Outcome::Sdc: out.sdc += w; break;
      case Outcome::Trap: out.trap += w; break;
      case Outcome::Timeout: out.timeout += w; break;
    }
  }
  return out;
}

}  // namespace detox
