#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "detox/campaign.hpp"
#include "detox/configuration.hpp"
#include "detox/predictor.hpp"

namespace detox {

enum class SearchMethod : uint8_t { Exhaustive, Greedy, Ga };

inline const char* search_method_name(SearchMethod m) {
  switch (m) {
    case SearchMethod::Exhaustive: return "exhaustive";
    case SearchMethod::Greedy: return "greedy";
    case SearchMethod::Ga: return "ga";
  }
  return "?";
}

struct SearchOutcome {
  Configuration best;
  PredictedCounts best_counts;
  uint64_t evaluations = 0;  // distinct configurations predicted
  SearchMethod method = SearchMethod::Exhaustive;
  std::vector<uint64_t> trace;  // best sdc per iteration, when iterative
};

namespace detail {

// Strict total order: lower sdc, then fewer enabled assertions, then the
// lexicographically smaller bit string.
inline bool config_better(const PredictedCounts& a, const Configuration& ca,
                          const PredictedCounts& b, const Configuration& cb) {
  if (a.sdc != b.sdc) return a.sdc < b.sdc;
  size_t ea = ca.enabled_count();
  size_t eb = cb.enabled_count();
  if (ea != eb) return ea < eb;
  return ca.to_string() < cb.to_string();
}

class Evaluator {
 public:
  explicit Evaluator(const CampaignResult& campaign) : campaign_(&campaign) {}

  const PredictedCounts& counts(const Configuration& c) {
    auto [it, fresh] = cache_.try_emplace(c.to_string());
    if (fresh) {
      it->second = predict(*campaign_, c);
      ++evaluations;
    }
    return it->second;
  }

  uint64_t evaluations = 0;

 private:
  const CampaignResult* campaign_;
  std::map<std::string, PredictedCounts> cache_;
};

// std distributions vary across standard libraries; these do not.
inline uint64_t rng_index(std::mt19937_64& rng, uint64_t n) { return rng() % n; }
inline double rng_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline SearchOutcome exhaustive_search(const CampaignResult& campaign, size_t max_n = 20) {
  size_t n = campaign.assertions.size();
  if (n > max_n)
    throw std::invalid_argument("refusing exhaustive search over 2^" + std::to_string(n) +
                                " configurations (threshold " + std::to_string(max_n) + ")");
  detail::Evaluator eval(campaign);
  SearchOutcome out;
  out.method = SearchMethod::Exhaustive;
  for (uint64_t k = 0; k < (1ull << n); ++k) {
    Configuration c = Configuration::from_index(k, n);
    const PredictedCounts& pc = eval.counts(c);
    if (k == 0 || detail::config_better(pc, c, out.best_counts, out.best)) {
      out.best = c;
      out.best_counts = pc;
    }
  }
  out.evaluations = eval.evaluations;
  return out;
}

// Hill climbing from all-enabled over the 1-flip neighborhood, moving while
// the order key improves. A flip that keeps sdc equal but drops an enabled
// assertion counts as an improvement, so detection-free assertions get
// switched off.
inline SearchOutcome greedy_search(const CampaignResult& campaign) {
  size_t n = campaign.assertions.size();
  detail::Evaluator eval(campaign);
  SearchOutcome out;
  out.method = SearchMethod::Greedy;

  Configuration current = Configuration::all_enabled(n);
  PredictedCounts current_counts = eval.counts(current);
  out.trace.push_back(current_counts.sdc);

  for (;;) {
    bool moved = false;
    Configuration best_next = current;
    PredictedCounts best_next_counts = current_counts;
    for (size_t i = 0; i < n; ++i) {
      Configuration neighbor = current;
      neighbor.set(i, !neighbor.enabled(i));
      const PredictedCounts& pc = eval.counts(neighbor);
      if (detail::config_better(pc, neighbor, best_next_counts, best_next)) {
        best_next = neighbor;
        best_next_counts = pc;
        moved = true;
      }
    }
    if (!moved) break;
    current = best_next;
    current_counts = best_next_counts;
    out.trace.push_back(current_counts.sdc);
  }

  out.best = current;
  out.best_counts = current_counts;
  out.evaluations = eval.evaluations;
  return out;
}

struct GaParams {
  uint32_t population = 32;
  uint32_t generations = 100;
  double mutation_rate = -1.0;  // negative: use 1/N
  double crossover_rate = 0.9;
  uint64_t seed = 1;
};

inline SearchOutcome ga_search(const CampaignResult& campaign, const GaParams& params = {}) {
  if (params.population < 2) throw std::invalid_argument("GA population must be at least 2");
  if (params.crossover_rate < 0.0 || params.crossover_rate > 1.0)
    throw std::invalid_argument("GA crossover rate must be in [0,1]");
  if (params.mutation_rate > 1.0)
    throw std::invalid_argument("GA mutation rate must be at most 1");

  size_t n = campaign.assertions.size();
  double mutation = params.mutation_rate >= 0.0
                        ? params.mutation_rate
                        : (n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  std::mt19937_64 rng(params.seed);
  detail::Evaluator eval(campaign);

  std::vector<Configuration> pop;
  pop.reserve(params.population);
  pop.push_back(Configuration::all_enabled(n));
  pop.push_back(Configuration::all_disabled(n));
  while (pop.size() < params.population) {
    std::vector<uint8_t> bits(n);
    for (size_t i = 0; i < n; ++i) bits[i] = static_cast<uint8_t>(rng() & 1);
    pop.emplace_back(std::move(bits));
  }

  SearchOutcome out;
  out.method = SearchMethod::Ga;
  out.best = pop[0];
  out.best_counts = eval.counts(pop[0]);
  auto consider = [&](const Configuration& c) {
    const PredictedCounts& pc = eval.counts(c);
    if (detail::config_better(pc, c, out.best_counts, out.best)) {
      out.best = c;
      out.best_counts = pc;
    }
  };
  for (const Configuration& c : pop) consider(c);

  auto tournament = [&]() -> const Configuration& {
    const Configuration& a = pop[detail::rng_index(rng, pop.size())];
    const Configuration& b = pop[detail::rng_index(rng, pop.size())];
    return detail::config_better(eval.counts(a), a, eval.counts(b), b) ? a : b;
  };

  for (uint32_t gen = 0; gen < params.generations; ++gen) {
    size_t elite = 0;
    for (size_t i = 1; i < pop.size(); ++i)
      if (detail::config_better(eval.counts(pop[i]), pop[i], eval.counts(pop[elite]),
                                pop[elite]))
        elite = i;

    std::vector<Configuration> next;
    next.reserve(params.population);
    next.push_back(pop[elite]);
    while (next.size() < params.population) {
      const Configuration& p1 = tournament();
      const Configuration& p2 = tournament();
      std::vector<uint8_t> bits(n);
      bool cross = detail::rng_unit(rng) < params.crossover_rate;
      for (size_t i = 0; i < n; ++i) {
        bool from_p2 = cross && (rng() & 1);
        bits[i] = (from_p2 ? p2 : p1).enabled(i) ? 1 : 0;
      }
      for (size_t i = 0; i < n; ++i)
        if (detail::rng_unit(rng) < mutation) bits[i] ^= 1;
      next.emplace_back(std::move(bits));
    }
    pop = std::move(next);
    for (const Configuration& c : pop) consider(c);
    out.trace.push_back(out.best_counts.sdc);
  }

  out.evaluations = eval.evaluations;
  return out;
}

}  // namespace detox
