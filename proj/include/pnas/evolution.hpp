#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "pnas/arch.hpp"
#include "pnas/cost.hpp"
#include "pnas/pareto.hpp"
#include "pnas/proxies.hpp"
#include "pnas/rng.hpp"

namespace pnas {

struct SearchSettings {
  int n_iter = 30;
  int population = 100;
  int parents = 20;
  int mutated_per_iter = 40;
  int crossover_per_iter = 40;
  double mutation_prob = 0.3;
  std::optional<double> latency_cap_ms;
  std::optional<std::int64_t> memory_cap_bytes;
  std::uint64_t rng_seed = 0;
  FrontierMode frontier_mode = FrontierMode::NonDominated;
};

void to_json(nlohmann::json& j, const SearchSettings& s);
void from_json(const nlohmann::json& j, SearchSettings& s);

// Accepts "nd" / "non_dominated" and "hull" / "lower_convex_hull".
FrontierMode frontier_mode_from_string(const std::string& s);

// Every gene draw happens in a fixed order (n_layer, d_model, per-layer heads,
// per-layer inner widths, d_embed, k) so a seeded run is reproducible. Genes
// invalidated by an earlier draw (head no longer divides d_model, inner width
// under the 2*d_model floor, stale list length) are repaired afterwards.
ArchConfig mutate(const ArchConfig& parent, const SearchSpace& space, double prob, Rng& rng);

// Uniform per-gene crossover over the same gene order. Where only one parent
// has a layer at index i its gene is taken outright; repairs prefer the other
// parent's gene before resampling.
ArchConfig crossover(const ArchConfig& a, const ArchConfig& b, const SearchSpace& space,
                     Rng& rng);

struct EvaluatedCandidate {
  ArchConfig config;
  std::string key;
  ProxyScore proxy;
  CostSample cost;
  int iteration_added = 0;
};

struct IterationRecord {
  int iteration = 0;
  int evaluated = 0;
  int discarded = 0;
  int frontier_size = 0;
  double hypervolume = 0.0;
};

// Fixed reference point for the per-iteration hypervolume: any candidate that
// does not weakly dominate it is left out of the volume (never of the frontier).
inline constexpr double kLogHvRefScore = 0.0;
inline constexpr double kLogHvRefLatencyMs = 1e9;
inline constexpr double kLogHvRefMemoryBytes = 1e15;

struct SearchResult {
  std::vector<EvaluatedCandidate> archive;      // insertion order, unique keys
  std::vector<ObjectivePoint> frontier;         // payload = config key
  std::vector<IterationRecord> log;             // one record per completed iteration
  bool exhausted = false;
  std::int64_t evaluated_total = 0;
  std::int64_t discarded_total = 0;
  std::vector<std::string> eval_errors;         // first few failure messages

  const EvaluatedCandidate& by_key(const std::string& key) const;  // MissingEntry

  std::unordered_map<std::string, std::size_t> index_by_key;
};

using ProxyFn = std::function<ProxyScore(const ArchConfig&)>;
using CostFn = std::function<CostSample(const ArchConfig&)>;

// Evolutionary Pareto search. Iteration 0 evaluates `population` random
// samples; each later iteration draws parents from the current frontier and
// evaluates population-minus-parents children (mutations, crossovers, then
// random fills; de-duplicated by config_key against the archive). Candidates
// whose evaluation throws or that break a cap are discarded before they reach
// the archive. Stops with exhausted=true when de-duplication cannot produce a
// single new candidate. jobs>1 with parallel_eval runs proxy_fn/cost_fn from a
// worker pool; results are merged in candidate order either way.
SearchResult run_search(const SearchSpace& space, const SearchSettings& settings,
                        const ProxyFn& proxy_fn, const CostFn& cost_fn, int jobs = 1,
                        bool parallel_eval = false);

ObjectivePoint to_objective(const EvaluatedCandidate& c);

}  // namespace pnas
