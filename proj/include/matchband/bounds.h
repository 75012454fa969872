#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "matchband/market.h"
#include "matchband/stable_matching.h"

namespace matchband {

struct GapProfile {
  Matching optimal;
  Matching pessimal;
  std::vector<std::vector<double>> optimal_gap;   // mu(i, opt(i)) - mu(i, j)
  std::vector<std::vector<double>> pessimal_gap;  // mu(i, pess(i)) - mu(i, j)
  // Smallest positive optimal gap over all agents; 0 when no agent has one.
  double min_positive_optimal_gap = 0.0;
  // Smallest |mu(i, j) - mu(i, j')| over all agents and arm pairs.
  double min_pairwise_gap = 0.0;

  double MaxOptimalGap(int agent) const;
  double MaxPessimalGap(int agent) const;
};

GapProfile ComputeGaps(const MarketInstance& market);

// Cover of one target set M_{i,l} and the weight it contributes.
struct CoverTerm {
  int agent = 0;
  int arm = 0;
  double gap = 0.0;          // pessimal gap (upper bound) or optimal gap (lower bound)
  double cover_value = 0.0;  // sum of 5 + 6 ln n / gap^2 over the cover
  std::vector<BlockingTriplet> cover;
  bool exact = true;         // false when the greedy heuristic was used
};

struct BoundReport {
  std::string name;
  std::string regret_kind;  // "optimal" or "pessimal"
  std::string direction;    // "upper" or "lower"
  std::int64_t n = 0;
  std::vector<double> values;  // per agent
  std::map<std::string, double> inputs;
  std::vector<CoverTerm> covers;
  bool greedy = false;          // some cover came from the greedy heuristic
  bool fallback = false;        // enumeration cap hit, worst-case values used
  std::vector<std::string> warnings;
  std::string market_digest;
};

// 5 + 6 ln n / gap^2
double TripletWeight(double gap, std::int64_t n);

struct CoverResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<int> chosen;  // indices into the candidate list
  bool exact = true;
};

// Weighted set cover of `targets` (size) by `sets` (each a sorted list of
// target indices). Exhaustive when the candidate list has at most
// `exact_limit` entries, greedy otherwise. Greedy picks the set covering the
// most uncovered targets, ties by smaller weight, then by lower index.
CoverResult MinWeightCover(std::size_t targets, const std::vector<std::vector<int>>& sets,
                           const std::vector<double>& weights, std::size_t exact_limit = 20);
CoverResult GreedyCover(std::size_t targets, const std::vector<std::vector<int>>& sets,
                        const std::vector<double>& weights);
CoverResult ExactCover(std::size_t targets, const std::vector<std::vector<int>>& sets,
                       const std::vector<double>& weights);

// Centralized ETC, agent-optimal regret. Throws kInvalidHorizon unless
// n > h*K and kDegenerateMarket when no agent has a positive optimal gap.
BoundReport EtcBound(const MarketInstance& market, int h, std::int64_t n);
int RecommendedH(const MarketInstance& market, std::int64_t n);

// Centralized UCB, agent-pessimal regret, via minimum covers of the
// non-stable full matchings that give agent i arm l. Falls back to
// WorstCaseBound when the matchings cannot be enumerated.
BoundReport CoverUcbBound(const MarketInstance& market, std::int64_t n,
                          std::size_t cap = kDefaultEnumerationCap);

// max_l pessimal_gap(i, l) * (6 N K^2 + 12 N K ln n / gap^2), gap the smallest
// pairwise gap. Throws kDegenerateMarket when that gap is 0.
BoundReport WorstCaseBound(const MarketInstance& market, std::int64_t n);

// Decentralized ETC with stage 1 lasting H*K rounds.
BoundReport DecentEtcBound(const MarketInstance& market, int big_h, std::int64_t n);
double SuccessProbabilityFloor(int n_agents, int k_arms);  // (1 - 1/K)^(N-1)

// Lower bound on a single deviator's agent-optimal regret when every other
// agent ranks by UCB. Covers use only triplets of the other agents.
BoundReport OptimalRegretLowerBound(const MarketInstance& market, std::int64_t n,
                                    std::size_t cap = kDefaultEnumerationCap);

// Closed forms for the two structured families. Both throw kUnsupportedCheck
// on markets without the required structure.
BoundReport GlobalPreferencesBound(const MarketInstance& market, std::int64_t n);
BoundReport UniquePairsBound(const MarketInstance& market, std::int64_t n);
bool HasUniquePairs(const MarketInstance& market);

}  // namespace matchband
