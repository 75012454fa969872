#pragma once

#include <cstddef>
#include <vector>

#include "matchband/market.h"

namespace matchband {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

struct BlockingPair {
  int agent;
  int arm;

  bool operator==(const BlockingPair&) const = default;
};

// Agent `agent` holds `matched_arm` while (agent, preferred_arm) blocks under
// the true preferences.
struct BlockingTriplet {
  int agent;
  int preferred_arm;
  int matched_arm;

  bool operator==(const BlockingTriplet&) const = default;
  auto operator<=>(const BlockingTriplet&) const = default;
};

struct StabilityReport {
  bool stable = true;
  std::vector<BlockingPair> blocking_pairs;
};

struct StableSet {
  std::vector<Matching> matchings;
  Matching agent_optimal;
  Matching agent_pessimal;
};

// Deferred acceptance with simultaneous proposals: every free proposer
// proposes in the same round, then each receiver keeps its best offer.
// Both variants throw kInvalidInput on incomplete or malformed rankings.
Matching GaleShapleyAgentProposing(const std::vector<Ranking>& agent_rankings,
                                   const std::vector<std::vector<int>>& arm_prefs);
Matching GaleShapleyArmProposing(const std::vector<Ranking>& agent_rankings,
                                 const std::vector<std::vector<int>>& arm_prefs);

// Agent-proposing run against the market's arm rank table. The hot loop of
// the centralized platforms calls this once per round.
Matching GaleShapleyAgentProposing(const std::vector<Ranking>& agent_rankings,
                                   const MarketInstance& market);

// Outputs of deferred acceptance on the true preferences.
Matching AgentOptimalMatching(const MarketInstance& market);
Matching AgentPessimalMatching(const MarketInstance& market);

// Stability with respect to submitted rankings. Unmatched agents and arms
// accept anyone.
StabilityReport IsStable(const Matching& matching, const std::vector<Ranking>& agent_rankings,
                         const std::vector<std::vector<int>>& arm_prefs);

// Stability under the true preferences, without building the pair list.
bool IsTrulyStable(const Matching& matching, const MarketInstance& market);

// Every injective assignment of all agents. Throws kSizeLimit when
// K!/(K-N)! exceeds `cap`.
std::vector<Matching> EnumerateFullMatchings(int n_agents, int k_arms,
                                             std::size_t cap = kDefaultEnumerationCap);

// Number of full matchings, saturating at cap + 1.
std::size_t CountFullMatchings(int n_agents, int k_arms, std::size_t cap);

// Brute force over full matchings, filtered by true stability.
StableSet EnumerateStable(const MarketInstance& market, std::size_t cap = kDefaultEnumerationCap);

std::vector<BlockingTriplet> BlockingTriplets(const Matching& matching,
                                              const MarketInstance& market);

// Whether `triplet` blocks `matching` under the true preferences.
bool TripletBlocks(const BlockingTriplet& triplet, const Matching& matching,
                   const std::vector<int>& agent_of_arm, const MarketInstance& market);

// A ranking is valid when every arm placed above the agent's optimal match
// truly beats it.
bool IsValidRanking(const Ranking& ranking, const MarketInstance& market, int agent);
bool IsValidRanking(const Ranking& ranking, const MarketInstance& market, int agent,
                    int optimal_arm);

}  // namespace matchband
