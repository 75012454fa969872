#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "matchband/rng.h"

namespace matchband {

// Agents and arms are 0-based everywhere inside the library. JSON files and
// CLI output use 1-based labels.
inline constexpr int kUnmatched = -1;

// Strict preference order over arms, most preferred first.
struct Ranking {
  std::vector<int> order;

  bool operator==(const Ranking&) const = default;
};

// Injective partial assignment of agents to arms.
class Matching {
 public:
  Matching() = default;
  explicit Matching(int n_agents) : arm_of_agent_(n_agents, kUnmatched) {}
  explicit Matching(std::vector<int> arm_of_agent);

  int n_agents() const { return static_cast<int>(arm_of_agent_.size()); }
  int ArmOf(int agent) const { return arm_of_agent_[agent]; }
  bool IsMatched(int agent) const { return arm_of_agent_[agent] != kUnmatched; }
  void Assign(int agent, int arm) { arm_of_agent_[agent] = arm; }
  void Unassign(int agent) { arm_of_agent_[agent] = kUnmatched; }

  // True when every agent holds an arm.
  bool IsFull() const;
  // True when no arm is held twice and all arms are below k_arms.
  bool IsInjective(int k_arms) const;
  // Inverse map, kUnmatched for free arms.
  std::vector<int> AgentOfArm(int k_arms) const;

  const std::vector<int>& arms() const { return arm_of_agent_; }

  bool operator==(const Matching&) const = default;

 private:
  std::vector<int> arm_of_agent_;
};

// One arm choice per agent; duplicates are conflicts.
using ActionVector = std::vector<int>;

struct ConflictOutcome {
  Matching matched;
  std::vector<int> unmatched;  // agent indices, ascending
};

// The full market: mean rewards, arm-side preferences and the noise scale.
// Immutable after construction; all invariants are checked by the constructor.
class MarketInstance {
 public:
  // `arm_prefs[j]` lists agents best-first for arm j.
  MarketInstance(std::vector<std::vector<double>> mean_rewards,
                 std::vector<std::vector<int>> arm_prefs, double noise_std = 1.0);

  int n_agents() const { return n_agents_; }
  int k_arms() const { return k_arms_; }
  double noise_std() const { return noise_std_; }

  double Mean(int agent, int arm) const { return means_[agent * k_arms_ + arm]; }
  std::span<const double> MeanRow(int agent) const {
    return {means_.data() + agent * k_arms_, static_cast<std::size_t>(k_arms_)};
  }
  std::vector<std::vector<double>> MeanRows() const;

  // Agents best-first for arm j.
  const std::vector<int>& ArmPreference(int arm) const { return arm_prefs_[arm]; }
  const std::vector<std::vector<int>>& arm_prefs() const { return arm_prefs_; }
  // Position of `agent` in arm j's list; 0 is the most preferred.
  int ArmRank(int arm, int agent) const { return arm_rank_[arm * n_agents_ + agent]; }

  // Arms sorted by strictly decreasing mean for this agent.
  const Ranking& TrueRanking(int agent) const { return true_rankings_[agent]; }
  const std::vector<Ranking>& TrueRankings() const { return true_rankings_; }

  // Same arm order for every agent and same agent order for every arm.
  bool HasGlobalPreferences() const;

  bool operator==(const MarketInstance& other) const;

 private:
  int n_agents_;
  int k_arms_;
  double noise_std_;
  std::vector<double> means_;
  std::vector<std::vector<int>> arm_prefs_;
  std::vector<int> arm_rank_;
  std::vector<Ranking> true_rankings_;
};

// Only the top-ranked chooser of each arm is matched to it.
ConflictOutcome ResolveConflicts(const ActionVector& actions,
                                 const std::vector<std::vector<int>>& arm_prefs);

// Same mechanism using the market's precomputed rank table.
ConflictOutcome ResolveConflicts(const ActionVector& actions, const MarketInstance& market);

// mu + sigma * Z, Z drawn from `rng`.
double SampleReward(int agent, int arm, const MarketInstance& market, Rng& rng);

// Descending sort of the agent's mean row. Throws kInvalidMarket on ties.
Ranking TrueRanking(const MarketInstance& market, int agent);

// Ranking from a strict score vector, highest first, ties by lower index.
Ranking RankByScore(std::span<const double> scores);

bool IsPermutation(std::span<const int> values, int size);

}  // namespace matchband
