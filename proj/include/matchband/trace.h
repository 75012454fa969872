#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "matchband/market.h"

namespace matchband {

// Algorithm-internal state captured at a named point of a run.
struct TraceSnapshot {
  std::string label;
  std::int64_t round = 0;  // 1-based round the snapshot precedes
  std::vector<Ranking> rankings;
  std::vector<std::vector<int>> pull_counts;

  bool operator==(const TraceSnapshot&) const = default;
};

// Per-round record of one simulation: attempted arms, realized matching and
// realized rewards. Rounds are stored 0-based; round index r is round r + 1.
class SimulationTrace {
 public:
  SimulationTrace() = default;
  SimulationTrace(std::string algorithm, int n_agents, int k_arms, std::uint64_t seed);

  void Reserve(std::int64_t rounds);
  void AppendRound(const ActionVector& attempted, const Matching& realized,
                   std::span<const double> rewards);
  // Optional: submitted rankings of the round just appended.
  void AppendRankings(const std::vector<Ranking>& rankings);

  int n_agents() const { return n_agents_; }
  int k_arms() const { return k_arms_; }
  std::int64_t horizon() const { return horizon_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& algorithm() const { return algorithm_; }

  int Attempted(std::int64_t round, int agent) const { return attempted_[Index(round, agent)]; }
  int Realized(std::int64_t round, int agent) const { return realized_[Index(round, agent)]; }
  bool Matched(std::int64_t round, int agent) const { return Realized(round, agent) != kUnmatched; }
  double Reward(std::int64_t round, int agent) const { return rewards_[Index(round, agent)]; }
  ActionVector AttemptedActions(std::int64_t round) const;
  Matching RealizedMatching(std::int64_t round) const;

  bool has_rankings() const { return !rankings_.empty(); }
  Ranking SubmittedRanking(std::int64_t round, int agent) const;
  std::vector<Ranking> SubmittedRankings(std::int64_t round) const;

  std::map<std::string, double>& parameters() { return parameters_; }
  const std::map<std::string, double>& parameters() const { return parameters_; }
  std::vector<TraceSnapshot>& snapshots() { return snapshots_; }
  const std::vector<TraceSnapshot>& snapshots() const { return snapshots_; }
  const TraceSnapshot* FindSnapshot(const std::string& label) const;

  // Rounds in which the conflict-avoiding rule produced an empty plausible
  // set for some agent and fell back to all arms.
  std::int64_t plausible_fallbacks = 0;

  bool operator==(const SimulationTrace&) const = default;

 private:
  std::size_t Index(std::int64_t round, int agent) const {
    return static_cast<std::size_t>(round) * n_agents_ + agent;
  }

  std::string algorithm_;
  int n_agents_ = 0;
  int k_arms_ = 0;
  std::uint64_t seed_ = 0;
  std::int64_t horizon_ = 0;
  std::vector<int> attempted_;
  std::vector<int> realized_;
  std::vector<double> rewards_;
  std::vector<int> rankings_;
  std::map<std::string, double> parameters_;
  std::vector<TraceSnapshot> snapshots_;
};

}  // namespace matchband
