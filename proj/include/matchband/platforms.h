#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "matchband/market.h"
#include "matchband/rng.h"
#include "matchband/trace.h"

namespace matchband {

// Successful-pull statistics of one agent. Only rounds in which the agent
// actually pulled an arm (or, for vanilla UCB, absorbed a lost conflict)
// are recorded.
class AgentBeliefState {
 public:
  explicit AgentBeliefState(int k_arms) : counts_(k_arms, 0), sums_(k_arms, 0.0) {}

  void Record(int arm, double reward) {
    ++counts_[arm];
    sums_[arm] += reward;
  }

  int k_arms() const { return static_cast<int>(counts_.size()); }
  int PullCount(int arm) const { return counts_[arm]; }
  double RewardSum(int arm) const { return sums_[arm]; }
  const std::vector<int>& pull_counts() const { return counts_; }
  std::int64_t TotalPulls() const;

  bool operator==(const AgentBeliefState&) const = default;

 private:
  std::vector<int> counts_;
  std::vector<double> sums_;
};

// reward_sums / pull_counts; throws kUndefinedMean when the arm was never pulled.
double EmpiricalMean(const AgentBeliefState& state, int arm);

// +inf for unpulled arms, otherwise mean + sqrt(3 ln t / (2 T)) with T the
// arm's pull count before round t.
double UcbIndex(const AgentBeliefState& state, int arm, std::int64_t t);

// Ranking by decreasing score. Blocks of equal scores (including +inf) are
// shuffled uniformly with `rng`; no randomness is drawn when all scores differ.
Ranking RankWithRandomTies(std::span<const double> scores, Rng& rng);

// Ranking by decreasing empirical mean; unpulled arms go last, ties by lower
// arm index.
Ranking RankByEmpiricalMean(const AgentBeliefState& state);

struct PolicyContext {
  int agent;
  std::int64_t round;  // 1-based
  const AgentBeliefState& belief;
  const MarketInstance& market;
  Rng& rng;
};

// What an agent submits to the Gale-Shapley platform each round.
class AgentPolicy {
 public:
  enum class Kind { kUcb, kTruthfulFixed, kFixedRanking, kRandomRanking, kCustom };
  using Strategy = std::function<Ranking(const PolicyContext&)>;

  static AgentPolicy Ucb();
  static AgentPolicy TruthfulFixed();
  static AgentPolicy FixedRanking(Ranking ranking);
  static AgentPolicy RandomRanking();
  static AgentPolicy Custom(std::string name, Strategy strategy);

  Kind kind() const { return kind_; }
  std::string Name() const;
  Ranking Emit(const PolicyContext& context) const;

 private:
  AgentPolicy(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  Ranking fixed_;
  Strategy strategy_;
};

struct TraceOptions {
  // Store every submitted ranking (N*K ints per round).
  bool record_rankings = false;
};

// Explore-then-commit platform: cyclic assignment for h*K rounds, then the
// agent-optimal matching of the empirical-mean rankings until the horizon.
// The submitted rankings are kept in the "commit" snapshot.
// Throws kInvalidHorizon unless horizon > h*K.
SimulationTrace RunCentralizedEtc(const MarketInstance& market, int h, std::int64_t horizon,
                                  std::uint64_t seed);

// Gale-Shapley platform fed by one policy per agent.
SimulationTrace RunCentralizedUcb(const MarketInstance& market, std::int64_t horizon,
                                  std::uint64_t seed, const std::vector<AgentPolicy>& policies,
                                  TraceOptions options = {});

// Every agent ranks by UCB.
SimulationTrace RunCentralizedUcb(const MarketInstance& market, std::int64_t horizon,
                                  std::uint64_t seed, TraceOptions options = {});

// UCB for everyone except `deviator`, who follows `deviation`.
SimulationTrace RunStrategicExperiment(const MarketInstance& market, std::int64_t horizon,
                                       std::uint64_t seed, int deviator,
                                       const AgentPolicy& deviation, TraceOptions options = {});

}  // namespace matchband
