#pragma once

#include <cstdint>
#include <vector>

#include "matchband/market.h"
#include "matchband/trace.h"

namespace matchband {

// What every agent has observed about lost conflicts. For agent j and arm a,
// Winners(j, a) holds the agents that have beaten j on a; only agents ranked
// above j by arm a can ever appear there.
class ConflictHistory {
 public:
  ConflictHistory(int n_agents, int k_arms);

  int n_agents() const { return n_agents_; }
  int k_arms() const { return k_arms_; }

  bool HasBeaten(int loser, int arm, int winner) const {
    return winners_[Index(loser, arm, winner)] != 0;
  }
  void RecordLoss(int loser, int arm, int winner) { winners_[Index(loser, arm, winner)] = 1; }

  // Folds one round into the history: every losing chooser of an arm learns
  // who won it, and the round becomes the last observed action vector.
  void Observe(const ActionVector& actions, const Matching& realized);

  const ActionVector& last_actions() const { return last_actions_; }
  void set_last_actions(ActionVector actions) { last_actions_ = std::move(actions); }

 private:
  std::size_t Index(int loser, int arm, int winner) const {
    return (static_cast<std::size_t>(loser) * k_arms_ + arm) * n_agents_ + winner;
  }

  int n_agents_;
  int k_arms_;
  std::vector<char> winners_;
  ActionVector last_actions_;  // empty before the first round
};

// Arms none of whose known winners against `agent` chose them last round.
std::vector<int> PlausibleSet(const ConflictHistory& history, int agent);

struct DecentralizedEtcOptions {
  int exploration_multiplier = 1;  // H; stage 1 lasts H*K rounds
  // Stage 2 length. 0 selects N*(K-1)+1, the longest a simultaneous
  // proposal run can take before every agent holds an arm.
  int proposal_rounds = 0;
};

int DefaultProposalRounds(int n_agents, int k_arms);

// Decentralized explore-then-commit. Stage 1: blocks of K rounds in which each
// agent attempts a fresh uniform permutation of the arms. Stage 2: each agent
// attempts its best-looking arm it has not lost on during stage 2. Stage 3:
// each agent repeats its last successful stage-2 arm.
// Snapshots "stage2" and "stage3" record the empirical rankings and counts.
SimulationTrace RunDecentralizedEtc(const MarketInstance& market,
                                    const DecentralizedEtcOptions& options,
                                    std::int64_t horizon, std::uint64_t seed);

// Each agent attempts the plausible arm with the highest UCB index and learns
// only from won pulls.
SimulationTrace RunConflictAvoidingUcb(const MarketInstance& market, std::int64_t horizon,
                                       std::uint64_t seed);

// Plain UCB over all arms; a lost conflict counts as a pull with reward 0.
SimulationTrace RunVanillaUcb(const MarketInstance& market, std::int64_t horizon,
                              std::uint64_t seed);

// Counters for global-preference markets, indexed by global rank (0-based):
// agent rank k's stable arm is the arm of rank k.
struct DiagnosticCounters {
  std::vector<std::int64_t> non_stable_pulls;               // N_k(n)
  std::vector<std::int64_t> lost_conflicts;                 // T_empty_k(n)
  std::vector<std::vector<std::int64_t>> successful_pulls;  // T_i_k(n), [rank][arm rank]
  std::vector<std::int64_t> inequality_rhs;
  std::vector<bool> inequality_holds;
};

// N_k(n) <= sum_{i>k} T_i_k(n) + sum_{i<k} (N_i(n) + T_empty_i(n)), checked for
// every rank. Throws kUnsupportedCheck on markets without global preferences.
DiagnosticCounters ComputeDiagnostics(const SimulationTrace& trace, const MarketInstance& market);

}  // namespace matchband
