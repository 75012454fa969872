#include "matchband/decentralized.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "matchband/errors.h"
#include "matchband/platforms.h"
#include "matchband/rng.h"

namespace matchband {

ConflictHistory::ConflictHistory(int n_agents, int k_arms)
    : n_agents_(n_agents),
      k_arms_(k_arms),
      winners_(static_cast<std::size_t>(n_agents) * k_arms * n_agents, 0) {}

void ConflictHistory::Observe(const ActionVector& actions, const Matching& realized) {
  const std::vector<int> agent_of_arm = realized.AgentOfArm(k_arms_);
  for (int i = 0; i < n_agents_; ++i) {
    if (realized.IsMatched(i)) continue;
    const int winner = agent_of_arm[actions[i]];
    if (winner != kUnmatched) RecordLoss(i, actions[i], winner);
  }
  last_actions_ = actions;
}

namespace {

// Fills `out` with the plausible arms of `agent`. `choosers_of_arm` lists the
// agents that chose each arm in the previous round.
void FillPlausible(const ConflictHistory& history, int agent,
                   const std::vector<std::vector<int>>& choosers_of_arm, std::vector<int>& out) {
  out.clear();
  for (int arm = 0; arm < history.k_arms(); ++arm) {
    bool blocked = false;
    for (int w : choosers_of_arm[arm]) {
      if (w != agent && history.HasBeaten(agent, arm, w)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) out.push_back(arm);
  }
}

void GroupChoosers(const ActionVector& last, int k_arms, std::vector<std::vector<int>>& out) {
  out.assign(k_arms, {});
  for (int i = 0; i < static_cast<int>(last.size()); ++i) out[last[i]].push_back(i);
}

// Arm with the largest UCB index among `arms`; ties drawn uniformly.
int ArgmaxUcb(const AgentBeliefState& belief, const std::vector<int>& arms, std::int64_t t,
              Rng& rng, std::vector<int>& tied) {
  double best = -std::numeric_limits<double>::infinity();
  tied.clear();
  for (int arm : arms) {
    const double index = UcbIndex(belief, arm, t);
    if (index > best) {
      best = index;
      tied.assign(1, arm);
    } else if (index == best) {
      tied.push_back(arm);
    }
  }
  if (tied.size() == 1) return tied.front();
  return tied[rng.UniformInt(static_cast<int>(tied.size()))];
}

struct Streams {
  std::vector<Rng> reward;
  std::vector<Rng> decision;

  Streams(std::uint64_t seed, int n) {
    for (int i = 0; i < n; ++i) {
      reward.push_back(Rng::ForStream(seed, i, StreamPurpose::kReward));
      decision.push_back(Rng::ForStream(seed, i, StreamPurpose::kDecision));
    }
  }
};

// Resolves conflicts, samples rewards of the winners and appends the round.
ConflictOutcome PlayRound(const MarketInstance& market, const ActionVector& actions,
                          Streams& streams, std::vector<double>& rewards,
                          SimulationTrace& trace) {
  ConflictOutcome outcome = ResolveConflicts(actions, market);
  for (int i = 0; i < market.n_agents(); ++i) {
    rewards[i] = outcome.matched.IsMatched(i)
                     ? SampleReward(i, actions[i], market, streams.reward[i])
                     : 0.0;
  }
  trace.AppendRound(actions, outcome.matched, rewards);
  return outcome;
}

std::vector<std::vector<int>> CountsOf(const std::vector<AgentBeliefState>& beliefs) {
  std::vector<std::vector<int>> counts;
  for (const auto& b : beliefs) counts.push_back(b.pull_counts());
  return counts;
}

}  // namespace

std::vector<int> PlausibleSet(const ConflictHistory& history, int agent) {
  std::vector<std::vector<int>> choosers;
  if (history.last_actions().empty()) {
    choosers.assign(history.k_arms(), {});
  } else {
    GroupChoosers(history.last_actions(), history.k_arms(), choosers);
  }
  std::vector<int> out;
  FillPlausible(history, agent, choosers, out);
  return out;
}

int DefaultProposalRounds(int n_agents, int k_arms) { return n_agents * (k_arms - 1) + 1; }

SimulationTrace RunDecentralizedEtc(const MarketInstance& market,
                                    const DecentralizedEtcOptions& options,
                                    std::int64_t horizon, std::uint64_t seed) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  const int big_h = options.exploration_multiplier;
  if (big_h < 1) Fail(ErrorKind::kInvalidInput, "exploration multiplier H must be positive");
  const int proposal_rounds =
      options.proposal_rounds > 0 ? options.proposal_rounds : DefaultProposalRounds(n, k);
  const std::int64_t explore = static_cast<std::int64_t>(big_h) * k;
  if (horizon <= explore + proposal_rounds) {
    Fail(ErrorKind::kInvalidHorizon,
         "decentralized ETC needs horizon > H*K + proposal rounds (" +
             std::to_string(explore + proposal_rounds) + ")");
  }

  SimulationTrace trace("decentralized-etc", n, k, seed);
  trace.parameters()["H"] = big_h;
  trace.parameters()["proposal_rounds"] = proposal_rounds;
  trace.Reserve(horizon);
  Streams streams(seed, n);
  std::vector<AgentBeliefState> beliefs(n, AgentBeliefState(k));
  std::vector<double> rewards(n);
  ActionVector actions(n);
  std::vector<std::vector<int>> permutations(n, std::vector<int>(k));

  std::int64_t t = 1;
  // Stage 1: exploration
  for (int block = 0; block < big_h; ++block) {
    for (int i = 0; i < n; ++i) {
      std::iota(permutations[i].begin(), permutations[i].end(), 0);
      std::shuffle(permutations[i].begin(), permutations[i].end(), streams.decision[i].engine());
    }
    for (int step = 0; step < k; ++step, ++t) {
      for (int i = 0; i < n; ++i) actions[i] = permutations[i][step];
      const ConflictOutcome outcome = PlayRound(market, actions, streams, rewards, trace);
      for (int i = 0; i < n; ++i) {
        if (outcome.matched.IsMatched(i)) beliefs[i].Record(actions[i], rewards[i]);
      }
    }
  }

  // Stage 2: simultaneous proposals on the frozen empirical rankings
  std::vector<Ranking> rankings(n);
  for (int i = 0; i < n; ++i) rankings[i] = RankByEmpiricalMean(beliefs[i]);
  trace.snapshots().push_back({"stage2", t, rankings, CountsOf(beliefs)});
  std::vector<std::vector<char>> rejected(n, std::vector<char>(k, 0));
  std::vector<int> last_success(n, kUnmatched);
  for (int round = 0; round < proposal_rounds; ++round, ++t) {
    for (int i = 0; i < n; ++i) {
      const auto& order = rankings[i].order;
      auto it = std::find_if(order.begin(), order.end(), [&](int a) { return !rejected[i][a]; });
      actions[i] = it != order.end() ? *it : order.back();
    }
    const ConflictOutcome outcome = PlayRound(market, actions, streams, rewards, trace);
    for (int i = 0; i < n; ++i) {
      if (outcome.matched.IsMatched(i)) {
        last_success[i] = actions[i];
      } else {
        rejected[i][actions[i]] = 1;
      }
    }
  }

  // Stage 3: exploitation
  for (int i = 0; i < n; ++i) {
    actions[i] = last_success[i] != kUnmatched ? last_success[i] : actions[i];
  }
  trace.snapshots().push_back({"stage3", t, rankings, CountsOf(beliefs)});
  for (; t <= horizon; ++t) PlayRound(market, actions, streams, rewards, trace);
  return trace;
}

SimulationTrace RunConflictAvoidingUcb(const MarketInstance& market, std::int64_t horizon,
                                       std::uint64_t seed) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  if (horizon < 1) Fail(ErrorKind::kInvalidHorizon, "horizon must be at least 1");
  SimulationTrace trace("ca-ucb", n, k, seed);
  trace.Reserve(horizon);
  Streams streams(seed, n);
  std::vector<AgentBeliefState> beliefs(n, AgentBeliefState(k));
  std::vector<double> rewards(n);
  ActionVector actions(n);
  ConflictHistory history(n, k);
  std::vector<std::vector<int>> choosers(k);
  std::vector<int> plausible;
  std::vector<int> all_arms(k);
  std::iota(all_arms.begin(), all_arms.end(), 0);
  std::vector<int> tied;

  for (std::int64_t t = 1; t <= horizon; ++t) {
    if (history.last_actions().empty()) {
      choosers.assign(k, {});
    } else {
      GroupChoosers(history.last_actions(), k, choosers);
    }
    bool fell_back = false;
    for (int i = 0; i < n; ++i) {
      FillPlausible(history, i, choosers, plausible);
      const std::vector<int>* candidates = &plausible;
      if (plausible.empty()) {
        candidates = &all_arms;
        fell_back = true;
      }
      actions[i] = ArgmaxUcb(beliefs[i], *candidates, t, streams.decision[i], tied);
    }
    if (fell_back) ++trace.plausible_fallbacks;
    const ConflictOutcome outcome = PlayRound(market, actions, streams, rewards, trace);
    for (int i = 0; i < n; ++i) {
      if (outcome.matched.IsMatched(i)) beliefs[i].Record(actions[i], rewards[i]);
    }
    history.Observe(actions, outcome.matched);
  }
  trace.snapshots().push_back({"final", horizon + 1, {}, CountsOf(beliefs)});
  return trace;
}

SimulationTrace RunVanillaUcb(const MarketInstance& market, std::int64_t horizon,
                              std::uint64_t seed) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  if (horizon < 1) Fail(ErrorKind::kInvalidHorizon, "horizon must be at least 1");
  SimulationTrace trace("vanilla-ucb", n, k, seed);
  trace.Reserve(horizon);
  Streams streams(seed, n);
  std::vector<AgentBeliefState> beliefs(n, AgentBeliefState(k));
  std::vector<double> rewards(n);
  ActionVector actions(n);
  std::vector<int> all_arms(k);
  std::iota(all_arms.begin(), all_arms.end(), 0);
  std::vector<int> tied;

  for (std::int64_t t = 1; t <= horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      actions[i] = ArgmaxUcb(beliefs[i], all_arms, t, streams.decision[i], tied);
    }
    PlayRound(market, actions, streams, rewards, trace);
    // rewards[i] is 0 for agents that lost their conflict
    for (int i = 0; i < n; ++i) beliefs[i].Record(actions[i], rewards[i]);
  }
  trace.snapshots().push_back({"final", horizon + 1, {}, CountsOf(beliefs)});
  return trace;
}

DiagnosticCounters ComputeDiagnostics(const SimulationTrace& trace, const MarketInstance& market) {
  if (!market.HasGlobalPreferences()) {
    Fail(ErrorKind::kUnsupportedCheck,
         "non-stable-pull diagnostics need a market with global preferences");
  }
  const int n = market.n_agents();
  const int k = market.k_arms();
  if (trace.n_agents() != n || trace.k_arms() != k) {
    Fail(ErrorKind::kInvalidInput, "trace does not belong to this market");
  }
  std::vector<int> agent_rank(n);
  std::vector<int> arm_rank(k);
  for (int r = 0; r < n; ++r) agent_rank[market.ArmPreference(0)[r]] = r;
  for (int r = 0; r < k; ++r) arm_rank[market.TrueRanking(0).order[r]] = r;

  DiagnosticCounters d;
  d.non_stable_pulls.assign(n, 0);
  d.lost_conflicts.assign(n, 0);
  d.successful_pulls.assign(n, std::vector<std::int64_t>(k, 0));
  for (std::int64_t t = 0; t < trace.horizon(); ++t) {
    for (int i = 0; i < n; ++i) {
      const int rank = agent_rank[i];
      const int arm = trace.Realized(t, i);
      if (arm == kUnmatched) {
        ++d.lost_conflicts[rank];
        ++d.non_stable_pulls[rank];
        continue;
      }
      ++d.successful_pulls[rank][arm_rank[arm]];
      if (arm_rank[arm] != rank) ++d.non_stable_pulls[rank];
    }
  }
  d.inequality_rhs.assign(n, 0);
  d.inequality_holds.assign(n, false);
  for (int r = 0; r < n; ++r) {
    std::int64_t rhs = 0;
    for (int i = r + 1; i < k; ++i) rhs += d.successful_pulls[r][i];
    for (int i = 0; i < r; ++i) rhs += d.non_stable_pulls[i] + d.lost_conflicts[i];
    d.inequality_rhs[r] = rhs;
    d.inequality_holds[r] = d.non_stable_pulls[r] <= rhs;
  }
  return d;
}

}  // namespace matchband
