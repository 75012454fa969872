#include "matchband/platforms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "matchband/errors.h"
#include "matchband/stable_matching.h"

namespace matchband {

std::int64_t AgentBeliefState::TotalPulls() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

double EmpiricalMean(const AgentBeliefState& state, int arm) {
  if (state.PullCount(arm) == 0) {
    Fail(ErrorKind::kUndefinedMean, "empirical mean of an arm that was never pulled");
  }
  return state.RewardSum(arm) / state.PullCount(arm);
}

double UcbIndex(const AgentBeliefState& state, int arm, std::int64_t t) {
  const int count = state.PullCount(arm);
  if (count == 0) return std::numeric_limits<double>::infinity();
  const double log_t = std::log(static_cast<double>(std::max<std::int64_t>(t, 1)));
  return state.RewardSum(arm) / count + std::sqrt(3.0 * log_t / (2.0 * count));
}

Ranking RankWithRandomTies(std::span<const double> scores, Rng& rng) {
  Ranking ranking = RankByScore(scores);
  auto& order = ranking.order;
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin + 1;
    while (end < order.size() && scores[order[end]] == scores[order[begin]]) ++end;
    if (end - begin > 1) {
      std::shuffle(order.begin() + static_cast<std::ptrdiff_t>(begin),
                   order.begin() + static_cast<std::ptrdiff_t>(end), rng.engine());
    }
    begin = end;
  }
  return ranking;
}

Ranking RankByEmpiricalMean(const AgentBeliefState& state) {
  const int k = state.k_arms();
  std::vector<double> means(k);
  for (int j = 0; j < k; ++j) {
    means[j] = state.PullCount(j) > 0 ? EmpiricalMean(state, j)
                                      : -std::numeric_limits<double>::infinity();
  }
  return RankByScore(means);
}

AgentPolicy AgentPolicy::Ucb() { return AgentPolicy(Kind::kUcb, "ucb"); }

AgentPolicy AgentPolicy::TruthfulFixed() {
  return AgentPolicy(Kind::kTruthfulFixed, "truthful-fixed");
}

AgentPolicy AgentPolicy::FixedRanking(Ranking ranking) {
  AgentPolicy policy(Kind::kFixedRanking, "fixed-ranking");
  policy.fixed_ = std::move(ranking);
  return policy;
}

AgentPolicy AgentPolicy::RandomRanking() {
  return AgentPolicy(Kind::kRandomRanking, "random-ranking");
}

AgentPolicy AgentPolicy::Custom(std::string name, Strategy strategy) {
  AgentPolicy policy(Kind::kCustom, std::move(name));
  policy.strategy_ = std::move(strategy);
  return policy;
}

std::string AgentPolicy::Name() const { return name_; }

Ranking AgentPolicy::Emit(const PolicyContext& context) const {
  const int k = context.market.k_arms();
  switch (kind_) {
    case Kind::kUcb: {
      std::vector<double> indices(k);
      for (int j = 0; j < k; ++j) indices[j] = UcbIndex(context.belief, j, context.round);
      return RankWithRandomTies(indices, context.rng);
    }
    case Kind::kTruthfulFixed:
      return context.market.TrueRanking(context.agent);
    case Kind::kFixedRanking:
      return fixed_;
    case Kind::kRandomRanking: {
      Ranking r;
      r.order.resize(k);
      std::iota(r.order.begin(), r.order.end(), 0);
      std::shuffle(r.order.begin(), r.order.end(), context.rng.engine());
      return r;
    }
    case Kind::kCustom:
      return strategy_(context);
  }
  Fail(ErrorKind::kInvalidInput, "unknown policy kind");
}

namespace {

struct AgentStreams {
  std::vector<Rng> reward;
  std::vector<Rng> decision;

  AgentStreams(std::uint64_t seed, int n) {
    reward.reserve(n);
    decision.reserve(n);
    for (int i = 0; i < n; ++i) {
      reward.push_back(Rng::ForStream(seed, i, StreamPurpose::kReward));
      decision.push_back(Rng::ForStream(seed, i, StreamPurpose::kDecision));
    }
  }
};

// Plays a conflict-free matching: every matched agent pulls and records.
void PlayMatching(const MarketInstance& market, const Matching& matching,
                  std::vector<AgentBeliefState>& beliefs, AgentStreams& streams,
                  std::vector<double>& rewards) {
  for (int i = 0; i < market.n_agents(); ++i) {
    rewards[i] = 0.0;
    if (!matching.IsMatched(i)) continue;
    const int arm = matching.ArmOf(i);
    rewards[i] = SampleReward(i, arm, market, streams.reward[i]);
    beliefs[i].Record(arm, rewards[i]);
  }
}

std::vector<std::vector<int>> CountsOf(const std::vector<AgentBeliefState>& beliefs) {
  std::vector<std::vector<int>> counts;
  for (const auto& b : beliefs) counts.push_back(b.pull_counts());
  return counts;
}

}  // namespace

SimulationTrace RunCentralizedEtc(const MarketInstance& market, int h, std::int64_t horizon,
                                  std::uint64_t seed) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  if (h < 1) Fail(ErrorKind::kInvalidInput, "exploration multiplier h must be positive");
  const std::int64_t explore = static_cast<std::int64_t>(h) * k;
  if (horizon <= explore) {
    Fail(ErrorKind::kInvalidHorizon, "centralized ETC needs horizon > h*K");
  }
  SimulationTrace trace("etc", n, k, seed);
  trace.parameters()["h"] = h;
  trace.Reserve(horizon);
  AgentStreams streams(seed, n);
  std::vector<AgentBeliefState> beliefs(n, AgentBeliefState(k));
  std::vector<double> rewards(n);
  std::vector<Ranking> rankings(n);
  Matching committed;

  for (std::int64_t t = 1; t <= horizon; ++t) {
    Matching matching(n);
    if (t <= explore) {
      for (int i = 0; i < n; ++i) matching.Assign(i, static_cast<int>((t + i) % k));
    } else {
      if (t == explore + 1) {
        for (int i = 0; i < n; ++i) rankings[i] = RankByEmpiricalMean(beliefs[i]);
        committed = GaleShapleyAgentProposing(rankings, market);
        trace.snapshots().push_back({"commit", t, rankings, CountsOf(beliefs)});
      }
      matching = committed;
    }
    PlayMatching(market, matching, beliefs, streams, rewards);
    trace.AppendRound(matching.arms(), matching, rewards);
  }
  return trace;
}

SimulationTrace RunCentralizedUcb(const MarketInstance& market, std::int64_t horizon,
                                  std::uint64_t seed, const std::vector<AgentPolicy>& policies,
                                  TraceOptions options) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  if (horizon < 1) Fail(ErrorKind::kInvalidHorizon, "horizon must be at least 1");
  if (static_cast<int>(policies.size()) != n) {
    Fail(ErrorKind::kInvalidInput, "one policy per agent is required");
  }
  SimulationTrace trace("ucb", n, k, seed);
  trace.Reserve(horizon);
  AgentStreams streams(seed, n);
  std::vector<AgentBeliefState> beliefs(n, AgentBeliefState(k));
  std::vector<double> rewards(n);
  std::vector<Ranking> rankings(n);

  for (std::int64_t t = 1; t <= horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      PolicyContext context{i, t, beliefs[i], market, streams.decision[i]};
      rankings[i] = policies[i].Emit(context);
    }
    const Matching matching = GaleShapleyAgentProposing(rankings, market);
    PlayMatching(market, matching, beliefs, streams, rewards);
    trace.AppendRound(matching.arms(), matching, rewards);
    if (options.record_rankings) trace.AppendRankings(rankings);
  }
  trace.snapshots().push_back({"final", horizon + 1, {}, CountsOf(beliefs)});
  return trace;
}

SimulationTrace RunCentralizedUcb(const MarketInstance& market, std::int64_t horizon,
                                  std::uint64_t seed, TraceOptions options) {
  return RunCentralizedUcb(market, horizon, seed,
                           std::vector<AgentPolicy>(market.n_agents(), AgentPolicy::Ucb()),
                           options);
}

SimulationTrace RunStrategicExperiment(const MarketInstance& market, std::int64_t horizon,
                                       std::uint64_t seed, int deviator,
                                       const AgentPolicy& deviation, TraceOptions options) {
  if (deviator < 0 || deviator >= market.n_agents()) {
    Fail(ErrorKind::kInvalidInput, "deviator index out of range");
  }
  std::vector<AgentPolicy> policies(market.n_agents(), AgentPolicy::Ucb());
  policies[deviator] = deviation;
  SimulationTrace trace = RunCentralizedUcb(market, horizon, seed, policies, options);
  trace.parameters()["deviator"] = deviator;
  return trace;
}

}  // namespace matchband
