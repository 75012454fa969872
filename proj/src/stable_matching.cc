#include "matchband/stable_matching.h"

#include <algorithm>
#include <limits>

#include "matchband/errors.h"

namespace matchband {
namespace {

void CheckRankings(const std::vector<Ranking>& agent_rankings, int k_arms) {
  for (std::size_t i = 0; i < agent_rankings.size(); ++i) {
    if (!IsPermutation(agent_rankings[i].order, k_arms)) {
      Fail(ErrorKind::kInvalidInput,
           "ranking of agent " + std::to_string(i + 1) + " is not a complete strict order");
    }
  }
}

std::vector<int> ArmRankTable(const std::vector<std::vector<int>>& arm_prefs, int n_agents) {
  const int k = static_cast<int>(arm_prefs.size());
  std::vector<int> rank(static_cast<std::size_t>(k) * n_agents);
  for (int j = 0; j < k; ++j) {
    if (!IsPermutation(arm_prefs[j], n_agents)) {
      Fail(ErrorKind::kInvalidInput,
           "preferences of arm " + std::to_string(j + 1) + " are not a permutation");
    }
    for (int r = 0; r < n_agents; ++r) rank[j * n_agents + arm_prefs[j][r]] = r;
  }
  return rank;
}

// Core of agent-proposing deferred acceptance. `arm_rank(j, i)` is the
// position of agent i in arm j's list.
template <typename ArmRank>
Matching AgentProposing(const std::vector<Ranking>& rankings, int k_arms, ArmRank arm_rank) {
  const int n = static_cast<int>(rankings.size());
  std::vector<int> next(n, 0);
  std::vector<int> holder(k_arms, kUnmatched);
  std::vector<int> free_agents(n);
  for (int i = 0; i < n; ++i) free_agents[i] = i;
  std::vector<int> proposals;
  proposals.reserve(n);
  Matching matching(n);
  while (!free_agents.empty()) {
    proposals.clear();
    for (int i : free_agents) {
      if (next[i] < k_arms) proposals.push_back(i);
    }
    if (proposals.empty()) break;
    free_agents.clear();
    // settling offers one by one equals keeping each arm's best offer
    for (int i : proposals) {
      const int arm = rankings[i].order[next[i]++];
      const int current = holder[arm];
      if (current == kUnmatched) {
        holder[arm] = i;
      } else if (arm_rank(arm, i) < arm_rank(arm, current)) {
        holder[arm] = i;
        free_agents.push_back(current);
      } else {
        free_agents.push_back(i);
      }
    }
  }
  for (int j = 0; j < k_arms; ++j) {
    if (holder[j] != kUnmatched) matching.Assign(holder[j], j);
  }
  return matching;
}

}  // namespace

Matching GaleShapleyAgentProposing(const std::vector<Ranking>& agent_rankings,
                                   const std::vector<std::vector<int>>& arm_prefs) {
  const int n = static_cast<int>(agent_rankings.size());
  const int k = static_cast<int>(arm_prefs.size());
  CheckRankings(agent_rankings, k);
  const std::vector<int> rank = ArmRankTable(arm_prefs, n);
  return AgentProposing(agent_rankings, k, [&](int j, int i) { return rank[j * n + i]; });
}

Matching GaleShapleyAgentProposing(const std::vector<Ranking>& agent_rankings,
                                   const MarketInstance& market) {
  if (static_cast<int>(agent_rankings.size()) != market.n_agents()) {
    Fail(ErrorKind::kInvalidInput, "one ranking per agent is required");
  }
  CheckRankings(agent_rankings, market.k_arms());
  return AgentProposing(agent_rankings, market.k_arms(),
                        [&](int j, int i) { return market.ArmRank(j, i); });
}

Matching GaleShapleyArmProposing(const std::vector<Ranking>& agent_rankings,
                                 const std::vector<std::vector<int>>& arm_prefs) {
  const int n = static_cast<int>(agent_rankings.size());
  const int k = static_cast<int>(arm_prefs.size());
  CheckRankings(agent_rankings, k);
  ArmRankTable(arm_prefs, n);  // validation only
  std::vector<int> agent_rank(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < k; ++p) agent_rank[i * k + agent_rankings[i].order[p]] = p;
  }
  std::vector<int> next(k, 0);
  std::vector<int> held(n, kUnmatched);
  std::vector<int> free_arms(k);
  for (int j = 0; j < k; ++j) free_arms[j] = j;
  std::vector<int> proposing;
  while (!free_arms.empty()) {
    proposing.clear();
    for (int j : free_arms) {
      if (next[j] < n) proposing.push_back(j);
    }
    if (proposing.empty()) break;
    free_arms.clear();
    for (int j : proposing) {
      const int agent = arm_prefs[j][next[j]++];
      const int current = held[agent];
      if (current == kUnmatched) {
        held[agent] = j;
      } else if (agent_rank[agent * k + j] < agent_rank[agent * k + current]) {
        held[agent] = j;
        free_arms.push_back(current);
      } else {
        free_arms.push_back(j);
      }
    }
  }
  return Matching(held);
}

Matching AgentOptimalMatching(const MarketInstance& market) {
  return GaleShapleyAgentProposing(market.TrueRankings(), market);
}

Matching AgentPessimalMatching(const MarketInstance& market) {
  return GaleShapleyArmProposing(market.TrueRankings(), market.arm_prefs());
}

StabilityReport IsStable(const Matching& matching, const std::vector<Ranking>& agent_rankings,
                         const std::vector<std::vector<int>>& arm_prefs) {
  const int n = static_cast<int>(agent_rankings.size());
  const int k = static_cast<int>(arm_prefs.size());
  if (matching.n_agents() != n) {
    Fail(ErrorKind::kInvalidInput, "matching and rankings disagree on the number of agents");
  }
  if (!matching.IsInjective(k)) Fail(ErrorKind::kInvalidInput, "matching is not injective");
  CheckRankings(agent_rankings, k);
  const std::vector<int> arm_rank = ArmRankTable(arm_prefs, n);
  const std::vector<int> agent_of_arm = matching.AgentOfArm(k);

  StabilityReport report;
  for (int i = 0; i < n; ++i) {
    const auto& order = agent_rankings[i].order;
    const int own = matching.ArmOf(i);
    // arms ahead of the current match in i's list, or all arms if unmatched
    for (int p = 0; p < k; ++p) {
      const int arm = order[p];
      if (arm == own) break;
      const int holder = agent_of_arm[arm];
      if (holder == kUnmatched || arm_rank[arm * n + i] < arm_rank[arm * n + holder]) {
        report.blocking_pairs.push_back({i, arm});
      }
    }
  }
  report.stable = report.blocking_pairs.empty();
  return report;
}

bool IsTrulyStable(const Matching& matching, const MarketInstance& market) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  std::vector<int> agent_of_arm(k, kUnmatched);
  for (int i = 0; i < n; ++i) {
    if (matching.IsMatched(i)) agent_of_arm[matching.ArmOf(i)] = i;
  }
  for (int i = 0; i < n; ++i) {
    const auto& order = market.TrueRanking(i).order;
    const int own = matching.ArmOf(i);
    for (int p = 0; p < k; ++p) {
      const int arm = order[p];
      if (arm == own) break;
      const int holder = agent_of_arm[arm];
      if (holder == kUnmatched || market.ArmRank(arm, i) < market.ArmRank(arm, holder)) {
        return false;
      }
    }
  }
  return true;
}

std::size_t CountFullMatchings(int n_agents, int k_arms, std::size_t cap) {
  std::size_t count = 1;
  for (int f = k_arms; f > k_arms - n_agents; --f) {
    if (count > (cap + 1) / static_cast<std::size_t>(f)) return cap + 1;
    count *= static_cast<std::size_t>(f);
    if (count > cap) return cap + 1;
  }
  return count;
}

std::vector<Matching> EnumerateFullMatchings(int n_agents, int k_arms, std::size_t cap) {
  if (n_agents > k_arms) Fail(ErrorKind::kInvalidInput, "more agents than arms");
  if (CountFullMatchings(n_agents, k_arms, cap) > cap) {
    Fail(ErrorKind::kSizeLimit,
         "market too large to enumerate matchings (cap " + std::to_string(cap) +
             "); use the deferred-acceptance outputs instead");
  }
  std::vector<Matching> out;
  std::vector<int> current(n_agents, kUnmatched);
  std::vector<char> used(k_arms, 0);
  // depth-first over agents in index order, arms in index order
  auto recurse = [&](auto&& self, int agent) -> void {
    if (agent == n_agents) {
      out.emplace_back(current);
      return;
    }
    for (int j = 0; j < k_arms; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current[agent] = j;
      self(self, agent + 1);
      used[j] = 0;
    }
    current[agent] = kUnmatched;
  };
  recurse(recurse, 0);
  return out;
}

StableSet EnumerateStable(const MarketInstance& market, std::size_t cap) {
  const int n = market.n_agents();
  StableSet set;
  for (Matching& m : EnumerateFullMatchings(n, market.k_arms(), cap)) {
    if (IsTrulyStable(m, market)) set.matchings.push_back(std::move(m));
  }
  // the stable set of a strict market with complete lists is never empty
  set.agent_optimal = Matching(n);
  set.agent_pessimal = Matching(n);
  for (int i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const Matching& m : set.matchings) {
      const double mu = market.Mean(i, m.ArmOf(i));
      if (mu > best) {
        best = mu;
        set.agent_optimal.Assign(i, m.ArmOf(i));
      }
      if (mu < worst) {
        worst = mu;
        set.agent_pessimal.Assign(i, m.ArmOf(i));
      }
    }
  }
  return set;
}

bool TripletBlocks(const BlockingTriplet& triplet, const Matching& matching,
                   const std::vector<int>& agent_of_arm, const MarketInstance& market) {
  const int j = triplet.agent;
  if (matching.ArmOf(j) != triplet.matched_arm) return false;
  if (!(market.Mean(j, triplet.preferred_arm) > market.Mean(j, triplet.matched_arm))) return false;
  const int holder = agent_of_arm[triplet.preferred_arm];
  return holder == kUnmatched ||
         market.ArmRank(triplet.preferred_arm, j) < market.ArmRank(triplet.preferred_arm, holder);
}

std::vector<BlockingTriplet> BlockingTriplets(const Matching& matching,
                                              const MarketInstance& market) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  const std::vector<int> agent_of_arm = matching.AgentOfArm(k);
  std::vector<BlockingTriplet> out;
  for (int j = 0; j < n; ++j) {
    if (!matching.IsMatched(j)) continue;
    for (int arm = 0; arm < k; ++arm) {
      if (arm == matching.ArmOf(j)) continue;
      BlockingTriplet t{j, arm, matching.ArmOf(j)};
      if (TripletBlocks(t, matching, agent_of_arm, market)) out.push_back(t);
    }
  }
  return out;
}

bool IsValidRanking(const Ranking& ranking, const MarketInstance& market, int agent,
                    int optimal_arm) {
  const double mu_opt = market.Mean(agent, optimal_arm);
  for (int arm : ranking.order) {
    if (arm == optimal_arm) return true;
    if (!(market.Mean(agent, arm) > mu_opt)) return false;
  }
  return true;
}

bool IsValidRanking(const Ranking& ranking, const MarketInstance& market, int agent) {
  if (!IsPermutation(ranking.order, market.k_arms())) {
    Fail(ErrorKind::kInvalidInput, "ranking is not complete");
  }
  return IsValidRanking(ranking, market, agent, AgentOptimalMatching(market).ArmOf(agent));
}

}  // namespace matchband
