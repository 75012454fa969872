#include "matchband/market.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "matchband/errors.h"

namespace matchband {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kInvalidMarket: return "invalid-market";
    case ErrorKind::kInvalidHorizon: return "invalid-horizon";
    case ErrorKind::kUndefinedMean: return "undefined-mean";
    case ErrorKind::kSizeLimit: return "size-limit";
    case ErrorKind::kDegenerateMarket: return "degenerate-market";
    case ErrorKind::kUnsupportedCheck: return "unsupported-check";
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Matching::Matching(std::vector<int> arm_of_agent) : arm_of_agent_(std::move(arm_of_agent)) {}

bool Matching::IsFull() const {
  return std::none_of(arm_of_agent_.begin(), arm_of_agent_.end(),
                      [](int arm) { return arm == kUnmatched; });
}

bool Matching::IsInjective(int k_arms) const {
  std::vector<char> seen(k_arms, 0);
  for (int arm : arm_of_agent_) {
    if (arm == kUnmatched) continue;
    if (arm < 0 || arm >= k_arms || seen[arm]) return false;
    seen[arm] = 1;
  }
  return true;
}

std::vector<int> Matching::AgentOfArm(int k_arms) const {
  std::vector<int> agent_of_arm(k_arms, kUnmatched);
  for (int i = 0; i < n_agents(); ++i) {
    if (arm_of_agent_[i] != kUnmatched) agent_of_arm[arm_of_agent_[i]] = i;
  }
  return agent_of_arm;
}

bool IsPermutation(std::span<const int> values, int size) {
  if (static_cast<int>(values.size()) != size) return false;
  std::vector<char> seen(size, 0);
  for (int v : values) {
    if (v < 0 || v >= size || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

Ranking RankByScore(std::span<const double> scores) {
  Ranking ranking;
  ranking.order.resize(scores.size());
  std::iota(ranking.order.begin(), ranking.order.end(), 0);
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return ranking;
}

Ranking TrueRanking(const MarketInstance& market, int agent) {
  if (agent < 0 || agent >= market.n_agents()) {
    Fail(ErrorKind::kInvalidInput, "agent index out of range");
  }
  auto row = market.MeanRow(agent);
  Ranking ranking = RankByScore(row);
  for (std::size_t p = 1; p < ranking.order.size(); ++p) {
    if (row[ranking.order[p - 1]] == row[ranking.order[p]]) {
      Fail(ErrorKind::kInvalidMarket, "tied mean rewards for agent " + std::to_string(agent + 1));
    }
  }
  return ranking;
}

MarketInstance::MarketInstance(std::vector<std::vector<double>> mean_rewards,
                               std::vector<std::vector<int>> arm_prefs, double noise_std)
    : n_agents_(static_cast<int>(mean_rewards.size())),
      k_arms_(n_agents_ > 0 ? static_cast<int>(mean_rewards.front().size()) : 0),
      noise_std_(noise_std),
      arm_prefs_(std::move(arm_prefs)) {
  if (n_agents_ < 1 || k_arms_ < 1) {
    Fail(ErrorKind::kInvalidMarket, "market needs at least one agent and one arm");
  }
  if (n_agents_ > k_arms_) {
    Fail(ErrorKind::kInvalidMarket, "market needs n_agents <= k_arms");
  }
  if (!(noise_std_ >= 0.0)) {
    Fail(ErrorKind::kInvalidMarket, "noise_std must be nonnegative");
  }
  if (static_cast<int>(arm_prefs_.size()) != k_arms_) {
    Fail(ErrorKind::kInvalidMarket, "arm_prefs must have one permutation per arm");
  }
  means_.reserve(static_cast<std::size_t>(n_agents_) * k_arms_);
  for (const auto& row : mean_rewards) {
    if (static_cast<int>(row.size()) != k_arms_) {
      Fail(ErrorKind::kInvalidMarket, "mean_rewards rows must all have k_arms entries");
    }
    means_.insert(means_.end(), row.begin(), row.end());
  }
  arm_rank_.assign(static_cast<std::size_t>(k_arms_) * n_agents_, 0);
  for (int j = 0; j < k_arms_; ++j) {
    if (!IsPermutation(arm_prefs_[j], n_agents_)) {
      std::ostringstream msg;
      msg << "arm_prefs for arm " << j + 1 << " is not a permutation of the agents";
      Fail(ErrorKind::kInvalidMarket, msg.str());
    }
    for (int r = 0; r < n_agents_; ++r) arm_rank_[j * n_agents_ + arm_prefs_[j][r]] = r;
  }
  true_rankings_.reserve(n_agents_);
  for (int i = 0; i < n_agents_; ++i) true_rankings_.push_back(matchband::TrueRanking(*this, i));
}

std::vector<std::vector<double>> MarketInstance::MeanRows() const {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n_agents_; ++i) {
    auto row = MeanRow(i);
    rows.emplace_back(row.begin(), row.end());
  }
  return rows;
}

bool MarketInstance::HasGlobalPreferences() const {
  for (int i = 1; i < n_agents_; ++i) {
    if (true_rankings_[i] != true_rankings_[0]) return false;
  }
  for (int j = 1; j < k_arms_; ++j) {
    if (arm_prefs_[j] != arm_prefs_[0]) return false;
  }
  return true;
}

bool MarketInstance::operator==(const MarketInstance& other) const {
  return n_agents_ == other.n_agents_ && k_arms_ == other.k_arms_ &&
         noise_std_ == other.noise_std_ && means_ == other.means_ &&
         arm_prefs_ == other.arm_prefs_;
}

ConflictOutcome ResolveConflicts(const ActionVector& actions,
                                 const std::vector<std::vector<int>>& arm_prefs) {
  const int n = static_cast<int>(actions.size());
  const int k = static_cast<int>(arm_prefs.size());
  std::vector<int> winner(k, kUnmatched);
  std::vector<int> winner_rank(k, 0);
  for (int j = 0; j < k; ++j) {
    if (static_cast<int>(arm_prefs[j].size()) != n) {
      Fail(ErrorKind::kInvalidInput, "action vector length does not match arm preferences");
    }
  }
  // rank lookups are only needed for contested arms, so scan the list lazily
  auto rank_of = [&](int arm, int agent) {
    const auto& prefs = arm_prefs[arm];
    return static_cast<int>(std::find(prefs.begin(), prefs.end(), agent) - prefs.begin());
  };
  for (int i = 0; i < n; ++i) {
    const int arm = actions[i];
    if (arm < 0 || arm >= k) Fail(ErrorKind::kInvalidInput, "action is not a valid arm index");
    if (winner[arm] == kUnmatched) {
      winner[arm] = i;
      winner_rank[arm] = -1;  // computed on first contest
      continue;
    }
    if (winner_rank[arm] < 0) winner_rank[arm] = rank_of(arm, winner[arm]);
    const int r = rank_of(arm, i);
    if (r < winner_rank[arm]) {
      winner[arm] = i;
      winner_rank[arm] = r;
    }
  }
  ConflictOutcome outcome{Matching(n), {}};
  for (int i = 0; i < n; ++i) {
    if (winner[actions[i]] == i) {
      outcome.matched.Assign(i, actions[i]);
    } else {
      outcome.unmatched.push_back(i);
    }
  }
  return outcome;
}

ConflictOutcome ResolveConflicts(const ActionVector& actions, const MarketInstance& market) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  if (static_cast<int>(actions.size()) != n) {
    Fail(ErrorKind::kInvalidInput, "action vector length does not match the market");
  }
  std::vector<int> winner(k, kUnmatched);
  for (int i = 0; i < n; ++i) {
    const int arm = actions[i];
    if (arm < 0 || arm >= k) Fail(ErrorKind::kInvalidInput, "action is not a valid arm index");
    if (winner[arm] == kUnmatched || market.ArmRank(arm, i) < market.ArmRank(arm, winner[arm])) {
      winner[arm] = i;
    }
  }
  ConflictOutcome outcome{Matching(n), {}};
  for (int i = 0; i < n; ++i) {
    if (winner[actions[i]] == i) {
      outcome.matched.Assign(i, actions[i]);
    } else {
      outcome.unmatched.push_back(i);
    }
  }
  return outcome;
}

double SampleReward(int agent, int arm, const MarketInstance& market, Rng& rng) {
  if (agent < 0 || agent >= market.n_agents() || arm < 0 || arm >= market.k_arms()) {
    Fail(ErrorKind::kInvalidInput, "reward requested for out-of-range agent or arm");
  }
  return market.Mean(agent, arm) + market.noise_std() * rng.Normal();
}

}  // namespace matchband
