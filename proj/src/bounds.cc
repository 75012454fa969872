#include "matchband/bounds.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>

#include "matchband/errors.h"

namespace matchband {

double GapProfile::MaxOptimalGap(int agent) const {
  return *std::max_element(optimal_gap[agent].begin(), optimal_gap[agent].end());
}

double GapProfile::MaxPessimalGap(int agent) const {
  return *std::max_element(pessimal_gap[agent].begin(), pessimal_gap[agent].end());
}

GapProfile ComputeGaps(const MarketInstance& market) {
  const int n = market.n_agents();
  const int k = market.k_arms();
  GapProfile g;
  g.optimal = AgentOptimalMatching(market);
  g.pessimal = AgentPessimalMatching(market);
  g.optimal_gap.assign(n, std::vector<double>(k));
  g.pessimal_gap.assign(n, std::vector<double>(k));
  double min_positive = std::numeric_limits<double>::infinity();
  double min_pair = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double mu_opt = market.Mean(i, g.optimal.ArmOf(i));
    const double mu_pess = market.Mean(i, g.pessimal.ArmOf(i));
    for (int j = 0; j < k; ++j) {
      g.optimal_gap[i][j] = mu_opt - market.Mean(i, j);
      g.pessimal_gap[i][j] = mu_pess - market.Mean(i, j);
      if (g.optimal_gap[i][j] > 0) min_positive = std::min(min_positive, g.optimal_gap[i][j]);
      for (int j2 = j + 1; j2 < k; ++j2) {
        min_pair = std::min(min_pair, std::abs(market.Mean(i, j) - market.Mean(i, j2)));
      }
    }
  }
  g.min_positive_optimal_gap = std::isinf(min_positive) ? 0.0 : min_positive;
  g.min_pairwise_gap = std::isinf(min_pair) ? 0.0 : min_pair;
  return g;
}

double TripletWeight(double gap, std::int64_t n) {
  return 5.0 + 6.0 * std::log(static_cast<double>(n)) / (gap * gap);
}

namespace {

using Bits = std::vector<std::uint64_t>;

Bits MakeBits(std::size_t size, bool value) {
  Bits bits((size + 63) / 64, value ? ~std::uint64_t{0} : 0);
  if (value && size % 64 != 0) bits.back() = (std::uint64_t{1} << (size % 64)) - 1;
  return bits;
}

bool Test(const Bits& bits, std::size_t i) { return (bits[i / 64] >> (i % 64)) & 1; }
void Clear(Bits& bits, std::size_t i) { bits[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

std::size_t FirstSet(const Bits& bits) {
  for (std::size_t w = 0; w < bits.size(); ++w) {
    if (bits[w] != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(bits[w]));
  }
  return std::numeric_limits<std::size_t>::max();
}

std::vector<std::vector<int>> SetsOfTarget(std::size_t targets,
                                           const std::vector<std::vector<int>>& sets) {
  std::vector<std::vector<int>> of(targets);
  for (int s = 0; s < static_cast<int>(sets.size()); ++s) {
    for (int e : sets[s]) of[e].push_back(s);
  }
  return of;
}

struct ExactSearch {
  const std::vector<std::vector<int>>& sets;
  const std::vector<double>& weights;
  std::vector<std::vector<int>> of_target;
  double best;
  std::vector<int> best_chosen;
  std::vector<int> chosen;

  void Run(Bits& uncovered, double cost) {
    const std::size_t e = FirstSet(uncovered);
    if (e == std::numeric_limits<std::size_t>::max()) {
      if (cost < best) {
        best = cost;
        best_chosen = chosen;
      }
      return;
    }
    for (int s : of_target[e]) {
      if (cost + weights[s] >= best) continue;
      Bits next = uncovered;
      for (int x : sets[s]) Clear(next, x);
      chosen.push_back(s);
      Run(next, cost + weights[s]);
      chosen.pop_back();
    }
  }
};

}  // namespace

CoverResult ExactCover(std::size_t targets, const std::vector<std::vector<int>>& sets,
                       const std::vector<double>& weights) {
  CoverResult result;
  ExactSearch search{sets, weights, SetsOfTarget(targets, sets),
                     std::numeric_limits<double>::infinity(), {}, {}};
  for (auto& list : search.of_target) {
    if (list.empty()) return result;
    std::stable_sort(list.begin(), list.end(),
                     [&](int a, int b) { return weights[a] < weights[b]; });
  }
  Bits uncovered = MakeBits(targets, true);
  search.Run(uncovered, 0.0);
  result.feasible = true;
  result.value = targets == 0 ? 0.0 : search.best;
  result.chosen = search.best_chosen;
  std::sort(result.chosen.begin(), result.chosen.end());
  return result;
}

CoverResult GreedyCover(std::size_t targets, const std::vector<std::vector<int>>& sets,
                        const std::vector<double>& weights) {
  CoverResult result;
  result.exact = false;
  Bits uncovered = MakeBits(targets, true);
  std::size_t remaining = targets;
  std::vector<char> used(sets.size(), 0);
  while (remaining > 0) {
    int pick = -1;
    std::size_t pick_gain = 0;
    for (int s = 0; s < static_cast<int>(sets.size()); ++s) {
      if (used[s]) continue;
      std::size_t gain = 0;
      for (int e : sets[s]) gain += Test(uncovered, e);
      if (gain == 0) continue;
      if (gain > pick_gain || (gain == pick_gain && weights[s] < weights[pick])) {
        pick = s;
        pick_gain = gain;
      }
    }
    if (pick < 0) return result;
    used[pick] = 1;
    result.chosen.push_back(pick);
    result.value += weights[pick];
    for (int e : sets[pick]) {
      if (Test(uncovered, e)) {
        Clear(uncovered, e);
        --remaining;
      }
    }
  }
  result.feasible = true;
  return result;
}

CoverResult MinWeightCover(std::size_t targets, const std::vector<std::vector<int>>& sets,
                           const std::vector<double>& weights, std::size_t exact_limit) {
  if (sets.size() <= exact_limit) return ExactCover(targets, sets, weights);
  return GreedyCover(targets, sets, weights);
}

namespace {

BoundReport NewReport(std::string name, std::string kind, std::string direction,
                      std::int64_t n, int n_agents) {
  BoundReport r;
  r.name = std::move(name);
  r.regret_kind = std::move(kind);
  r.direction = std::move(direction);
  r.n = n;
  r.values.assign(n_agents, 0.0);
  return r;
}

void RequireN(std::int64_t n) {
  if (n < 1) Fail(ErrorKind::kInvalidHorizon, "horizon n must be at least 1");
}

double MinPositiveOptimalGap(const GapProfile& g) {
  if (!(g.min_positive_optimal_gap > 0)) {
    Fail(ErrorKind::kDegenerateMarket, "no agent has a positive optimal gap");
  }
  return g.min_positive_optimal_gap;
}

// Minimum cover of the full matchings giving `agent` arm `arm` that are not
// truly stable. Only triplets whose agent passes `allowed` are candidates.
template <typename Allowed>
CoverTerm CoverFor(const MarketInstance& market, const std::vector<Matching>& all, int agent,
                   int arm, std::int64_t n, Allowed allowed) {
  std::map<BlockingTriplet, int> index;
  std::vector<BlockingTriplet> triplets;
  std::vector<std::vector<int>> sets;
  std::size_t targets = 0;
  for (const Matching& m : all) {
    if (m.ArmOf(agent) != arm || IsTrulyStable(m, market)) continue;
    const int target = static_cast<int>(targets++);
    for (const BlockingTriplet& t : BlockingTriplets(m, market)) {
      if (!allowed(t)) continue;
      auto [it, inserted] = index.emplace(t, static_cast<int>(triplets.size()));
      if (inserted) {
        triplets.push_back(t);
        sets.emplace_back();
      }
      sets[it->second].push_back(target);
    }
  }
  // deterministic candidate order: by triplet
  std::vector<int> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return triplets[a] < triplets[b]; });
  std::vector<std::vector<int>> sorted_sets;
  std::vector<double> weights;
  std::vector<BlockingTriplet> sorted_triplets;
  for (int o : order) {
    const BlockingTriplet& t = triplets[o];
    sorted_triplets.push_back(t);
    sorted_sets.push_back(sets[o]);
    weights.push_back(
        TripletWeight(market.Mean(t.agent, t.preferred_arm) - market.Mean(t.agent, t.matched_arm), n));
  }
  const CoverResult cover = MinWeightCover(targets, sorted_sets, weights);
  CoverTerm term;
  term.agent = agent;
  term.arm = arm;
  term.exact = cover.exact;
  if (!cover.feasible) {
    term.cover_value = std::numeric_limits<double>::infinity();
    return term;
  }
  term.cover_value = cover.value;
  for (int c : cover.chosen) term.cover.push_back(sorted_triplets[c]);
  return term;
}

}  // namespace

BoundReport EtcBound(const MarketInstance& market, int h, std::int64_t n) {
  RequireN(n);
  const int big_n = market.n_agents();
  const int k = market.k_arms();
  if (h < 1) Fail(ErrorKind::kInvalidInput, "h must be positive");
  if (n <= static_cast<std::int64_t>(h) * k) {
    Fail(ErrorKind::kInvalidHorizon, "etc bound needs n > h*K");
  }
  const GapProfile g = ComputeGaps(market);
  const double delta = MinPositiveOptimalGap(g);
  BoundReport r = NewReport("etc", "optimal", "upper", n, big_n);
  r.inputs["h"] = h;
  r.inputs["delta"] = delta;
  const double tail = std::exp(-h * delta * delta / 4.0);
  const double commit = static_cast<double>(n - static_cast<std::int64_t>(h) * k);
  for (int i = 0; i < big_n; ++i) {
    const double sum_gaps = std::accumulate(g.optimal_gap[i].begin(), g.optimal_gap[i].end(), 0.0);
    r.values[i] = h * sum_gaps + commit * g.MaxOptimalGap(i) * big_n * k * tail;
  }
  return r;
}

int RecommendedH(const MarketInstance& market, std::int64_t n) {
  RequireN(n);
  const double delta = MinPositiveOptimalGap(ComputeGaps(market));
  const double d2 = delta * delta;
  const double h =
      std::ceil(4.0 / d2 * std::log1p(static_cast<double>(n) * d2 * market.n_agents() / 4.0));
  return static_cast<int>(std::max(1.0, h));
}

BoundReport WorstCaseBound(const MarketInstance& market, std::int64_t n) {
  RequireN(n);
  const GapProfile g = ComputeGaps(market);
  if (!(g.min_pairwise_gap > 0)) {
    Fail(ErrorKind::kDegenerateMarket, "worst-case bound needs a positive minimum gap");
  }
  const double big_n = market.n_agents();
  const double k = market.k_arms();
  const double d2 = g.min_pairwise_gap * g.min_pairwise_gap;
  BoundReport r = NewReport("worst-case", "pessimal", "upper", n, market.n_agents());
  r.inputs["delta"] = g.min_pairwise_gap;
  const double factor =
      6.0 * big_n * k * k + 12.0 * big_n * k * std::log(static_cast<double>(n)) / d2;
  for (int i = 0; i < market.n_agents(); ++i) r.values[i] = g.MaxPessimalGap(i) * factor;
  return r;
}

BoundReport CoverUcbBound(const MarketInstance& market, std::int64_t n, std::size_t cap) {
  RequireN(n);
  if (CountFullMatchings(market.n_agents(), market.k_arms(), cap) > cap) {
    BoundReport r = WorstCaseBound(market, n);
    r.name = "ucb-cover";
    r.fallback = true;
    r.warnings.push_back("too many matchings to enumerate; worst-case values reported");
    return r;
  }
  const GapProfile g = ComputeGaps(market);
  const std::vector<Matching> all = EnumerateFullMatchings(market.n_agents(), market.k_arms(), cap);
  BoundReport r = NewReport("ucb-cover", "pessimal", "upper", n, market.n_agents());
  for (int i = 0; i < market.n_agents(); ++i) {
    for (int arm = 0; arm < market.k_arms(); ++arm) {
      const double gap = g.pessimal_gap[i][arm];
      if (!(gap > 0)) continue;
      CoverTerm term = CoverFor(market, all, i, arm, n, [](const BlockingTriplet&) { return true; });
      term.gap = gap;
      r.values[i] += gap * term.cover_value;
      r.greedy = r.greedy || !term.exact;
      r.covers.push_back(std::move(term));
    }
  }
  if (r.greedy) r.warnings.push_back("greedy cover used; value is not the exact minimum");
  return r;
}

double SuccessProbabilityFloor(int n_agents, int k_arms) {
  return std::pow(1.0 - 1.0 / k_arms, n_agents - 1);
}

BoundReport DecentEtcBound(const MarketInstance& market, int big_h, std::int64_t n) {
  RequireN(n);
  const int big_n = market.n_agents();
  const int k = market.k_arms();
  if (big_h < 1) Fail(ErrorKind::kInvalidInput, "H must be positive");
  const std::int64_t explore = static_cast<std::int64_t>(big_h) * k;
  if (n <= explore) Fail(ErrorKind::kInvalidHorizon, "decentralized etc bound needs n > H*K");
  const GapProfile g = ComputeGaps(market);
  const double delta = MinPositiveOptimalGap(g);
  const double rho = SuccessProbabilityFloor(big_n, k);
  BoundReport r = NewReport("decent-etc", "optimal", "upper", n, big_n);
  r.inputs["H"] = big_h;
  r.inputs["delta"] = delta;
  r.inputs["rho"] = rho;
  const double failure = 2.0 * std::exp(-big_h * rho * rho / 2.0) +
                         std::exp(-big_h * rho * delta * delta / 8.0);
  r.inputs["failure_term"] = big_n * k * failure;
  for (int i = 0; i < big_n; ++i) {
    r.values[i] = static_cast<double>(explore) * market.Mean(i, g.optimal.ArmOf(i)) +
                  static_cast<double>(n - explore) * g.MaxOptimalGap(i) * big_n * k * failure;
  }
  return r;
}

BoundReport OptimalRegretLowerBound(const MarketInstance& market, std::int64_t n,
                                    std::size_t cap) {
  RequireN(n);
  if (CountFullMatchings(market.n_agents(), market.k_arms(), cap) > cap) {
    Fail(ErrorKind::kSizeLimit, "too many matchings to enumerate for the lower bound");
  }
  const GapProfile g = ComputeGaps(market);
  const std::vector<Matching> all = EnumerateFullMatchings(market.n_agents(), market.k_arms(), cap);
  BoundReport r = NewReport("lower", "optimal", "lower", n, market.n_agents());
  for (int i = 0; i < market.n_agents(); ++i) {
    for (int arm = 0; arm < market.k_arms(); ++arm) {
      const double gap = g.optimal_gap[i][arm];
      if (!(gap < 0)) continue;
      CoverTerm term = CoverFor(market, all, i, arm, n,
                                [i](const BlockingTriplet& t) { return t.agent != i; });
      term.gap = gap;
      if (std::isinf(term.cover_value)) {
        r.warnings.push_back("no cover by other agents' triplets for agent " +
                             std::to_string(i + 1) + ", arm " + std::to_string(arm + 1));
        r.values[i] = -std::numeric_limits<double>::infinity();
      } else {
        r.values[i] += gap * term.cover_value;
      }
      r.greedy = r.greedy || !term.exact;
      r.covers.push_back(std::move(term));
    }
  }
  return r;
}

BoundReport GlobalPreferencesBound(const MarketInstance& market, std::int64_t n) {
  RequireN(n);
  if (!market.HasGlobalPreferences()) {
    Fail(ErrorKind::kUnsupportedCheck, "market does not have global preferences");
  }
  const GapProfile g = ComputeGaps(market);
  const std::vector<int>& agent_order = market.ArmPreference(0);
  const std::vector<int>& arm_order = market.TrueRanking(0).order;
  const double log_n = std::log(static_cast<double>(n));
  BoundReport r = NewReport("global", "pessimal", "upper", n, market.n_agents());
  for (int rank = 0; rank < market.n_agents(); ++rank) {
    const int agent = agent_order[rank];
    const double i = rank + 1;
    double gap_sum = 0.0;
    double log_terms = 0.0;
    for (int l = rank + 1; l < market.k_arms(); ++l) {
      const double gap = g.pessimal_gap[agent][arm_order[l]];
      gap_sum += gap;
      log_terms += 6.0 * i * log_n / gap;
    }
    r.values[agent] = 5.0 * i * gap_sum + log_terms;
  }
  return r;
}

bool HasUniquePairs(const MarketInstance& market) {
  std::vector<char> taken(market.k_arms(), 0);
  for (int i = 0; i < market.n_agents(); ++i) {
    const int top = market.TrueRanking(i).order.front();
    if (taken[top] || market.ArmPreference(top).front() != i) return false;
    taken[top] = 1;
  }
  return true;
}

BoundReport UniquePairsBound(const MarketInstance& market, std::int64_t n) {
  RequireN(n);
  if (!HasUniquePairs(market)) {
    Fail(ErrorKind::kUnsupportedCheck, "market is not a unique-pairs market");
  }
  const GapProfile g = ComputeGaps(market);
  const double log_n = std::log(static_cast<double>(n));
  BoundReport r = NewReport("unique-pairs", "pessimal", "upper", n, market.n_agents());
  for (int i = 0; i < market.n_agents(); ++i) {
    const int own = market.TrueRanking(i).order.front();
    double gap_sum = 0.0;
    double log_terms = 0.0;
    for (int l = 0; l < market.k_arms(); ++l) {
      if (l == own) continue;
      gap_sum += g.pessimal_gap[i][l];
      log_terms += 6.0 * log_n / g.pessimal_gap[i][l];
    }
    r.values[i] = 5.0 * gap_sum + log_terms;
  }
  return r;
}

}  // namespace matchband
