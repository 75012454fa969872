#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "doctest.h"
#include "matchband/bounds.h"
#include "matchband/errors.h"
#include "matchband/experiment.h"
#include "matchband/platforms.h"
#include "matchband/regret.h"
#include "oracle_values.h"
#include "test_util.h"

using namespace matchband;

namespace {

void CheckValues(const BoundReport& r, const std::vector<double>& expected) {
  REQUIRE(r.values.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(i);
    CHECK(r.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

MarketInstance Single() { return MarketInstance({{1, 0}}, {{0}, {0}}); }
MarketInstance GapHalf() { return PresetMarket("gap-2x2", {{"delta", 0.5}}); }
MarketInstance GapOne() { return PresetMarket("gap-2x2", {{"delta", 1.0}}); }
MarketInstance Three() { return PresetMarket("three-agents"); }
MarketInstance Global4() { return testing::OracleGlobal4(); }

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kUsage;
}

}  // namespace

TEST_CASE("gap profile") {
  const auto g = ComputeGaps(Three());
  CHECK(g.optimal == Matching(std::vector<int>{0, 1, 2}));
  CHECK(g.pessimal == Matching(std::vector<int>{1, 0, 2}));
  CHECK(g.min_positive_optimal_gap == doctest::Approx(0.05));
  CHECK(g.min_pairwise_gap == doctest::Approx(0.05));
  CHECK(g.MaxOptimalGap(0) == doctest::Approx(2.0));
  CHECK(g.MaxPessimalGap(0) == doctest::Approx(1.0));
}

TEST_CASE("bound formulas match the reference values") {
  for (const auto& c : testing::OracleCases()) {
    CAPTURE(c.name);
    CheckValues(c.compute(), c.expected);
  }
  for (const auto& h : testing::OracleRecommendedH()) {
    CHECK(RecommendedH(PresetMarket(h.preset, h.params), h.n) == h.expected);
  }
}

TEST_CASE("explore-then-commit bound edge cases") {
  CHECK(KindOf([] { EtcBound(Single(), 50, 100); }) == ErrorKind::kInvalidHorizon);
  CHECK(KindOf([] { EtcBound(MarketInstance({{1.0}}, {{0}}), 1, 10); }) ==
        ErrorKind::kDegenerateMarket);
  // an agent whose optimal arm is not its favourite can get a negative value
  const auto g3 = PresetMarket("global", {{"agents", 3}, {"gap", 1}});
  CHECK(EtcBound(g3, 200, 1000).values[2] < 0);
  // with the recommended h the bound grows logarithmically
  const auto m = Three();
  const double a = EtcBound(m, RecommendedH(m, 200000), 200000).values[2];
  const double b = EtcBound(m, RecommendedH(m, 400000), 400000).values[2];
  CHECK(b / a < 1.2);
}

TEST_CASE("decentralized bound inputs") {
  CHECK(SuccessProbabilityFloor(2, 2) == doctest::Approx(0.5));
  const auto r = DecentEtcBound(GapOne(), 64, 10000);
  CHECK(r.inputs.at("rho") == doctest::Approx(0.5));
  CHECK(r.inputs.at("H") == 64);
}

TEST_CASE("recommended decentralized H meets its failure target") {
  const auto m = GapOne();
  const int h = RecommendedDecentH(m);
  CHECK(DecentEtcBound(m, h, 1000000).inputs.at("failure_term") < 0.05);
  CHECK(DecentEtcBound(m, h - 1, 1000000).inputs.at("failure_term") >= 0.05);
}

TEST_CASE("structured closed forms") {
  const auto u = PresetMarket("unique-pairs", {{"agents", 5}, {"gap", 1}});
  CHECK(HasUniquePairs(u));
  CHECK(KindOf([] { GlobalPreferencesBound(PresetMarket("three-agents"), 10); }) ==
        ErrorKind::kUnsupportedCheck);
  CHECK(KindOf([] { UniquePairsBound(PresetMarket("global", {{"agents", 3}}), 10); }) ==
        ErrorKind::kUnsupportedCheck);
}

TEST_CASE("cover search on a small instance") {
  // greedy takes the big set first; the exact search pairs the two cheap ones
  const std::vector<std::vector<int>> sets{{0, 1, 2, 3}, {0, 1}, {2, 3}};
  const std::vector<double> w{10, 3, 3};
  const auto exact = ExactCover(4, sets, w);
  const auto greedy = GreedyCover(4, sets, w);
  CHECK(exact.feasible);
  CHECK(exact.value == 6);
  CHECK(exact.chosen == std::vector<int>{1, 2});
  CHECK(greedy.value == 10);
  CHECK_FALSE(greedy.exact);
  CHECK(MinWeightCover(4, sets, w).value == 6);
  CHECK(MinWeightCover(4, sets, w, 2).value == 10);
  CHECK_FALSE(ExactCover(3, {{0}, {1}}, {1, 1}).feasible);
  CHECK(ExactCover(0, {}, {}).value == 0);
}

TEST_CASE("exact cover never exceeds greedy on random instances") {
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t targets = 1 + gen() % 10;
    const std::size_t n_sets = 1 + gen() % 12;
    std::vector<std::vector<int>> sets(n_sets);
    std::vector<double> w(n_sets);
    for (std::size_t s = 0; s < n_sets; ++s) {
      for (std::size_t t = 0; t < targets; ++t) {
        if (gen() % 3 == 0) sets[s].push_back(static_cast<int>(t));
      }
      w[s] = 1.0 + static_cast<double>(gen() % 100) / 10.0;
    }
    const auto e = ExactCover(targets, sets, w);
    const auto g = GreedyCover(targets, sets, w);
    CHECK(e.feasible == g.feasible);
    if (!e.feasible) continue;
    CHECK(e.value <= g.value + 1e-9);
    std::set<int> covered;
    double total = 0;
    for (int c : e.chosen) {
      covered.insert(sets[c].begin(), sets[c].end());
      total += w[c];
    }
    CHECK(covered.size() == targets);
    CHECK(total == doctest::Approx(e.value));
  }
}

TEST_CASE("cover bound against the closed forms and the worst case") {
  const std::int64_t n = 10000;
  const auto g4 = Global4();
  const auto cover_g = CoverUcbBound(g4, n);
  const auto closed_g = GlobalPreferencesBound(g4, n);
  const auto worst_g = WorstCaseBound(g4, n);
  CHECK_FALSE(cover_g.fallback);
  for (int i = 0; i < 4; ++i) {
    CHECK(cover_g.values[i] <= closed_g.values[i] * (1 + 1e-12));
    CHECK(cover_g.values[i] <= worst_g.values[i]);
  }
  CHECK(cover_g.values[3] == 0);

  const auto u = PresetMarket("unique-pairs", {{"agents", 4}, {"gap", 0.5}});
  const auto cover_u = CoverUcbBound(u, n);
  const auto closed_u = UniquePairsBound(u, n);
  for (int i = 0; i < 4; ++i) CHECK(cover_u.values[i] <= closed_u.values[i] * (1 + 1e-12));
}

TEST_CASE("cover bound properties on random markets") {
  std::mt19937_64 gen(91);
  for (int rep = 0; rep < 40; ++rep) {
    const auto m = testing::RandomMarket(gen, 3, 3 + static_cast<int>(gen() % 2));
    const auto r = CoverUcbBound(m, 5000);
    const auto w = WorstCaseBound(m, 5000);
    const auto later = CoverUcbBound(m, 50000);
    for (int i = 0; i < 3; ++i) {
      CHECK(r.values[i] >= 0);
      CHECK(r.values[i] <= w.values[i] * (1 + 1e-12));
      CHECK(later.values[i] >= r.values[i]);
    }
    // every recorded cover hits each target matching
    const auto all = EnumerateFullMatchings(m.n_agents(), m.k_arms());
    for (const auto& term : r.covers) {
      for (const auto& full : all) {
        if (full.ArmOf(term.agent) != term.arm || IsTrulyStable(full, m)) continue;
        const auto blocking = BlockingTriplets(full, m);
        const bool hit = std::any_of(term.cover.begin(), term.cover.end(), [&](const auto& t) {
          return std::find(blocking.begin(), blocking.end(), t) != blocking.end();
        });
        CHECK(hit);
      }
    }
  }
}

TEST_CASE("cover bound is invariant under relabeling") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = testing::RandomMarket(gen, 3, 4);
    std::vector<int> pa = testing::Identity(3);
    std::vector<int> pk = testing::Identity(4);
    std::shuffle(pa.begin(), pa.end(), gen);
    std::shuffle(pk.begin(), pk.end(), gen);
    // agent i of m becomes pa[i], arm j becomes pk[j]
    std::vector<std::vector<double>> mu(3, std::vector<double>(4));
    std::vector<std::vector<int>> prefs(4);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) mu[pa[i]][pk[j]] = m.Mean(i, j);
    }
    for (int j = 0; j < 4; ++j) {
      for (int a : m.ArmPreference(j)) prefs[pk[j]].push_back(pa[a]);
    }
    const MarketInstance relabeled(mu, prefs);
    const auto x = CoverUcbBound(m, 1000);
    const auto y = CoverUcbBound(relabeled, 1000);
    for (int i = 0; i < 3; ++i) CHECK(y.values[pa[i]] == doctest::Approx(x.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("cover bound falls back past the enumeration cap") {
  const auto m = PresetMarket("global", {{"agents", 20}, {"gap", 0.1}});
  const auto r = CoverUcbBound(m, 1000);
  CHECK(r.fallback);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.values == WorstCaseBound(m, 1000).values);
}

TEST_CASE("lower bound") {
  // the only agent that could do better never has a cheaper arm available
  const auto gap = GapHalf();
  const auto r = OptimalRegretLowerBound(gap, 1000);
  CHECK(r.direction == "lower");
  CHECK(r.values == std::vector<double>{0, 0});

  // single stable matching: every term is affine in ln n
  const auto g3 = PresetMarket("global", {{"agents", 3}, {"gap", 1}});
  const double v1 = OptimalRegretLowerBound(g3, 100).values[2];
  const double v2 = OptimalRegretLowerBound(g3, 10000).values[2];
  const double v3 = OptimalRegretLowerBound(g3, 1000000).values[2];
  CHECK(v1 < 0);
  CHECK(v3 - v2 == doctest::Approx(v2 - v1));
  CHECK(KindOf([&] { OptimalRegretLowerBound(g3, 100, 2); }) == ErrorKind::kSizeLimit);
}

TEST_CASE("lower-bound covers exist on random small markets") {
  std::mt19937_64 gen(59);
  int terms = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(gen() % 2);
    const auto m = testing::RandomMarket(gen, n, n + static_cast<int>(gen() % 2));
    const auto r = OptimalRegretLowerBound(m, 1000);
    CHECK(r.warnings.empty());
    for (double v : r.values) CHECK(std::isfinite(v));
    terms += static_cast<int>(r.covers.size());
  }
  CHECK(terms > 50);
}

TEST_CASE("a misreporting deviator stays above the lower bound") {
  const auto m = PresetMarket("global", {{"agents", 3}, {"gap", 1}});
  const std::int64_t n = 2000;
  const int trials = 100;
  const double bound = OptimalRegretLowerBound(m, n).values[2];
  double sum = 0;
  double sum_sq = 0;
  for (int s = 0; s < trials; ++s) {
    const auto trace =
        RunStrategicExperiment(m, n, s, 2, AgentPolicy::FixedRanking(Ranking{{0, 1, 2}}));
    const double r = OptimalRegret(trace, m)[2].back();
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sum_sq - trials * mean * mean) / (trials - 1));
  CAPTURE(mean);
  CAPTURE(bound);
  CHECK(mean >= bound - 2 * sd / std::sqrt(trials));
}
