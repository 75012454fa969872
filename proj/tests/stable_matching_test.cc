#include <algorithm>
#include <set>

#include "doctest.h"
#include "matchband/errors.h"
#include "matchband/stable_matching.h"
#include "test_util.h"

using namespace matchband;

namespace {

MarketInstance ThreeAgents() {
  return MarketInstance({{3, 2, 1}, {2, 3, 1}, {2.95, 1.95, 3}}, {{1, 2, 0}, {0, 1, 2}, {2, 0, 1}});
}

Ranking R(std::vector<int> v) { return Ranking{std::move(v)}; }

double Utility(const Matching& m, const MarketInstance& market, int agent) {
  return m.IsMatched(agent) ? market.Mean(agent, m.ArmOf(agent)) : -1e300;
}

// Arm-side utility: higher is better.
int ArmUtility(const Matching& m, const MarketInstance& market, int arm) {
  const auto owner = m.AgentOfArm(market.k_arms())[arm];
  return owner == kUnmatched ? -1 : market.n_agents() - market.ArmRank(arm, owner);
}

}  // namespace

TEST_CASE("deferred acceptance on the three-agent market") {
  const auto m = ThreeAgents();
  const auto opt = GaleShapleyAgentProposing(m.TrueRankings(), m.arm_prefs());
  CHECK(opt == Matching(std::vector<int>{0, 1, 2}));
  CHECK(AgentOptimalMatching(m) == opt);

  auto misranked = m.TrueRankings();
  misranked[2] = R({0, 2, 1});
  CHECK(GaleShapleyAgentProposing(misranked, m.arm_prefs()) ==
        Matching(std::vector<int>{1, 0, 2}));
  CHECK(AgentPessimalMatching(m) == Matching(std::vector<int>{1, 0, 2}));
}

TEST_CASE("distinct first choices are granted directly") {
  const MarketInstance m({{1, 0, 0.5}, {0, 1, 0.5}}, {{1, 0}, {1, 0}, {0, 1}});
  CHECK(GaleShapleyAgentProposing(m.TrueRankings(), m.arm_prefs()) ==
        Matching(std::vector<int>{0, 1}));
}

TEST_CASE("two stable matchings on a cyclic 2x2 market") {
  const MarketInstance m({{1, 0}, {0, 1}}, {{1, 0}, {0, 1}});
  const auto set = EnumerateStable(m);
  CHECK(set.matchings.size() == 2);
  CHECK(set.agent_optimal == Matching(std::vector<int>{0, 1}));
  CHECK(set.agent_pessimal == Matching(std::vector<int>{1, 0}));
  CHECK(GaleShapleyArmProposing(m.TrueRankings(), m.arm_prefs()) ==
        Matching(std::vector<int>{1, 0}));
}

TEST_CASE("single agent is matched to its best arm") {
  const MarketInstance m({{0.1, 0.7, 0.3}}, {{0}, {0}, {0}});
  const auto set = EnumerateStable(m);
  CHECK(set.matchings.size() == 1);
  CHECK(set.agent_optimal.ArmOf(0) == 1);
}

TEST_CASE("stability checks") {
  const MarketInstance g({{3, 2, 1}, {3, 2, 1}, {3, 2, 1}}, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  CHECK(IsStable(Matching(std::vector<int>{0, 1, 2}), g.TrueRankings(), g.arm_prefs()).stable);
  const auto swapped = IsStable(Matching(std::vector<int>{1, 0, 2}), g.TrueRankings(), g.arm_prefs());
  CHECK_FALSE(swapped.stable);
  CHECK(std::find(swapped.blocking_pairs.begin(), swapped.blocking_pairs.end(),
                  BlockingPair{0, 0}) != swapped.blocking_pairs.end());
  const auto empty = IsStable(Matching(3), g.TrueRankings(), g.arm_prefs());
  CHECK_FALSE(empty.stable);
  CHECK_FALSE(empty.blocking_pairs.empty());
  CHECK_FALSE(IsTrulyStable(Matching(3), g));
  CHECK(IsTrulyStable(Matching(std::vector<int>{0, 1, 2}), g));
}

TEST_CASE("blocking triplets") {
  const MarketInstance m({{0.5, 0}, {0, 1}}, {{0, 1}, {0, 1}});
  const auto trip = BlockingTriplets(Matching(std::vector<int>{1, 0}), m);
  CHECK(std::find(trip.begin(), trip.end(), BlockingTriplet{0, 0, 1}) != trip.end());

  // The arm-pessimal side of the three-agent market is itself stable.
  CHECK(BlockingTriplets(Matching(std::vector<int>{1, 0, 2}), ThreeAgents()).empty());
  const auto t2 = BlockingTriplets(Matching(std::vector<int>{2, 0, 1}), ThreeAgents());
  CHECK_FALSE(t2.empty());
}

TEST_CASE("valid rankings") {
  const auto m = ThreeAgents();
  CHECK(IsValidRanking(m.TrueRanking(0), m, 0));
  CHECK(IsValidRanking(R({0, 2, 1}), m, 0));
  const MarketInstance two({{0.5, 0}, {0, 1}}, {{0, 1}, {0, 1}});
  CHECK_FALSE(IsValidRanking(R({1, 0}), two, 0));
}

TEST_CASE("deferred acceptance rejects malformed rankings") {
  const auto m = ThreeAgents();
  auto bad = m.TrueRankings();
  bad[0] = R({0, 0, 1});
  CHECK_THROWS_AS(GaleShapleyAgentProposing(bad, m.arm_prefs()), Error);
  bad[0] = R({0, 1});
  CHECK_THROWS_AS(GaleShapleyArmProposing(bad, m.arm_prefs()), Error);
}

TEST_CASE("enumeration respects the cap") {
  CHECK(CountFullMatchings(3, 4, 1000) == 24);
  CHECK(EnumerateFullMatchings(3, 4).size() == 24);
  CHECK(CountFullMatchings(10, 10, 1000) == 1001);
  try {
    EnumerateFullMatchings(10, 10, 1000);
    FAIL("expected size limit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSizeLimit);
  }
}

TEST_CASE("deferred acceptance matches brute force on random markets") {
  std::mt19937_64 gen(101);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + static_cast<int>(gen() % 4);
    const int k = n + static_cast<int>(gen() % (5 - n));
    const auto m = testing::RandomMarket(gen, n, k);
    const auto set = EnumerateStable(m);
    const auto ap = GaleShapleyAgentProposing(m.TrueRankings(), m.arm_prefs());
    const auto rp = GaleShapleyArmProposing(m.TrueRankings(), m.arm_prefs());
    REQUIRE_FALSE(set.matchings.empty());
    CHECK(std::find(set.matchings.begin(), set.matchings.end(), ap) != set.matchings.end());
    CHECK(std::find(set.matchings.begin(), set.matchings.end(), rp) != set.matchings.end());
    CHECK(ap == GaleShapleyAgentProposing(m.TrueRankings(), m));
    for (const auto& s : set.matchings) {
      for (int i = 0; i < n; ++i) {
        CHECK(Utility(ap, m, i) >= Utility(s, m, i));
      }
      for (int j = 0; j < k; ++j) CHECK(ArmUtility(rp, m, j) >= ArmUtility(s, m, j));
    }
    // stability and empty blocking sets coincide on every full matching
    for (const auto& full : EnumerateFullMatchings(n, k)) {
      CHECK(IsTrulyStable(full, m) == BlockingTriplets(full, m).empty());
      CHECK(IsTrulyStable(full, m) == IsStable(full, m.TrueRankings(), m.arm_prefs()).stable);
    }
  }
}

TEST_CASE("any full matching is reachable through submitted rankings") {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto m = testing::RandomMarket(gen, 3, 4);
    for (const auto& target : EnumerateFullMatchings(3, 4)) {
      std::vector<Ranking> rankings;
      for (int i = 0; i < 3; ++i) {
        std::vector<int> order{target.ArmOf(i)};
        for (int j = 0; j < 4; ++j) {
          if (j != target.ArmOf(i)) order.push_back(j);
        }
        rankings.push_back(R(order));
      }
      CHECK(GaleShapleyAgentProposing(rankings, m.arm_prefs()) == target);
    }
  }
}

TEST_CASE("deferred acceptance ignores monotone rescaling of means") {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = testing::RandomMarket(gen, 4, 5);
    auto rows = m.MeanRows();
    for (auto& row : rows) {
      for (double& v : row) v = 3.0 * v * v * v + 7.0;
    }
    const MarketInstance scaled(rows, m.arm_prefs(), m.noise_std());
    CHECK(AgentOptimalMatching(m) == AgentOptimalMatching(scaled));
    CHECK(AgentPessimalMatching(m) == AgentPessimalMatching(scaled));
  }
}

TEST_CASE("valid rankings keep the agent-optimal matching") {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 300; ++rep) {
    const auto m = testing::RandomMarket(gen, 3, 4);
    const auto opt = AgentOptimalMatching(m);
    std::vector<Ranking> rankings;
    for (int i = 0; i < 3; ++i) {
      // some better arms, then the optimal arm, then everything else
      std::vector<int> above;
      std::vector<int> below;
      for (int j = 0; j < 4; ++j) {
        if (j == opt.ArmOf(i)) continue;
        const bool better = m.Mean(i, j) > m.Mean(i, opt.ArmOf(i));
        (better && gen() % 2 == 0 ? above : below).push_back(j);
      }
      std::shuffle(above.begin(), above.end(), gen);
      std::shuffle(below.begin(), below.end(), gen);
      above.push_back(opt.ArmOf(i));
      above.insert(above.end(), below.begin(), below.end());
      rankings.push_back(R(above));
      CHECK(IsValidRanking(rankings.back(), m, i));
    }
    CHECK(GaleShapleyAgentProposing(rankings, m.arm_prefs()) == opt);
  }
}
