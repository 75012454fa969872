#pragma once

#include <cstdint>
#include <vector>

#include "matchband/market.h"
#include "matchband/trace.h"

namespace matchband {

// Cumulative pseudo-regret of every agent at every round, against n rounds of
// its agent-optimal and agent-pessimal stable arm. Index [agent][round - 1].
struct RegretSeries {
  std::vector<std::vector<double>> optimal;
  std::vector<std::vector<double>> pessimal;
  std::vector<char> stable;             // per round: realized matching truly stable
  std::vector<double> stability_rate;   // running fraction of stable rounds

  std::int64_t horizon() const { return static_cast<std::int64_t>(stable.size()); }
  int n_agents() const { return static_cast<int>(optimal.size()); }
};

// Regret against an arbitrary reference matching; an unmatched round collects 0.
std::vector<std::vector<double>> CumulativeRegret(const SimulationTrace& trace,
                                                  const MarketInstance& market,
                                                  const Matching& reference);

std::vector<std::vector<double>> OptimalRegret(const SimulationTrace& trace,
                                               const MarketInstance& market);
std::vector<std::vector<double>> PessimalRegret(const SimulationTrace& trace,
                                                const MarketInstance& market);
std::vector<double> StabilityRate(const SimulationTrace& trace, const MarketInstance& market);

RegretSeries ComputeRegret(const SimulationTrace& trace, const MarketInstance& market);

// Pointwise mean and sample standard deviation over trials, kept only at the
// recorded rounds. Trials must be added in a fixed order for reproducible
// floating-point output.
struct AggregateSeries {
  std::vector<std::int64_t> rounds;  // 1-based
  int trials = 0;
  // [agent][recorded index]
  std::vector<std::vector<double>> mean_optimal;
  std::vector<std::vector<double>> std_optimal;
  std::vector<std::vector<double>> mean_pessimal;
  std::vector<std::vector<double>> std_pessimal;
  std::vector<double> mean_stability;
  std::vector<double> std_stability;
};

class RegretAccumulator {
 public:
  // Records every `stride`-th round plus the final one.
  RegretAccumulator(int n_agents, std::int64_t horizon, std::int64_t stride = 1);

  void Add(const RegretSeries& series);
  int trials() const { return trials_; }
  AggregateSeries Finish() const;

 private:
  struct Cell {
    double mean = 0.0;
    double m2 = 0.0;
  };
  void Update(Cell& cell, double x) const;

  int n_agents_;
  std::int64_t horizon_;
  std::vector<std::int64_t> rounds_;
  int trials_ = 0;
  std::vector<Cell> optimal_;   // [agent * rounds + r]
  std::vector<Cell> pessimal_;
  std::vector<Cell> stability_;
};

// Throws kInvalidInput on an empty list or mismatched horizons.
AggregateSeries Aggregate(const std::vector<RegretSeries>& series, std::int64_t stride = 1);

}  // namespace matchband
