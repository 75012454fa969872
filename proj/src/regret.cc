#include "matchband/regret.h"

#include <cmath>

#include "matchband/errors.h"
#include "matchband/stable_matching.h"

namespace matchband {

namespace {

void CheckTrace(const SimulationTrace& trace, const MarketInstance& market) {
  if (trace.n_agents() != market.n_agents() || trace.k_arms() != market.k_arms()) {
    Fail(ErrorKind::kInvalidInput, "trace dimensions do not match the market");
  }
}

}  // namespace

std::vector<std::vector<double>> CumulativeRegret(const SimulationTrace& trace,
                                                  const MarketInstance& market,
                                                  const Matching& reference) {
  CheckTrace(trace, market);
  const int n = market.n_agents();
  const std::int64_t horizon = trace.horizon();
  std::vector<std::vector<double>> out(n, std::vector<double>(horizon));
  for (int i = 0; i < n; ++i) {
    const double target = market.Mean(i, reference.ArmOf(i));
    double collected = 0.0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const int arm = trace.Realized(t, i);
      if (arm != kUnmatched) collected += market.Mean(i, arm);
      out[i][t] = static_cast<double>(t + 1) * target - collected;
    }
  }
  return out;
}

std::vector<std::vector<double>> OptimalRegret(const SimulationTrace& trace,
                                               const MarketInstance& market) {
  return CumulativeRegret(trace, market, AgentOptimalMatching(market));
}

std::vector<std::vector<double>> PessimalRegret(const SimulationTrace& trace,
                                                const MarketInstance& market) {
  return CumulativeRegret(trace, market, AgentPessimalMatching(market));
}

std::vector<double> StabilityRate(const SimulationTrace& trace, const MarketInstance& market) {
  CheckTrace(trace, market);
  std::vector<double> rate(trace.horizon());
  std::int64_t stable = 0;
  for (std::int64_t t = 0; t < trace.horizon(); ++t) {
    if (IsTrulyStable(trace.RealizedMatching(t), market)) ++stable;
    rate[t] = static_cast<double>(stable) / static_cast<double>(t + 1);
  }
  return rate;
}

RegretSeries ComputeRegret(const SimulationTrace& trace, const MarketInstance& market) {
  RegretSeries series;
  series.optimal = OptimalRegret(trace, market);
  series.pessimal = PessimalRegret(trace, market);
  series.stable.resize(trace.horizon());
  series.stability_rate.resize(trace.horizon());
  std::int64_t stable = 0;
  for (std::int64_t t = 0; t < trace.horizon(); ++t) {
    series.stable[t] = IsTrulyStable(trace.RealizedMatching(t), market) ? 1 : 0;
    stable += series.stable[t];
    series.stability_rate[t] = static_cast<double>(stable) / static_cast<double>(t + 1);
  }
  return series;
}

RegretAccumulator::RegretAccumulator(int n_agents, std::int64_t horizon, std::int64_t stride)
    : n_agents_(n_agents), horizon_(horizon) {
  if (horizon < 1) Fail(ErrorKind::kInvalidHorizon, "horizon must be at least 1");
  if (stride < 1) Fail(ErrorKind::kInvalidInput, "record stride must be positive");
  for (std::int64_t r = stride; r <= horizon; r += stride) rounds_.push_back(r);
  if (rounds_.empty() || rounds_.back() != horizon) rounds_.push_back(horizon);
  const std::size_t cells = rounds_.size() * static_cast<std::size_t>(n_agents);
  optimal_.resize(cells);
  pessimal_.resize(cells);
  stability_.resize(rounds_.size());
}

void RegretAccumulator::Update(Cell& cell, double x) const {
  // Welford
  const double delta = x - cell.mean;
  cell.mean += delta / trials_;
  cell.m2 += delta * (x - cell.mean);
}

void RegretAccumulator::Add(const RegretSeries& series) {
  if (series.horizon() != horizon_ || series.n_agents() != n_agents_) {
    Fail(ErrorKind::kInvalidInput, "cannot aggregate series with different horizons or sizes");
  }
  ++trials_;
  const std::size_t width = rounds_.size();
  for (std::size_t r = 0; r < width; ++r) {
    const std::int64_t t = rounds_[r] - 1;
    for (int i = 0; i < n_agents_; ++i) {
      Update(optimal_[i * width + r], series.optimal[i][t]);
      Update(pessimal_[i * width + r], series.pessimal[i][t]);
    }
    Update(stability_[r], series.stability_rate[t]);
  }
}

AggregateSeries RegretAccumulator::Finish() const {
  if (trials_ == 0) Fail(ErrorKind::kInvalidInput, "no trials to aggregate");
  AggregateSeries out;
  out.rounds = rounds_;
  out.trials = trials_;
  const std::size_t width = rounds_.size();
  auto stddev = [&](const Cell& c) {
    return trials_ > 1 ? std::sqrt(c.m2 / (trials_ - 1)) : 0.0;
  };
  auto fill = [&](const std::vector<Cell>& cells, std::vector<std::vector<double>>& mean,
                  std::vector<std::vector<double>>& sd) {
    mean.assign(n_agents_, std::vector<double>(width));
    sd.assign(n_agents_, std::vector<double>(width));
    for (int i = 0; i < n_agents_; ++i) {
      for (std::size_t r = 0; r < width; ++r) {
        mean[i][r] = cells[i * width + r].mean;
        sd[i][r] = stddev(cells[i * width + r]);
      }
    }
  };
  fill(optimal_, out.mean_optimal, out.std_optimal);
  fill(pessimal_, out.mean_pessimal, out.std_pessimal);
  out.mean_stability.resize(width);
  out.std_stability.resize(width);
  for (std::size_t r = 0; r < width; ++r) {
    out.mean_stability[r] = stability_[r].mean;
    out.std_stability[r] = stddev(stability_[r]);
  }
  return out;
}

AggregateSeries Aggregate(const std::vector<RegretSeries>& series, std::int64_t stride) {
  if (series.empty()) Fail(ErrorKind::kInvalidInput, "no trials to aggregate");
  RegretAccumulator acc(series.front().n_agents(), series.front().horizon(), stride);
  for (const RegretSeries& s : series) acc.Add(s);
  return acc.Finish();
}

}  // namespace matchband
