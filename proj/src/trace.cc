#include "matchband/trace.h"

#include "matchband/errors.h"

namespace matchband {

SimulationTrace::SimulationTrace(std::string algorithm, int n_agents, int k_arms,
                                 std::uint64_t seed)
    : algorithm_(std::move(algorithm)), n_agents_(n_agents), k_arms_(k_arms), seed_(seed) {}

void SimulationTrace::Reserve(std::int64_t rounds) {
  const auto cells = static_cast<std::size_t>(rounds) * n_agents_;
  attempted_.reserve(cells);
  realized_.reserve(cells);
  rewards_.reserve(cells);
}

void SimulationTrace::AppendRound(const ActionVector& attempted, const Matching& realized,
                                  std::span<const double> rewards) {
  if (static_cast<int>(attempted.size()) != n_agents_ || realized.n_agents() != n_agents_ ||
      static_cast<int>(rewards.size()) != n_agents_) {
    Fail(ErrorKind::kInvalidInput, "round record does not match the trace dimensions");
  }
  attempted_.insert(attempted_.end(), attempted.begin(), attempted.end());
  realized_.insert(realized_.end(), realized.arms().begin(), realized.arms().end());
  rewards_.insert(rewards_.end(), rewards.begin(), rewards.end());
  ++horizon_;
}

void SimulationTrace::AppendRankings(const std::vector<Ranking>& rankings) {
  if (rankings_.size() != static_cast<std::size_t>(horizon_ - 1) * n_agents_ * k_arms_) {
    Fail(ErrorKind::kInvalidInput, "rankings must be recorded for every round");
  }
  for (const Ranking& r : rankings) rankings_.insert(rankings_.end(), r.order.begin(), r.order.end());
}

ActionVector SimulationTrace::AttemptedActions(std::int64_t round) const {
  auto first = attempted_.begin() + static_cast<std::ptrdiff_t>(Index(round, 0));
  return ActionVector(first, first + n_agents_);
}

Matching SimulationTrace::RealizedMatching(std::int64_t round) const {
  auto first = realized_.begin() + static_cast<std::ptrdiff_t>(Index(round, 0));
  return Matching(std::vector<int>(first, first + n_agents_));
}

Ranking SimulationTrace::SubmittedRanking(std::int64_t round, int agent) const {
  if (!has_rankings()) Fail(ErrorKind::kInvalidInput, "trace was recorded without rankings");
  auto first = rankings_.begin() +
               static_cast<std::ptrdiff_t>((static_cast<std::size_t>(round) * n_agents_ + agent) * k_arms_);
  return Ranking{std::vector<int>(first, first + k_arms_)};
}

std::vector<Ranking> SimulationTrace::SubmittedRankings(std::int64_t round) const {
  std::vector<Ranking> out;
  out.reserve(n_agents_);
  for (int i = 0; i < n_agents_; ++i) out.push_back(SubmittedRanking(round, i));
  return out;
}

const TraceSnapshot* SimulationTrace::FindSnapshot(const std::string& label) const {
  for (const auto& s : snapshots_) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

}  // namespace matchband
