#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "matchband/bounds.h"
#include "matchband/decentralized.h"
#include "matchband/market.h"
#include "matchband/regret.h"
#include "matchband/stable_matching.h"
#include "matchband/trace.h"

namespace matchband {

// Preset knobs; each preset reads only the keys it understands.
//   gap-2x2:       delta (1.0)
//   three-agents:  (none)
//   global:        agents (20), gap (0.1)
//   unique-pairs:  agents (5), gap (1.0)
//   idiosyncratic: agents (20), arms (= agents), seed (1)
//   why-ucb-fails: (none)
// `noise` (1.0) applies to all of them.
using PresetParams = std::map<std::string, double>;

const std::vector<std::string>& PresetNames();
// Throws kUsage for unknown names.
MarketInstance PresetMarket(const std::string& name, const PresetParams& params = {});

enum class Algorithm { kEtc, kUcb, kDecentralizedEtc, kConflictAvoidingUcb, kVanillaUcb };

Algorithm ParseAlgorithm(const std::string& name);  // throws kUsage
std::string AlgorithmName(Algorithm algorithm);

struct SweepSpec {
  std::string name;  // a preset parameter, or "h" / "H"
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string preset;        // used when market_file is empty
  PresetParams preset_params;
  std::string market_file;
  Algorithm algorithm = Algorithm::kUcb;
  int h = 0;                 // centralized ETC; 0 selects RecommendedH
  int big_h = 0;             // decentralized ETC; 0 selects RecommendedDecentH
  int proposal_rounds = 0;   // 0 selects N(K-1)+1
  std::int64_t horizon = 1000;
  int trials = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::int64_t record_every = 1;
  std::optional<SweepSpec> sweep;
  std::string out;
  std::string diagnostics_out;

  // Throws kUsage on inconsistent settings.
  void Validate() const;
};

ExperimentConfig ConfigFromJson(const nlohmann::json& j);
nlohmann::json ConfigToJson(const ExperimentConfig& config);

MarketInstance LoadMarket(const ExperimentConfig& config);

// Smallest H whose failure term N K (2 e^{-H rho^2/2} + e^{-H rho Delta^2/8})
// is below `target`.
int RecommendedDecentH(const MarketInstance& market, double target = 0.05);

// One trial with seed TrialSeed(config.seed, trial).
SimulationTrace RunTrial(const MarketInstance& market, const ExperimentConfig& config, int trial);

// Runs all trials with up to config.jobs threads and calls `visit` on the
// calling thread in increasing trial order.
using TrialVisitor =
    std::function<void(int trial, const SimulationTrace& trace, const RegretSeries& series)>;
void ForEachTrial(const MarketInstance& market, const ExperimentConfig& config,
                  const TrialVisitor& visit);

struct DiagnosticsSummary {
  std::vector<double> mean_non_stable;    // per global rank
  std::vector<double> mean_lost;
  std::vector<bool> holds_all_trials;
};

struct ExperimentResult {
  AggregateSeries aggregate;
  std::optional<DiagnosticsSummary> diagnostics;
};

ExperimentResult RunExperiment(const MarketInstance& market, const ExperimentConfig& config,
                               bool with_diagnostics = false);

struct SweepRow {
  double value;
  int agent;  // 0-based
  double final_mean_optimal;
  double final_mean_pessimal;
};

// One experiment per sweep value; per-value regret CSVs are written next to
// config.out when it is set.
std::vector<SweepRow> RunSweep(const ExperimentConfig& config);

// CSV output. Agents are written 1-based.
std::string RegretCsv(const AggregateSeries& aggregate);
std::string SweepCsv(const std::vector<SweepRow>& rows);
std::string DiagnosticsCsv(const DiagnosticsSummary& summary);

struct RegretCsvRow {
  std::int64_t round;
  int agent;  // 1-based as written
  double mean_opt;
  double std_opt;
  double mean_pess;
  double std_pess;
  double stability;
};
std::vector<RegretCsvRow> ParseRegretCsv(const std::string& text);

// File helpers; failures raise kIo naming the path.
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

// JSON forms use 1-based agents and arms.
nlohmann::json MarketToJson(const MarketInstance& market);
MarketInstance MarketFromJson(const nlohmann::json& j);
nlohmann::json MatchingToJson(const Matching& matching);
nlohmann::json StableSetToJson(const StableSet& set);
nlohmann::json BoundReportToJson(const BoundReport& report);
BoundReport BoundReportFromJson(const nlohmann::json& j);

// FNV-1a over the canonical JSON form, as 16 hex digits.
std::string MarketDigest(const MarketInstance& market);

// Sidecar written next to every regret CSV.
struct RunMeta {
  std::string market_digest;
  std::int64_t horizon = 0;
  int trials = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
};
nlohmann::json RunMetaToJson(const RunMeta& meta);
RunMeta RunMetaFromJson(const nlohmann::json& j);
std::string MetaPathFor(const std::string& csv_path);

struct ComparisonRow {
  int agent;  // 0-based
  double mean;
  double stderr_;
  double bound;
  bool pass;
  std::string note;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  bool all_pass = true;
  std::string Table() const;
};

// Final-round mean regret of the report's kind against the bound, with a
// 2-stderr slack. Throws kInvalidInput when the metadata does not match.
Comparison CompareToBound(const std::vector<RegretCsvRow>& csv, const RunMeta& meta,
                          const BoundReport& report);

}  // namespace matchband
