#include "matchband/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "matchband/errors.h"
#include "matchband/platforms.h"
#include "matchband/rng.h"

namespace matchband {

using nlohmann::json;

namespace {

double Param(const PresetParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int IntParam(const PresetParams& params, const std::string& key, int fallback) {
  const double v = Param(params, key, fallback);
  if (v != std::floor(v) || v < 1) {
    Fail(ErrorKind::kUsage, "preset parameter '" + key + "' must be a positive integer");
  }
  return static_cast<int>(v);
}

std::vector<int> Identity(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::string FormatDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

const std::vector<std::string>& PresetNames() {
  static const std::vector<std::string> names = {"gap-2x2",      "three-agents", "global",
                                                 "unique-pairs", "idiosyncratic", "why-ucb-fails"};
  return names;
}

MarketInstance PresetMarket(const std::string& name, const PresetParams& params) {
  const double noise = Param(params, "noise", 1.0);
  if (name == "gap-2x2") {
    const double delta = Param(params, "delta", 1.0);
    return MarketInstance({{delta, 0.0}, {0.0, 1.0}}, {{0, 1}, {0, 1}}, noise);
  }
  if (name == "three-agents") {
    return MarketInstance({{3.0, 2.0, 1.0}, {2.0, 3.0, 1.0}, {2.95, 1.95, 3.0}},
                          {{1, 2, 0}, {0, 1, 2}, {2, 0, 1}}, noise);
  }
  if (name == "global") {
    const int n = IntParam(params, "agents", 20);
    const double gap = Param(params, "gap", 0.1);
    std::vector<double> row(n);
    for (int j = 0; j < n; ++j) row[j] = gap * (n - j);
    return MarketInstance(std::vector<std::vector<double>>(n, row),
                          std::vector<std::vector<int>>(n, Identity(n)), noise);
  }
  if (name == "unique-pairs") {
    const int n = IntParam(params, "agents", 5);
    const double gap = Param(params, "gap", 1.0);
    std::vector<std::vector<double>> mu(n, std::vector<double>(n));
    std::vector<std::vector<int>> prefs(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < n; ++d) {
        mu[i][(i + d) % n] = gap * (n - d);
        prefs[i][d] = (i + d) % n;
      }
    }
    return MarketInstance(std::move(mu), std::move(prefs), noise);
  }
  if (name == "idiosyncratic") {
    const int n = IntParam(params, "agents", 20);
    const int k = IntParam(params, "arms", n);
    const auto seed = static_cast<std::uint64_t>(Param(params, "seed", 1));
    Rng rng = Rng::ForStream(seed, 0, StreamPurpose::kMarket);
    std::vector<std::vector<double>> mu(n, std::vector<double>(k));
    for (auto& row : mu) {
      for (double& x : row) x = rng.Uniform();
    }
    std::vector<std::vector<int>> prefs(k, Identity(n));
    for (auto& p : prefs) std::shuffle(p.begin(), p.end(), rng.engine());
    return MarketInstance(std::move(mu), std::move(prefs), noise);
  }
  if (name == "why-ucb-fails") {
    return MarketInstance({{8.0, 4.0, 2.0}, {8.0, 4.0, 2.0}}, {{0, 1}, {0, 1}, {0, 1}}, noise);
  }
  Fail(ErrorKind::kUsage, "unknown preset '" + name + "'");
}

Algorithm ParseAlgorithm(const std::string& name) {
  if (name == "etc") return Algorithm::kEtc;
  if (name == "ucb") return Algorithm::kUcb;
  if (name == "decentralized-etc") return Algorithm::kDecentralizedEtc;
  if (name == "ca-ucb") return Algorithm::kConflictAvoidingUcb;
  if (name == "vanilla-ucb") return Algorithm::kVanillaUcb;
  Fail(ErrorKind::kUsage, "unknown algorithm '" + name + "'");
}

std::string AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kEtc: return "etc";
    case Algorithm::kUcb: return "ucb";
    case Algorithm::kDecentralizedEtc: return "decentralized-etc";
    case Algorithm::kConflictAvoidingUcb: return "ca-ucb";
    case Algorithm::kVanillaUcb: return "vanilla-ucb";
  }
  return "unknown";
}

void ExperimentConfig::Validate() const {
  if (preset.empty() == market_file.empty()) {
    Fail(ErrorKind::kUsage, "exactly one of a preset or a market file is required");
  }
  if (horizon < 1) Fail(ErrorKind::kUsage, "horizon must be at least 1");
  if (trials < 1) Fail(ErrorKind::kUsage, "trials must be at least 1");
  if (jobs < 1) Fail(ErrorKind::kUsage, "jobs must be at least 1");
  if (record_every < 1) Fail(ErrorKind::kUsage, "record stride must be at least 1");
  if (h < 0 || big_h < 0 || proposal_rounds < 0) {
    Fail(ErrorKind::kUsage, "h, H and proposal rounds must be nonnegative");
  }
  if (sweep) {
    if (sweep->name.empty()) Fail(ErrorKind::kUsage, "sweep needs a parameter name");
    if (sweep->values.empty()) Fail(ErrorKind::kUsage, "sweep needs at least one value");
    const bool algorithm_param = sweep->name == "h" || sweep->name == "H";
    if (!algorithm_param && preset.empty()) {
      Fail(ErrorKind::kUsage, "sweeping a market parameter needs a preset");
    }
  }
}

ExperimentConfig ConfigFromJson(const json& j) {
  if (!j.is_object()) Fail(ErrorKind::kUsage, "config must be a JSON object");
  ExperimentConfig c;
  try {
    c.preset = j.value("preset", "");
    c.market_file = j.value("market_file", "");
    if (j.contains("params")) {
      for (const auto& [key, value] : j.at("params").items()) {
        c.preset_params[key] = value.get<double>();
      }
    }
    c.algorithm = ParseAlgorithm(j.value("algorithm", "ucb"));
    c.h = j.value("h", 0);
    c.big_h = j.value("H", 0);
    c.proposal_rounds = j.value("proposal_rounds", 0);
    c.horizon = j.value("horizon", std::int64_t{1000});
    c.trials = j.value("trials", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.jobs = j.value("jobs", 1);
    c.record_every = j.value("record_every", std::int64_t{1});
    if (j.contains("sweep")) {
      SweepSpec s;
      s.name = j.at("sweep").at("name").get<std::string>();
      s.values = j.at("sweep").at("values").get<std::vector<double>>();
      c.sweep = s;
    }
    c.out = j.value("out", "");
    c.diagnostics_out = j.value("diagnostics", "");
  } catch (const json::exception& e) {
    Fail(ErrorKind::kUsage, std::string("malformed config: ") + e.what());
  }
  c.Validate();
  return c;
}

json ConfigToJson(const ExperimentConfig& c) {
  json j;
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (!c.market_file.empty()) j["market_file"] = c.market_file;
  if (!c.preset_params.empty()) j["params"] = c.preset_params;
  j["algorithm"] = AlgorithmName(c.algorithm);
  j["h"] = c.h;
  j["H"] = c.big_h;
  j["proposal_rounds"] = c.proposal_rounds;
  j["horizon"] = c.horizon;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["record_every"] = c.record_every;
  if (c.sweep) j["sweep"] = {{"name", c.sweep->name}, {"values", c.sweep->values}};
  if (!c.out.empty()) j["out"] = c.out;
  if (!c.diagnostics_out.empty()) j["diagnostics"] = c.diagnostics_out;
  return j;
}

MarketInstance LoadMarket(const ExperimentConfig& config) {
  if (!config.market_file.empty()) {
    const std::string text = ReadTextFile(config.market_file);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      Fail(ErrorKind::kInvalidInput, config.market_file + ": " + e.what());
    }
    return MarketFromJson(j);
  }
  return PresetMarket(config.preset, config.preset_params);
}

int RecommendedDecentH(const MarketInstance& market, double target) {
  const GapProfile g = ComputeGaps(market);
  if (!(g.min_positive_optimal_gap > 0)) {
    Fail(ErrorKind::kDegenerateMarket, "no agent has a positive optimal gap");
  }
  const double d2 = g.min_positive_optimal_gap * g.min_positive_optimal_gap;
  const double rho = SuccessProbabilityFloor(market.n_agents(), market.k_arms());
  const double scale = static_cast<double>(market.n_agents()) * market.k_arms();
  for (int big_h = 1; big_h < 100'000'000; ++big_h) {
    const double failure =
        scale * (2.0 * std::exp(-big_h * rho * rho / 2.0) + std::exp(-big_h * rho * d2 / 8.0));
    if (failure < target) return big_h;
  }
  Fail(ErrorKind::kDegenerateMarket, "no practical H reaches the target failure term");
}

SimulationTrace RunTrial(const MarketInstance& market, const ExperimentConfig& config,
                         int trial) {
  const std::uint64_t seed = TrialSeed(config.seed, static_cast<std::uint64_t>(trial));
  switch (config.algorithm) {
    case Algorithm::kEtc: {
      const int h = config.h > 0 ? config.h : RecommendedH(market, config.horizon);
      return RunCentralizedEtc(market, h, config.horizon, seed);
    }
    case Algorithm::kUcb:
      return RunCentralizedUcb(market, config.horizon, seed);
    case Algorithm::kDecentralizedEtc: {
      DecentralizedEtcOptions options;
      options.exploration_multiplier =
          config.big_h > 0 ? config.big_h : RecommendedDecentH(market);
      options.proposal_rounds = config.proposal_rounds;
      return RunDecentralizedEtc(market, options, config.horizon, seed);
    }
    case Algorithm::kConflictAvoidingUcb:
      return RunConflictAvoidingUcb(market, config.horizon, seed);
    case Algorithm::kVanillaUcb:
      return RunVanillaUcb(market, config.horizon, seed);
  }
  Fail(ErrorKind::kUsage, "unknown algorithm");
}

void ForEachTrial(const MarketInstance& market, const ExperimentConfig& config,
                  const TrialVisitor& visit) {
  const int jobs = std::max(1, std::min(config.jobs, config.trials));
  struct Slot {
    SimulationTrace trace;
    RegretSeries series;
    std::exception_ptr error;
  };
  for (int begin = 0; begin < config.trials; begin += jobs) {
    const int end = std::min(config.trials, begin + jobs);
    std::vector<Slot> slots(end - begin);
    auto work = [&](int trial) {
      Slot& slot = slots[trial - begin];
      try {
        slot.trace = RunTrial(market, config, trial);
        slot.series = ComputeRegret(slot.trace, market);
      } catch (...) {
        slot.error = std::current_exception();
      }
    };
    if (end - begin == 1) {
      work(begin);
    } else {
      std::vector<std::thread> threads;
      for (int t = begin; t < end; ++t) threads.emplace_back(work, t);
      for (auto& th : threads) th.join();
    }
    for (int t = begin; t < end; ++t) {
      Slot& slot = slots[t - begin];
      if (slot.error) std::rethrow_exception(slot.error);
      visit(t, slot.trace, slot.series);
    }
  }
}

ExperimentResult RunExperiment(const MarketInstance& market, const ExperimentConfig& config,
                               bool with_diagnostics) {
  config.Validate();
  if (with_diagnostics && !market.HasGlobalPreferences()) {
    Fail(ErrorKind::kUnsupportedCheck, "diagnostics need a market with global preferences");
  }
  const int n = market.n_agents();
  RegretAccumulator acc(n, config.horizon, config.record_every);
  DiagnosticsSummary diag;
  diag.mean_non_stable.assign(n, 0.0);
  diag.mean_lost.assign(n, 0.0);
  diag.holds_all_trials.assign(n, true);
  ForEachTrial(market, config, [&](int, const SimulationTrace& trace, const RegretSeries& s) {
    acc.Add(s);
    if (!with_diagnostics) return;
    const DiagnosticCounters d = ComputeDiagnostics(trace, market);
    for (int r = 0; r < n; ++r) {
      diag.mean_non_stable[r] += static_cast<double>(d.non_stable_pulls[r]);
      diag.mean_lost[r] += static_cast<double>(d.lost_conflicts[r]);
      if (!d.inequality_holds[r]) diag.holds_all_trials[r] = false;
    }
  });
  ExperimentResult result;
  result.aggregate = acc.Finish();
  if (with_diagnostics) {
    for (int r = 0; r < n; ++r) {
      diag.mean_non_stable[r] /= config.trials;
      diag.mean_lost[r] /= config.trials;
    }
    result.diagnostics = diag;
  }
  return result;
}

namespace {

std::string SweepFilePath(const std::string& out, std::size_t index) {
  const auto dot = out.rfind('.');
  const auto slash = out.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? out.substr(0, dot) : out;
  return stem + "_" + std::to_string(index) + ".csv";
}

void WriteRun(const std::string& path, const MarketInstance& market,
              const ExperimentConfig& config, const AggregateSeries& aggregate) {
  WriteTextFile(path, RegretCsv(aggregate));
  RunMeta meta{MarketDigest(market), config.horizon, config.trials,
               AlgorithmName(config.algorithm), config.seed};
  WriteTextFile(MetaPathFor(path), RunMetaToJson(meta).dump(2) + "\n");
}

}  // namespace

std::vector<SweepRow> RunSweep(const ExperimentConfig& config) {
  config.Validate();
  if (!config.sweep) Fail(ErrorKind::kUsage, "no sweep configured");
  std::vector<SweepRow> rows;
  for (std::size_t v = 0; v < config.sweep->values.size(); ++v) {
    const double value = config.sweep->values[v];
    ExperimentConfig c = config;
    c.sweep.reset();
    if (config.sweep->name == "h") {
      c.h = static_cast<int>(value);
    } else if (config.sweep->name == "H") {
      c.big_h = static_cast<int>(value);
    } else {
      c.preset_params[config.sweep->name] = value;
    }
    const MarketInstance market = LoadMarket(c);
    const ExperimentResult result = RunExperiment(market, c);
    if (!config.out.empty()) WriteRun(SweepFilePath(config.out, v), market, c, result.aggregate);
    const std::size_t last = result.aggregate.rounds.size() - 1;
    for (int i = 0; i < market.n_agents(); ++i) {
      rows.push_back({value, i, result.aggregate.mean_optimal[i][last],
                      result.aggregate.mean_pessimal[i][last]});
    }
  }
  return rows;
}

std::string RegretCsv(const AggregateSeries& a) {
  std::string out =
      "round,agent,mean_opt_regret,std_opt_regret,mean_pess_regret,std_pess_regret,"
      "stability_rate\n";
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    for (std::size_t i = 0; i < a.mean_optimal.size(); ++i) {
      out += std::to_string(a.rounds[r]) + "," + std::to_string(i + 1) + "," +
             FormatDouble(a.mean_optimal[i][r]) + "," + FormatDouble(a.std_optimal[i][r]) + "," +
             FormatDouble(a.mean_pessimal[i][r]) + "," + FormatDouble(a.std_pessimal[i][r]) +
             "," + FormatDouble(a.mean_stability[r]) + "\n";
    }
  }
  return out;
}

std::string SweepCsv(const std::vector<SweepRow>& rows) {
  std::string out = "sweep_value,agent,final_mean_opt_regret,final_mean_pess_regret\n";
  for (const SweepRow& row : rows) {
    out += FormatDouble(row.value) + "," + std::to_string(row.agent + 1) + "," +
           FormatDouble(row.final_mean_optimal) + "," + FormatDouble(row.final_mean_pessimal) +
           "\n";
  }
  return out;
}

std::string DiagnosticsCsv(const DiagnosticsSummary& s) {
  std::string out = "agent_rank,N_k,T_empty_k,ineq1_holds\n";
  for (std::size_t r = 0; r < s.mean_non_stable.size(); ++r) {
    out += std::to_string(r + 1) + "," + FormatDouble(s.mean_non_stable[r]) + "," +
           FormatDouble(s.mean_lost[r]) + "," + (s.holds_all_trials[r] ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<RegretCsvRow> ParseRegretCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "round,agent,mean_opt_regret,std_opt_regret,mean_pess_regret,std_pess_regret,"
              "stability_rate") {
    Fail(ErrorKind::kInvalidInput, "regret CSV header does not match the expected schema");
  }
  std::vector<RegretCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) Fail(ErrorKind::kInvalidInput, "regret CSV row has wrong arity: " + line);
    try {
      rows.push_back({std::stoll(cells[0]), std::stoi(cells[1]), std::stod(cells[2]),
                      std::stod(cells[3]), std::stod(cells[4]), std::stod(cells[5]),
                      std::stod(cells[6])});
    } catch (const std::exception&) {
      Fail(ErrorKind::kInvalidInput, "unparsable regret CSV row: " + line);
    }
  }
  return rows;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) Fail(ErrorKind::kIo, "error while reading '" + path + "'");
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) Fail(ErrorKind::kIo, "error while writing '" + path + "'");
}

json MarketToJson(const MarketInstance& market) {
  json prefs = json::array();
  for (const auto& p : market.arm_prefs()) {
    json row = json::array();
    for (int a : p) row.push_back(a + 1);
    prefs.push_back(row);
  }
  return {{"n_agents", market.n_agents()},
          {"k_arms", market.k_arms()},
          {"mean_rewards", market.MeanRows()},
          {"arm_prefs", prefs},
          {"noise_std", market.noise_std()}};
}

MarketInstance MarketFromJson(const json& j) {
  try {
    const int n = j.at("n_agents").get<int>();
    const int k = j.at("k_arms").get<int>();
    auto mu = j.at("mean_rewards").get<std::vector<std::vector<double>>>();
    auto prefs = j.at("arm_prefs").get<std::vector<std::vector<int>>>();
    const double noise = j.value("noise_std", 1.0);
    if (static_cast<int>(mu.size()) != n ||
        std::any_of(mu.begin(), mu.end(), [&](const auto& row) {
          return static_cast<int>(row.size()) != k;
        })) {
      Fail(ErrorKind::kInvalidMarket, "mean_rewards must be n_agents rows of k_arms values");
    }
    if (static_cast<int>(prefs.size()) != k) {
      Fail(ErrorKind::kInvalidMarket, "arm_prefs must have one list per arm");
    }
    for (auto& p : prefs) {
      for (int& a : p) --a;
    }
    return MarketInstance(std::move(mu), std::move(prefs), noise);
  } catch (const json::exception& e) {
    Fail(ErrorKind::kInvalidMarket, std::string("malformed market JSON: ") + e.what());
  }
}

json MatchingToJson(const Matching& matching) {
  json out = json::array();
  for (int i = 0; i < matching.n_agents(); ++i) {
    if (matching.IsMatched(i)) out.push_back({i + 1, matching.ArmOf(i) + 1});
  }
  return out;
}

json StableSetToJson(const StableSet& set) {
  json all = json::array();
  for (const Matching& m : set.matchings) all.push_back(MatchingToJson(m));
  return {{"stable_matchings", all},
          {"agent_optimal", MatchingToJson(set.agent_optimal)},
          {"agent_pessimal", MatchingToJson(set.agent_pessimal)}};
}

namespace {

json NumberToJson(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

double NumberFromJson(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

}  // namespace

json BoundReportToJson(const BoundReport& r) {
  json values = json::array();
  for (double v : r.values) values.push_back(NumberToJson(v));
  json covers = json::array();
  for (const CoverTerm& c : r.covers) {
    json triplets = json::array();
    for (const BlockingTriplet& t : c.cover) {
      triplets.push_back({t.agent + 1, t.preferred_arm + 1, t.matched_arm + 1});
    }
    covers.push_back({{"agent", c.agent + 1},
                      {"arm", c.arm + 1},
                      {"gap", c.gap},
                      {"cover_value", NumberToJson(c.cover_value)},
                      {"exact", c.exact},
                      {"triplets", triplets}});
  }
  json inputs = json::object();
  for (const auto& [key, value] : r.inputs) inputs[key] = NumberToJson(value);
  return {{"bound", r.name},         {"regret_kind", r.regret_kind},
          {"direction", r.direction}, {"n", r.n},
          {"values", values},        {"inputs", inputs},
          {"covers", covers},        {"greedy", r.greedy},
          {"fallback", r.fallback},  {"warnings", r.warnings},
          {"market_digest", r.market_digest}};
}

BoundReport BoundReportFromJson(const json& j) {
  BoundReport r;
  try {
    r.name = j.at("bound").get<std::string>();
    r.regret_kind = j.at("regret_kind").get<std::string>();
    r.direction = j.at("direction").get<std::string>();
    r.n = j.at("n").get<std::int64_t>();
    for (const auto& v : j.at("values")) r.values.push_back(NumberFromJson(v));
    if (j.contains("inputs")) {
      for (const auto& [key, value] : j.at("inputs").items()) r.inputs[key] = NumberFromJson(value);
    }
    if (j.contains("covers")) {
      for (const auto& c : j.at("covers")) {
        CoverTerm term;
        term.agent = c.at("agent").get<int>() - 1;
        term.arm = c.at("arm").get<int>() - 1;
        term.gap = c.at("gap").get<double>();
        term.cover_value = NumberFromJson(c.at("cover_value"));
        term.exact = c.at("exact").get<bool>();
        for (const auto& t : c.at("triplets")) {
          term.cover.push_back({t.at(0).get<int>() - 1, t.at(1).get<int>() - 1,
                                t.at(2).get<int>() - 1});
        }
        r.covers.push_back(std::move(term));
      }
    }
    r.greedy = j.value("greedy", false);
    r.fallback = j.value("fallback", false);
    r.warnings = j.value("warnings", std::vector<std::string>{});
    r.market_digest = j.value("market_digest", "");
  } catch (const json::exception& e) {
    Fail(ErrorKind::kInvalidInput, std::string("malformed bound report: ") + e.what());
  }
  return r;
}

std::string MarketDigest(const MarketInstance& market) {
  const std::string text = MarketToJson(market).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

json RunMetaToJson(const RunMeta& m) {
  return {{"market_digest", m.market_digest},
          {"horizon", m.horizon},
          {"trials", m.trials},
          {"algorithm", m.algorithm},
          {"seed", m.seed}};
}

RunMeta RunMetaFromJson(const json& j) {
  RunMeta m;
  try {
    m.market_digest = j.at("market_digest").get<std::string>();
    m.horizon = j.at("horizon").get<std::int64_t>();
    m.trials = j.at("trials").get<int>();
    m.algorithm = j.value("algorithm", "");
    m.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    Fail(ErrorKind::kInvalidInput, std::string("malformed run metadata: ") + e.what());
  }
  return m;
}

std::string MetaPathFor(const std::string& csv_path) { return csv_path + ".meta.json"; }

std::string Comparison::Table() const {
  std::string out = "agent  mean_regret  stderr  bound  result\n";
  for (const ComparisonRow& r : rows) {
    out += std::to_string(r.agent + 1) + "  " + FormatDouble(r.mean) + "  " +
           FormatDouble(r.stderr_) + "  " + FormatDouble(r.bound) + "  " +
           (r.pass ? "PASS" : "FAIL");
    if (!r.note.empty()) out += "  (" + r.note + ")";
    out += "\n";
  }
  return out;
}

Comparison CompareToBound(const std::vector<RegretCsvRow>& csv, const RunMeta& meta,
                          const BoundReport& report) {
  if (!report.market_digest.empty() && report.market_digest != meta.market_digest) {
    Fail(ErrorKind::kInvalidInput, "bound report and experiment were computed on different markets");
  }
  if (report.n != meta.horizon) {
    Fail(ErrorKind::kInvalidInput, "bound horizon " + std::to_string(report.n) +
                                       " differs from experiment horizon " +
                                       std::to_string(meta.horizon));
  }
  if (csv.empty()) Fail(ErrorKind::kInvalidInput, "empty regret CSV");
  const bool optimal = report.regret_kind == "optimal";
  const bool upper = report.direction != "lower";
  std::int64_t last = 0;
  for (const RegretCsvRow& r : csv) last = std::max(last, r.round);
  if (last != meta.horizon) {
    Fail(ErrorKind::kInvalidInput, "regret CSV does not reach the recorded horizon");
  }
  Comparison out;
  for (const RegretCsvRow& row : csv) {
    if (row.round != last) continue;
    const int agent = row.agent - 1;
    if (agent < 0 || agent >= static_cast<int>(report.values.size())) {
      Fail(ErrorKind::kInvalidInput, "agent count differs between CSV and bound report");
    }
    ComparisonRow c;
    c.agent = agent;
    c.mean = optimal ? row.mean_opt : row.mean_pess;
    const double sd = optimal ? row.std_opt : row.std_pess;
    c.stderr_ = sd / std::sqrt(static_cast<double>(std::max(1, meta.trials)));
    c.bound = report.values[agent];
    if (std::isinf(c.bound)) {
      c.pass = true;
      c.note = "infinite bound";
    } else if (upper) {
      c.pass = c.mean <= c.bound + 2.0 * c.stderr_;
    } else {
      c.pass = c.mean >= c.bound - 2.0 * c.stderr_;
    }
    out.all_pass = out.all_pass && c.pass;
    out.rows.push_back(c);
  }
  return out;
}

}  // namespace matchband
