#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "matchband/bounds.h"
#include "matchband/errors.h"
#include "matchband/experiment.h"
#include "matchband/stable_matching.h"

namespace mb = matchband;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;
constexpr int kExitIo = 3;

int ExitCodeFor(mb::ErrorKind kind) {
  switch (kind) {
    case mb::ErrorKind::kUsage:
    case mb::ErrorKind::kInvalidInput:
    case mb::ErrorKind::kInvalidMarket:
    case mb::ErrorKind::kInvalidHorizon:
      return kExitUsage;
    case mb::ErrorKind::kIo:
      return kExitIo;
    default:
      return kExitFailure;
  }
}

struct MarketFlags {
  std::string preset;
  std::string market_file;
  std::vector<std::string> params;

  void Add(CLI::App* app) {
    app->add_option("--preset", preset, "Preset market name");
    app->add_option("--market", market_file, "Market JSON file");
    app->add_option("--param", params, "Preset parameter as key=value (repeatable)");
  }

  mb::PresetParams Params() const {
    mb::PresetParams out;
    for (const std::string& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) {
        mb::Fail(mb::ErrorKind::kUsage, "--param expects key=value, got '" + p + "'");
      }
      try {
        out[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
      } catch (const std::exception&) {
        mb::Fail(mb::ErrorKind::kUsage, "--param value is not a number: '" + p + "'");
      }
    }
    return out;
  }
};

struct RunFlags {
  MarketFlags market;
  std::string config_file;
  std::string alg;
  std::int64_t horizon = 0;
  int h = 0;
  int big_h = 0;
  int proposal_rounds = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::int64_t record_every = 0;
  std::string out;
  std::string diagnostics;
  CLI::App* app = nullptr;

  void Add(CLI::App* sub) {
    app = sub;
    market.Add(sub);
    sub->add_option("--config", config_file, "Experiment config JSON");
    sub->add_option("--alg", alg, "etc|ucb|decentralized-etc|ca-ucb|vanilla-ucb");
    sub->add_option("--horizon", horizon, "Rounds per trial");
    sub->add_option("--h", h, "Centralized ETC exploration multiplier");
    sub->add_option("--H", big_h, "Decentralized ETC exploration multiplier");
    sub->add_option("--proposal-rounds", proposal_rounds, "Decentralized ETC stage-2 length");
    sub->add_option("--trials", trials, "Number of trials");
    sub->add_option("--seed", seed, "Base seed");
    sub->add_option("--jobs", jobs, "Concurrent trials");
    sub->add_option("--record-every", record_every, "CSV round stride");
    sub->add_option("--out", out, "Output CSV (stdout when omitted)");
    sub->add_option("--diagnostics", diagnostics, "Diagnostics CSV (global-preference markets)");
  }

  bool Given(const std::string& name) const { return app->count(name) > 0; }

  mb::ExperimentConfig Config() const {
    mb::ExperimentConfig c;
    if (!config_file.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(mb::ReadTextFile(config_file));
      } catch (const nlohmann::json::exception& e) {
        mb::Fail(mb::ErrorKind::kUsage, config_file + ": " + e.what());
      }
      c = mb::ConfigFromJson(j);
    }
    if (Given("--preset")) {
      c.preset = market.preset;
      c.market_file.clear();
    }
    if (Given("--market")) {
      c.market_file = market.market_file;
      c.preset.clear();
    }
    for (const auto& [key, value] : market.Params()) c.preset_params[key] = value;
    if (Given("--alg")) c.algorithm = mb::ParseAlgorithm(alg);
    if (Given("--horizon")) c.horizon = horizon;
    if (Given("--h")) c.h = h;
    if (Given("--H")) c.big_h = big_h;
    if (Given("--proposal-rounds")) c.proposal_rounds = proposal_rounds;
    if (Given("--trials")) c.trials = trials;
    if (Given("--seed")) c.seed = seed;
    if (Given("--jobs")) c.jobs = jobs;
    if (Given("--record-every")) c.record_every = record_every;
    if (Given("--out")) c.out = out;
    if (Given("--diagnostics")) c.diagnostics_out = diagnostics;
    if (const char* env = std::getenv("MATCHBAND_SEED")) {
      try {
        c.seed = std::stoull(env);
      } catch (const std::exception&) {
        mb::Fail(mb::ErrorKind::kUsage, "MATCHBAND_SEED is not an unsigned integer");
      }
    }
    return c;
  }
};

mb::MarketInstance LoadFromFlags(const MarketFlags& flags) {
  mb::ExperimentConfig c;
  c.preset = flags.preset;
  c.market_file = flags.market_file;
  c.preset_params = flags.Params();
  if (c.preset.empty() == c.market_file.empty()) {
    mb::Fail(mb::ErrorKind::kUsage, "exactly one of --preset or --market is required");
  }
  return mb::LoadMarket(c);
}

void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    mb::WriteTextFile(path, text);
  }
}

int DoRun(const RunFlags& flags) {
  mb::ExperimentConfig config = flags.Config();
  config.Validate();
  const mb::MarketInstance market = mb::LoadMarket(config);
  const mb::ExperimentResult result =
      mb::RunExperiment(market, config, !config.diagnostics_out.empty());
  Emit(config.out, mb::RegretCsv(result.aggregate));
  if (!config.out.empty()) {
    const mb::RunMeta meta{mb::MarketDigest(market), config.horizon, config.trials,
                           mb::AlgorithmName(config.algorithm), config.seed};
    mb::WriteTextFile(mb::MetaPathFor(config.out), mb::RunMetaToJson(meta).dump(2) + "\n");
  }
  if (result.diagnostics) {
    mb::WriteTextFile(config.diagnostics_out, mb::DiagnosticsCsv(*result.diagnostics));
  }
  return kExitOk;
}

int DoSweep(const RunFlags& flags, const std::string& name, std::vector<double> values) {
  mb::ExperimentConfig config = flags.Config();
  if (!name.empty()) {
    if (values.empty() && name == "delta") values = {0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    config.sweep = mb::SweepSpec{name, values};
  }
  config.Validate();
  if (!config.sweep) mb::Fail(mb::ErrorKind::kUsage, "sweep needs --sweep-param or a config sweep");
  // per-value regret CSVs go next to the summary
  const std::vector<mb::SweepRow> rows = mb::RunSweep(config);
  Emit(config.out, mb::SweepCsv(rows));
  return kExitOk;
}

int DoBound(const MarketFlags& flags, const std::string& which, std::int64_t n, int h,
            int big_h, const std::string& out) {
  const mb::MarketInstance market = LoadFromFlags(flags);
  mb::BoundReport report;
  if (which == "etc") {
    report = mb::EtcBound(market, h > 0 ? h : mb::RecommendedH(market, n), n);
  } else if (which == "ucb-cover") {
    report = mb::CoverUcbBound(market, n);
  } else if (which == "worst-case") {
    report = mb::WorstCaseBound(market, n);
  } else if (which == "decent-etc") {
    report = mb::DecentEtcBound(market, big_h > 0 ? big_h : mb::RecommendedDecentH(market), n);
  } else if (which == "lower") {
    report = mb::OptimalRegretLowerBound(market, n);
  } else if (which == "global") {
    report = mb::GlobalPreferencesBound(market, n);
  } else if (which == "unique-pairs") {
    report = mb::UniquePairsBound(market, n);
  } else {
    mb::Fail(mb::ErrorKind::kUsage, "unknown bound '" + which + "'");
  }
  report.market_digest = mb::MarketDigest(market);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  Emit(out, mb::BoundReportToJson(report).dump(2) + "\n");
  return kExitOk;
}

int DoCompare(const std::string& csv_path, const std::string& bound_path,
              std::string meta_path) {
  if (meta_path.empty()) meta_path = mb::MetaPathFor(csv_path);
  const auto rows = mb::ParseRegretCsv(mb::ReadTextFile(csv_path));
  nlohmann::json meta_json;
  nlohmann::json bound_json;
  try {
    meta_json = nlohmann::json::parse(mb::ReadTextFile(meta_path));
    bound_json = nlohmann::json::parse(mb::ReadTextFile(bound_path));
  } catch (const nlohmann::json::exception& e) {
    mb::Fail(mb::ErrorKind::kInvalidInput, e.what());
  }
  const mb::RunMeta meta = mb::RunMetaFromJson(meta_json);
  const mb::BoundReport report = mb::BoundReportFromJson(bound_json);
  const mb::Comparison cmp = mb::CompareToBound(rows, meta, report);
  for (const auto& r : cmp.rows) {
    if (r.note == "infinite bound") std::cerr << "warning: agent " << r.agent + 1 << " bound is infinite\n";
  }
  std::cout << cmp.Table();
  return cmp.all_pass ? kExitOk : kExitFailure;
}

int DoEnumerate(const MarketFlags& flags, std::size_t cap) {
  const mb::MarketInstance market = LoadFromFlags(flags);
  std::cout << mb::StableSetToJson(mb::EnumerateStable(market, cap)).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit learning in matching markets: simulations, stable matchings and bounds"};
  app.require_subcommand(1);
  // --h is an option here, so help is long-form only
  app.set_help_flag("--help", "Print this help message and exit");

  RunFlags run_flags;
  run_flags.Add(app.add_subcommand("run", "Run trials and write the regret CSV"));

  RunFlags sweep_flags;
  std::string sweep_name;
  std::vector<double> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "Run one experiment per parameter value");
  sweep_flags.Add(sweep);
  sweep->add_option("--sweep-param", sweep_name, "Preset parameter, h or H");
  sweep->add_option("--values", sweep_values, "Comma-separated values")->delimiter(',');

  MarketFlags bound_market;
  std::string which;
  std::int64_t bound_n = 0;
  int bound_h = 0;
  int bound_big_h = 0;
  std::string bound_out;
  CLI::App* bound = app.add_subcommand("bound", "Evaluate a regret bound");
  bound_market.Add(bound);
  bound->add_option("--which", which, "etc|ucb-cover|worst-case|decent-etc|lower|global|unique-pairs")
      ->required();
  bound->add_option("--n", bound_n, "Horizon")->required();
  bound->add_option("--h", bound_h, "Centralized ETC h (default: recommended)");
  bound->add_option("--H", bound_big_h, "Decentralized ETC H (default: failure term < 0.05)");
  bound->add_option("--out", bound_out, "Output JSON (stdout when omitted)");

  std::string csv_path;
  std::string bound_path;
  std::string meta_path;
  CLI::App* compare = app.add_subcommand("compare", "Check an experiment CSV against a bound");
  compare->add_option("--csv", csv_path, "Regret CSV")->required();
  compare->add_option("--bound", bound_path, "Bound report JSON")->required();
  compare->add_option("--meta", meta_path, "Run metadata (default: <csv>.meta.json)");

  MarketFlags enum_market;
  std::size_t cap = mb::kDefaultEnumerationCap;
  CLI::App* enumerate = app.add_subcommand("enumerate", "List all stable matchings");
  enum_market.Add(enumerate);
  enumerate->add_option("--cap", cap, "Maximum number of candidate matchings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("run")) return DoRun(run_flags);
    if (app.got_subcommand("sweep")) return DoSweep(sweep_flags, sweep_name, sweep_values);
    if (app.got_subcommand("bound")) {
      return DoBound(bound_market, which, bound_n, bound_h, bound_big_h, bound_out);
    }
    if (app.got_subcommand("compare")) return DoCompare(csv_path, bound_path, meta_path);
    if (app.got_subcommand("enumerate")) return DoEnumerate(enum_market, cap);
  } catch (const mb::Error& e) {
    std::cerr << "error (" << mb::ErrorKindName(e.kind()) << "): " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
