#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "pbnet/harness.hpp"

using namespace pbnet;

namespace {

SimulationConfig readConfig(const std::string& path) {
  auto cfg = loadConfig(path);
  for (const auto& notice : cfg.notices) std::cerr << "notice: " << notice << "\n";
  return cfg;
}

int simulate(const std::string& configPath, std::optional<std::uint64_t> seed,
             std::optional<std::size_t> runs, const std::string& outDir, unsigned threads) {
  auto cfg = readConfig(configPath);
  if (seed) cfg.masterSeed = *seed;
  if (runs) {
    if (*runs < 1) throw Error(ErrorKind::Validation, "--runs: must be at least 1");
    cfg.mcRuns = *runs;
  }
  const auto result = runMonteCarlo(cfg, threads);
  for (const auto& r : result.runs) {
    if (!r.error.empty()) std::cerr << "run " << r.runIndex << " failed: " << r.error << "\n";
  }
  const auto trajectories = result.trajectories();
  if (outDir.empty()) {
    writeTrajectoriesCsv(trajectories, std::cout);
  } else {
    std::filesystem::create_directories(outDir);
    exportTrajectories(trajectories, std::filesystem::path(outDir) / "trajectories.csv");
    emitPlotData(trajectories, 0, std::filesystem::path(outDir) / "plot");
    std::cerr << "wrote " << trajectories.size() << " run(s) to " << outDir << " (fingerprint "
              << result.fingerprint << ")\n";
  }
  return result.failures() == 0 ? 0 : 2;
}

int analyze(const std::string& configPath, bool empirical) {
  const auto cfg = readConfig(configPath);
  const auto net = buildNetwork(cfg);
  const auto& h = cfg.hypotheses;
  const auto strategy = effectiveStrategy(cfg);
  RegimeReport report;
  if (std::holds_alternative<PartialSharing>(strategy)) {
    report = predictPartialRegime(cfg.likelihood, h.trueIndex, h.txIndex);
  } else if (std::holds_alternative<SelfAwarePartialSharing>(strategy)) {
    report = predictSelfAwareRegime(cfg.likelihood, net, h.trueIndex, h.txIndex);
  } else if (std::holds_alternative<FullSharing>(strategy)) {
    report = predictFullSharingRegime(cfg.likelihood, h.trueIndex, h.txIndex);
  } else {
    throw Error(ErrorKind::Validation, "strategy: no regime prediction exists for " + strategyName(strategy));
  }

  if (empirical) {
    const auto traj = simulateRun(cfg, net, 0);
    const std::size_t last = traj.iterations();
    EmpiricalSummary summary;
    for (std::size_t th = 0; th < traj.hypotheses(); ++th) summary.finalBeliefs.push_back(traj.belief(last, 0, th));
    const std::size_t window = std::min<std::size_t>(500, last);
    summary.verdict = detectConvergence(traj, 0.999, window, h.txIndex).describe();
    if (std::holds_alternative<PartialSharing>(strategy) && h.txIndex != h.trueIndex) {
      const std::size_t theta = h.trueIndex;
      try {
        summary.measuredRate = measureEmpiricalRate(traj, theta, h.txIndex, last / 10);
      } catch (const Error& e) {
        std::cerr << "notice: " << e.what() << "\n";
      }
    }
    report.empirical = summary;
  }
  std::cout << toJson(report).dump(2) << "\n";
  return 0;
}

int describeNetwork(const std::string& configPath) {
  const auto cfg = readConfig(configPath);
  const auto net = buildNetwork(cfg);
  nlohmann::json j;
  j["agents"] = net.size();
  j["stronglyConnectedComponents"] = net.adjacency().stronglyConnectedComponents();
  j["lambda"] = cfg.network.lambda;
  std::vector<double> perron(net.perron().data(), net.perron().data() + net.perron().size());
  j["perron"] = perron;
  j["alpha"] = net.alpha();
  j["lemma4WeightSum"] = net.lemma4Sum();
  nlohmann::json matrix = nlohmann::json::array();
  for (std::size_t l = 0; l < net.size(); ++l) {
    std::vector<double> row;
    for (std::size_t k = 0; k < net.size(); ++k) row.push_back(net.weight(l, k));
    matrix.push_back(row);
  }
  j["combinationMatrix"] = matrix;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int reproduce(const std::string& suite, const std::string& outDir, unsigned threads) {
  std::vector<std::string> suites = suite == "all" ? suiteNames() : std::vector<std::string>{suite};
  std::optional<std::filesystem::path> dir;
  if (!outDir.empty()) dir = outDir;
  bool ok = true;
  for (const auto& name : suites) {
    const auto report = reproducePaper(name, dir, threads);
    for (const auto& c : report.criteria) {
      std::printf("%-6s %s: %s  [%s]\n", c.passed ? "PASS" : "FAIL", name.c_str(), c.name.c_str(), c.detail.c_str());
    }
    ok = ok && report.passed();
  }
  std::fflush(stdout);
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-belief social learning simulator"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: PBNET_THREADS or hardware count)");

  std::string configPath;
  std::string outDir;
  std::string format = "csv";

  auto* sim = app.add_subcommand("simulate", "Run Monte Carlo simulations and export trajectories");
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  sim->add_option("--config", configPath, "Config JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Override masterSeed");
  sim->add_option("--runs", runs, "Override mcRuns");
  sim->add_option("--out", outDir, "Output directory (CSV to stdout when omitted)");
  sim->add_option("--format", format, "Export format")->check(CLI::IsMember({"csv"}));

  auto* ana = app.add_subcommand("analyze", "Print the predicted regime as JSON");
  bool empirical = false;
  ana->add_option("--config", configPath, "Config JSON")->required()->check(CLI::ExistingFile);
  ana->add_flag("--empirical", empirical, "Also simulate run 0 and attach its summary");

  auto* net = app.add_subcommand("network", "Network utilities");
  net->require_subcommand(1);
  auto* describe = net->add_subcommand("describe", "Perron vector and weight constants as JSON");
  describe->add_option("--config", configPath, "Config JSON")->required()->check(CLI::ExistingFile);

  auto* rep = app.add_subcommand("reproduce", "Run a bundled experiment suite");
  std::string suite;
  rep->add_option("suite", suite, "fig_na, fig_sa, fig_oscill, fig_max or all")->required();
  rep->add_option("--out", outDir, "Directory for plot data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) return simulate(configPath, seed, runs, outDir, threads);
    if (*ana) return analyze(configPath, empirical);
    if (*describe) return describeNetwork(configPath);
    if (*rep) return reproduce(suite, outDir, threads);
  } catch (const Error& e) {
    std::cerr << "error (" << toString(e.kind()) << "): " << e.what() << "\n";
    return e.exitCode();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (Io): " << e.what() << "\n";
    return 1;
  }
  return 1;
}
