#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "pbnet/analysis.hpp"
#include "pbnet/dynamics.hpp"
#include "pbnet/error.hpp"
#include "pbnet/likelihoods.hpp"
#include "pbnet/network.hpp"
#include "pbnet/trajectory.hpp"

namespace pbnet {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kDefaultHorizon = 5000;
inline constexpr std::size_t kDefaultAgents = 10;

struct NetworkSpec {
  enum class Source { Preset, Explicit, Random };
  Source source = Source::Preset;
  std::string preset = "ring";
  std::size_t agents = kDefaultAgents;
  Adjacency adjacency;         // Explicit only
  double edgeProbability = 0;  // Random only
  std::uint64_t graphSeed = 0; // Random only
  double lambda = 0.5;
};

struct InitialBeliefs {
  enum class Kind { Uniform, Explicit, RandomDirichlet };
  Kind kind = Kind::Uniform;
  std::vector<std::vector<double>> table;  // Explicit only: one row per agent
};

struct SimulationConfig {
  HypothesisSet hypotheses;
  LikelihoodModel likelihood;
  NetworkSpec network;
  SharingStrategy strategy;
  std::size_t horizon = kDefaultHorizon;
  std::size_t mcRuns = 1;
  std::uint64_t masterSeed = 0;
  InitialBeliefs initialBeliefs;
  bool retainObservations = false;
  // Informational messages produced while loading (defaults applied, etc.).
  std::vector<std::string> notices;
};

// Parses and validates the JSON schema; errors name the offending field
// path, e.g. "likelihood.pmf[0]". Throws Error(Parse) / Error(Validation).
SimulationConfig parseConfig(const nlohmann::json& document);
SimulationConfig parseConfigText(const std::string& text);
SimulationConfig loadConfig(const std::filesystem::path& path);

// Normalized JSON form; parseConfig(configToJson(c)) reproduces c.
nlohmann::json configToJson(const SimulationConfig& config);
// 16 hex digits of FNV-1a over the normalized JSON.
std::string configFingerprint(const SimulationConfig& config);

Network buildNetwork(const SimulationConfig& config);
// Strategy re-targeted at config.hypotheses.txIndex where applicable.
SharingStrategy effectiveStrategy(const SimulationConfig& config);

// One run with seed deriveRunSeed(masterSeed, runIndex). Initial beliefs are
// drawn first (flat Dirichlet), then one observation per agent per iteration.
Trajectory simulateRun(const SimulationConfig& config, const Network& net, std::size_t runIndex);

struct RunOutcome {
  std::size_t runIndex = 0;
  std::uint64_t seed = 0;
  std::optional<Trajectory> trajectory;
  std::string error;  // empty on success
};

struct MonteCarloResult {
  std::string fingerprint;
  std::vector<RunOutcome> runs;  // ordered by run index

  std::vector<Trajectory> trajectories() const;
  std::size_t failures() const;
};

// 0 means: read PBNET_THREADS, and if unset or 0 use the hardware count.
unsigned resolveThreadCount(unsigned requested = 0);

// Runs are independent; results do not depend on `threads`.
MonteCarloResult runMonteCarlo(const SimulationConfig& config, unsigned threads = 0);

// CSV: header run,iteration,agent,hypothesis,belief preceded by a
// "# fingerprint=<hex>" line. Agents and hypotheses are 1-based, iterations
// run 1..horizon, runs are 0-based. Refuses trajectories with differing
// fingerprints.
void writeTrajectoriesCsv(std::span<const Trajectory> trajectories, std::ostream& out);
void exportTrajectories(std::span<const Trajectory> trajectories, const std::filesystem::path& path);

// One file per hypothesis, agent<a>_theta<t>.csv with columns
// iteration,mean,min,max of the belief across runs. `agent` is 0-based.
void emitPlotData(std::span<const Trajectory> trajectories, std::size_t agent,
                  const std::filesystem::path& directory);

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CriterionResult> criteria;

  bool passed() const;
};

// Suite names: fig_na, fig_sa, fig_oscill, fig_max. Plot data goes to
// `outDir` when given.
SuiteReport reproducePaper(const std::string& suite,
                           const std::optional<std::filesystem::path>& outDir = std::nullopt,
                           unsigned threads = 0);

std::vector<std::string> suiteNames();

}  // namespace pbnet
