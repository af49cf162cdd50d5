#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"

#include "pbnet/fixtures.hpp"
#include "pbnet/harness.hpp"

using namespace pbnet;
namespace fs = std::filesystem;

namespace {

const char* kPaperConfig = R"({
  "schemaVersion": 1,
  "hypotheses": {"count": 3, "trueIndex": 1, "txIndex": 2},
  "likelihood": {"family": "gaussian", "means": [0, 0.2, 1]},
  "network": {"preset": "ring", "agents": 10, "lambda": 0.5},
  "strategy": "partial",
  "horizon": 5000,
  "mcRuns": 3,
  "masterSeed": 7
})";

nlohmann::json paperJson() { return nlohmann::json::parse(kPaperConfig); }

std::string validationMessage(const nlohmann::json& doc) {
  try {
    parseConfig(doc);
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::Validation));
    return e.what();
  }
  FAIL("config was accepted");
  return {};
}

struct CsvRow {
  std::size_t run, iteration, agent, hypothesis;
  double belief;
};

std::vector<CsvRow> parseCsv(const std::string& text, std::string* fingerprint = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (fingerprint) *fingerprint = line.substr(line.find('=') + 1);
  std::getline(in, line);
  CHECK(line == "run,iteration,agent,hypothesis,belief");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    CsvRow r{};
    char c;
    std::istringstream fields(line);
    fields >> r.run >> c >> r.iteration >> c >> r.agent >> c >> r.hypothesis >> c >> r.belief;
    rows.push_back(r);
  }
  return rows;
}

std::string csvOf(const std::vector<Trajectory>& t) {
  std::ostringstream out;
  writeTrajectoriesCsv(t, out);
  return out.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pbnet_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<double>> readPlot(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,mean,min,max");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) v.push_back(std::stod(cell));
    rows.push_back(v);
  }
  return rows;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("published gaussian setup parses") {
  const auto cfg = parseConfig(paperJson());
  CHECK(cfg.hypotheses.trueIndex == 0);
  CHECK(cfg.hypotheses.txIndex == 1);
  CHECK(cfg.network.agents == 10);
  CHECK(std::get<PartialSharing>(cfg.strategy).tx == 1);
  CHECK(cfg.notices.empty());
  const auto net = buildNetwork(cfg);
  CHECK(net.weight(0, 0) == 0.5);
  CHECK(net.weight(1, 0) == 0.25);
}

TEST_CASE("config errors name the field") {
  auto doc = nlohmann::json::parse(R"({
    "hypotheses": {"trueIndex": 1, "txIndex": 2},
    "likelihood": {"family": "discrete", "pmf": [[0.5, 0.3, 0.1], [0.2, 0.3, 0.5]]},
    "network": {"preset": "ring", "agents": 4, "lambda": 0.5},
    "strategy": "partial", "masterSeed": 1
  })");
  CHECK(validationMessage(doc).find("likelihood.pmf[0]") != std::string::npos);

  auto bad = paperJson();
  bad["hypotheses"]["txIndex"] = 4;
  CHECK(validationMessage(bad).find("hypotheses.txIndex") != std::string::npos);
  bad = paperJson();
  bad["network"]["lambda"] = 0.0;
  CHECK(validationMessage(bad).find("network.lambda") != std::string::npos);
  bad = paperJson();
  bad["horizon"] = 0;
  CHECK(validationMessage(bad).find("horizon") != std::string::npos);
  bad = paperJson();
  bad["mcRuns"] = 0;
  CHECK(validationMessage(bad).find("mcRuns") != std::string::npos);
  bad = paperJson();
  bad["strategy"] = "gossip";
  CHECK(validationMessage(bad).find("strategy") != std::string::npos);
  bad = paperJson();
  bad["masterseed"] = 3;
  CHECK(validationMessage(bad).find("masterseed") != std::string::npos);
  bad = paperJson();
  bad["initialBeliefs"] = nlohmann::json::array();
  for (int k = 0; k < 10; ++k) bad["initialBeliefs"].push_back({0.5, 0.5, 0.0});
  CHECK(validationMessage(bad).find("initialBeliefs[0]") != std::string::npos);
  bad["initialBeliefs"][0] = {0.5, 0.4, 0.2};
  CHECK(validationMessage(bad).find("initialBeliefs[0]") != std::string::npos);
  bad = paperJson();
  bad["network"] = {{"adjacency", {{1, 1}, {0, 1}}}, {"lambda", 0.5}};
  CHECK_THROWS_AS(parseConfig(bad), Error);
  bad = paperJson();
  bad["schemaVersion"] = 2;
  CHECK(validationMessage(bad).find("schemaVersion") != std::string::npos);

  try {
    parseConfigText("{ not json");
    FAIL("accepted malformed JSON");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::Parse));
  }
}

TEST_CASE("missing master seed defaults to zero with a notice") {
  auto doc = paperJson();
  doc.erase("masterSeed");
  const auto cfg = parseConfig(doc);
  CHECK(cfg.masterSeed == 0);
  REQUIRE(cfg.notices.size() == 1);
  CHECK(cfg.notices.front().find("masterSeed") != std::string::npos);
}

TEST_CASE("normalized form round-trips") {
  auto doc = paperJson();
  doc["network"] = {{"random", {{"agents", 7}, {"edgeProbability", 0.4}, {"seed", 3}}}, {"lambda", 0.3}};
  doc["initialBeliefs"] = "dirichlet";
  const auto cfg = parseConfig(doc);
  const auto again = parseConfig(configToJson(cfg));
  CHECK(configFingerprint(cfg) == configFingerprint(again));
  CHECK(again.network.adjacency == cfg.network.adjacency);
  CHECK(configFingerprint(cfg).size() == 16);
  doc["masterSeed"] = 8;
  CHECK(configFingerprint(parseConfig(doc)) != configFingerprint(cfg));
}

TEST_CASE("bundled configs load") {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(PBNET_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto cfg = loadConfig(entry.path());
    CHECK_NOTHROW(buildNetwork(cfg));
    ++count;
  }
  CHECK(count >= 4);
}

TEST_CASE("run seeds") {
  CHECK(deriveRunSeed(0, 0) == splitMix64(0x9E3779B97F4A7C15ULL));
  CHECK(deriveRunSeed(5, 2) == splitMix64(5 + 3 * 0x9E3779B97F4A7C15ULL));
  CHECK(deriveRunSeed(5, 2) != deriveRunSeed(5, 3));
}

TEST_CASE("monte carlo is reproducible run by run and across thread counts") {
  auto cfg = parseConfig(paperJson());
  cfg.horizon = 300;
  cfg.mcRuns = 6;
  cfg.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
  const auto serial = runMonteCarlo(cfg, 1);
  const auto parallel = runMonteCarlo(cfg, 4);
  CHECK(serial.failures() == 0);
  CHECK(csvOf(serial.trajectories()) == csvOf(parallel.trajectories()));

  const auto alone = simulateRun(cfg, buildNetwork(cfg), 4);
  const auto& fromBatch = *serial.runs[4].trajectory;
  CHECK(alone.runSeed == deriveRunSeed(cfg.masterSeed, 4));
  CHECK(csvOf({alone}) == csvOf({fromBatch}));
}

TEST_CASE("a failing run leaves the others intact") {
  SimulationConfig cfg;
  cfg.hypotheses = {2, 0, 1};
  // Observing support point 1 gives hypothesis 2 zero likelihood.
  cfg.likelihood = LikelihoodModel::discreteUnchecked({{0.999, 0.001}, {1.0, 0.0}});
  cfg.network.adjacency = Adjacency::ring(10);
  cfg.strategy = FullSharing{};
  cfg.horizon = 100;
  cfg.mcRuns = 12;
  cfg.masterSeed = 1;
  const auto result = runMonteCarlo(cfg, 3);
  REQUIRE(result.runs.size() == 12);
  CHECK(result.failures() > 0);
  CHECK(result.failures() < 12);
  const auto net = buildNetwork(cfg);
  for (std::size_t r = 0; r < 12; ++r) {
    CHECK(result.runs[r].runIndex == r);
    if (result.runs[r].trajectory) {
      CHECK(result.runs[r].error.empty());
      CHECK(csvOf({*result.runs[r].trajectory}) == csvOf({simulateRun(cfg, net, r)}));
    } else {
      CHECK_FALSE(result.runs[r].error.empty());
    }
  }
}

TEST_CASE("csv export") {
  SimulationConfig cfg;
  cfg.hypotheses = {2, 0, 1};
  cfg.likelihood = LikelihoodModel::gaussian({0.0, 1.0});
  cfg.network.adjacency = Adjacency::complete(2);
  cfg.strategy = PartialSharing{1};
  cfg.horizon = 2;
  const auto t = simulateRun(cfg, buildNetwork(cfg), 0);
  const auto rows = parseCsv(csvOf({t}));
  CHECK(rows.size() == 8);

  auto big = parseConfig(paperJson());
  big.horizon = 50;
  big.mcRuns = 2;
  big.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
  const auto trajectories = runMonteCarlo(big, 1).trajectories();
  std::string fingerprint;
  const auto parsed = parseCsv(csvOf(trajectories), &fingerprint);
  CHECK(fingerprint == configFingerprint(big));
  REQUIRE(parsed.size() == 2 * 50 * 10 * 3);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> sums;
  for (std::size_t j = 0; j < parsed.size(); ++j) {
    const auto& r = parsed[j];
    CHECK(std::abs(r.belief - trajectories[r.run].belief(r.iteration, r.agent - 1, r.hypothesis - 1)) <= 1e-11);
    sums[{r.run, r.iteration, r.agent}] += r.belief;
    if (j > 0) {
      const auto& p = parsed[j - 1];
      CHECK(std::tie(p.run, p.iteration, p.agent, p.hypothesis) < std::tie(r.run, r.iteration, r.agent, r.hypothesis));
    }
  }
  for (const auto& [key, sum] : sums) CHECK(std::abs(sum - 1.0) <= 1e-9);

  const auto dir = scratch("csv");
  exportTrajectories(trajectories, dir / "t.csv");
  std::ifstream in(dir / "t.csv");
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == csvOf(trajectories));
  CHECK_THROWS_AS(exportTrajectories(trajectories, dir / "missing" / "t.csv"), Error);
}

TEST_CASE("mixed fingerprints are refused") {
  auto a = parseConfig(paperJson());
  a.horizon = 5;
  auto b = a;
  b.masterSeed = 99;
  const std::vector<Trajectory> mixed{simulateRun(a, buildNetwork(a), 0), simulateRun(b, buildNetwork(b), 0)};
  std::ostringstream out;
  CHECK_THROWS_AS(writeTrajectoriesCsv(mixed, out), Error);
  CHECK_THROWS_AS(emitPlotData(mixed, 0, scratch("mixed")), Error);
}

TEST_CASE("plot data") {
  auto cfg = fixtures::paperConfig(fixtures::gaussianFamily(), PartialSharing{2}, 2, 0.5);
  cfg.horizon = 400;
  const auto single = runMonteCarlo(cfg, 1).trajectories();
  const auto dir = scratch("plot_single");
  emitPlotData(single, 0, dir);
  for (int th = 1; th <= 3; ++th) {
    const auto rows = readPlot(dir / ("agent1_theta" + std::to_string(th) + ".csv"));
    CHECK(rows.size() == 401);
    for (const auto& r : rows) {
      CHECK(r[1] == r[2]);
      CHECK(r[1] == r[3]);
    }
  }

  cfg.mcRuns = 4;
  cfg.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
  const auto many = runMonteCarlo(cfg, 2).trajectories();
  const auto dir2 = scratch("plot_many");
  emitPlotData(many, 0, dir2);
  const auto t1 = readPlot(dir2 / "agent1_theta1.csv");
  const auto t2 = readPlot(dir2 / "agent1_theta2.csv");
  for (std::size_t i = 1; i < t1.size(); ++i)
    for (int c = 1; c <= 3; ++c) CHECK(std::abs(t1[i][c] - t2[i][c]) <= 1e-9);
  CHECK_THROWS_AS(emitPlotData(many, 10, dir2), Error);

  auto truth = fixtures::paperConfig(fixtures::gaussianFamily(), PartialSharing{0}, 0, 0.5);
  truth.mcRuns = 3;
  const auto converged = runMonteCarlo(truth, 0).trajectories();
  const auto dir3 = scratch("plot_truth");
  emitPlotData(converged, 0, dir3);
  CHECK(readPlot(dir3 / "agent1_theta1.csv").back()[1] > 0.999);
}

TEST_CASE("thread count resolution") {
  CHECK(resolveThreadCount(3) == 3);
  setenv("PBNET_THREADS", "2", 1);
  CHECK(resolveThreadCount(0) == 2);
  setenv("PBNET_THREADS", "0", 1);
  CHECK(resolveThreadCount(0) >= 1);
  setenv("PBNET_THREADS", "many", 1);
  CHECK_THROWS_AS(resolveThreadCount(0), Error);
  unsetenv("PBNET_THREADS");
}

TEST_CASE("unknown suite") {
  CHECK_THROWS_AS(reproducePaper("fig_zz"), Error);
  CHECK(suiteNames().size() == 4);
}

}
