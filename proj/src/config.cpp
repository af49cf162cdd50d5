#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pbnet/harness.hpp"

namespace pbnet {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::Validation, path + ": " + message);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "required field is missing");
  return *it;
}

void rejectUnknownKeys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& path) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

double asReal(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

std::uint64_t asUnsigned(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    fail(path, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> asRealArray(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(asReal(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::vector<double>> asRealTable(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(asRealArray(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// 1-based label in the file, 0-based index in memory.
std::size_t asLabel(const json& v, const std::string& path) {
  const std::uint64_t label = asUnsigned(v, path);
  if (label == 0) fail(path, "labels are 1-based");
  return static_cast<std::size_t>(label - 1);
}

LikelihoodModel parseLikelihood(const json& j) {
  if (!j.is_object()) fail("likelihood", "expected an object");
  const auto& family = require(j, "family", "likelihood");
  if (!family.is_string()) fail("likelihood.family", "expected a string");
  const auto name = family.get<std::string>();
  if (name == "gaussian") {
    rejectUnknownKeys(j, {"family", "means"}, "likelihood");
    return LikelihoodModel::gaussian(asRealArray(require(j, "means", "likelihood"), "likelihood.means"));
  }
  if (name == "discrete") {
    rejectUnknownKeys(j, {"family", "pmf"}, "likelihood");
    return LikelihoodModel::discrete(asRealTable(require(j, "pmf", "likelihood"), "likelihood.pmf"));
  }
  fail("likelihood.family", "expected \"gaussian\" or \"discrete\"");
}

NetworkSpec parseNetwork(const json& j) {
  if (!j.is_object()) fail("network", "expected an object");
  NetworkSpec spec;
  spec.lambda = asReal(require(j, "lambda", "network"), "network.lambda");
  if (!(spec.lambda > 0.0 && spec.lambda <= 1.0)) fail("network.lambda", "must lie in (0, 1)");

  const int sources = j.contains("preset") + j.contains("adjacency") + j.contains("random");
  if (sources != 1) fail("network", "exactly one of preset, adjacency or random is required");

  if (j.contains("preset")) {
    rejectUnknownKeys(j, {"preset", "agents", "lambda"}, "network");
    spec.source = NetworkSpec::Source::Preset;
    if (!j["preset"].is_string()) fail("network.preset", "expected a string");
    spec.preset = j["preset"].get<std::string>();
    if (spec.preset != "ring" && spec.preset != "complete" && spec.preset != "star") {
      fail("network.preset", "expected ring, complete or star");
    }
    spec.agents = j.contains("agents") ? asUnsigned(j["agents"], "network.agents") : kDefaultAgents;
    if (spec.agents == 0) fail("network.agents", "must be at least 1");
    spec.adjacency = Adjacency::preset(spec.preset, spec.agents);
  } else if (j.contains("adjacency")) {
    rejectUnknownKeys(j, {"adjacency", "lambda"}, "network");
    spec.source = NetworkSpec::Source::Explicit;
    const auto& rows = j["adjacency"];
    if (!rows.is_array() || rows.empty()) fail("network.adjacency", "expected a square 0/1 matrix");
    const std::size_t n = rows.size();
    spec.agents = n;
    spec.adjacency = Adjacency(n);
    for (std::size_t l = 0; l < n; ++l) {
      const std::string rowPath = "network.adjacency[" + std::to_string(l) + "]";
      if (!rows[l].is_array() || rows[l].size() != n) fail(rowPath, "expected " + std::to_string(n) + " entries");
      for (std::size_t k = 0; k < n; ++k) {
        const auto& cell = rows[l][k];
        const std::string cellPath = rowPath + "[" + std::to_string(k) + "]";
        if (!cell.is_number_integer() && !cell.is_boolean()) fail(cellPath, "expected 0 or 1");
        const bool on = cell.is_boolean() ? cell.get<bool>() : cell.get<int>() != 0;
        if (cell.is_number_integer() && cell.get<int>() != 0 && cell.get<int>() != 1) {
          fail(cellPath, "expected 0 or 1");
        }
        spec.adjacency.setEdge(l, k, on);
      }
    }
  } else {
    rejectUnknownKeys(j, {"random", "lambda"}, "network");
    spec.source = NetworkSpec::Source::Random;
    const auto& r = j["random"];
    if (!r.is_object()) fail("network.random", "expected an object");
    rejectUnknownKeys(r, {"agents", "edgeProbability", "seed"}, "network.random");
    spec.agents = asUnsigned(require(r, "agents", "network.random"), "network.random.agents");
    if (spec.agents == 0) fail("network.random.agents", "must be at least 1");
    spec.edgeProbability =
        asReal(require(r, "edgeProbability", "network.random"), "network.random.edgeProbability");
    if (!(spec.edgeProbability > 0.0 && spec.edgeProbability <= 1.0)) {
      fail("network.random.edgeProbability", "must lie in (0, 1]");
    }
    spec.graphSeed = r.contains("seed") ? asUnsigned(r["seed"], "network.random.seed") : 0;
    Rng rng(spec.graphSeed);
    spec.adjacency = generateStronglyConnectedGraph(spec.agents, spec.edgeProbability, rng);
  }
  Network::averaging(spec.adjacency, spec.lambda);
  return spec;
}

SharingStrategy parseStrategy(const json& j, std::size_t tx) {
  if (!j.is_string()) fail("strategy", "expected a string");
  const auto name = j.get<std::string>();
  if (name == "full") return FullSharing{};
  if (name == "partial") return PartialSharing{tx};
  if (name == "self_aware") return SelfAwarePartialSharing{tx};
  if (name == "max_belief") return MaxBeliefSharing{false};
  if (name == "max_belief_self_aware") return MaxBeliefSharing{true};
  fail("strategy", "expected full, partial, self_aware, max_belief or max_belief_self_aware");
}

InitialBeliefs parseInitial(const json& j, std::size_t agents, std::size_t hypotheses) {
  InitialBeliefs init;
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "uniform") return init;
    if (name == "dirichlet") {
      init.kind = InitialBeliefs::Kind::RandomDirichlet;
      return init;
    }
    fail("initialBeliefs", "expected \"uniform\", \"dirichlet\" or a table");
  }
  init.kind = InitialBeliefs::Kind::Explicit;
  init.table = asRealTable(j, "initialBeliefs");
  if (init.table.size() != agents) fail("initialBeliefs", "expected one row per agent");
  for (std::size_t k = 0; k < agents; ++k) {
    const std::string path = "initialBeliefs[" + std::to_string(k) + "]";
    const auto& row = init.table[k];
    if (row.size() != hypotheses) fail(path, "expected one entry per hypothesis");
    double sum = 0.0;
    for (double p : row) {
      if (!(p > 0.0)) fail(path, "beliefs must be strictly positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail(path, "row must sum to 1");
  }
  return init;
}

json adjacencyToJson(const Adjacency& a) {
  json rows = json::array();
  for (std::size_t l = 0; l < a.size(); ++l) {
    json row = json::array();
    for (std::size_t k = 0; k < a.size(); ++k) row.push_back(a.hasEdge(l, k) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

SimulationConfig parseConfig(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "config: top level must be a JSON object");
  rejectUnknownKeys(doc,
                    {"schemaVersion", "hypotheses", "likelihood", "network", "strategy", "horizon",
                     "mcRuns", "masterSeed", "initialBeliefs", "retainObservations"},
                    "");
  SimulationConfig cfg;

  if (doc.contains("schemaVersion")) {
    if (asUnsigned(doc["schemaVersion"], "schemaVersion") != kSchemaVersion) {
      fail("schemaVersion", "unsupported version (expected 1)");
    }
  } else {
    cfg.notices.push_back("schemaVersion missing; assuming 1");
  }

  cfg.likelihood = parseLikelihood(require(doc, "likelihood", ""));
  const std::size_t h = cfg.likelihood.hypothesisCount();

  const auto& hyp = require(doc, "hypotheses", "");
  if (!hyp.is_object()) fail("hypotheses", "expected an object");
  rejectUnknownKeys(hyp, {"count", "trueIndex", "txIndex"}, "hypotheses");
  cfg.hypotheses.count = hyp.contains("count") ? asUnsigned(hyp["count"], "hypotheses.count") : h;
  if (cfg.hypotheses.count != h) fail("hypotheses.count", "does not match the likelihood family");
  cfg.hypotheses.trueIndex = asLabel(require(hyp, "trueIndex", "hypotheses"), "hypotheses.trueIndex");
  cfg.hypotheses.txIndex = asLabel(require(hyp, "txIndex", "hypotheses"), "hypotheses.txIndex");
  if (cfg.hypotheses.trueIndex >= h) fail("hypotheses.trueIndex", "out of range");
  if (cfg.hypotheses.txIndex >= h) fail("hypotheses.txIndex", "out of range");

  cfg.network = parseNetwork(require(doc, "network", ""));
  cfg.strategy = parseStrategy(require(doc, "strategy", ""), cfg.hypotheses.txIndex);

  if (doc.contains("horizon")) {
    cfg.horizon = asUnsigned(doc["horizon"], "horizon");
    if (cfg.horizon < 1) fail("horizon", "must be at least 1");
  } else {
    cfg.notices.push_back("horizon missing; defaulting to 5000");
  }
  if (doc.contains("mcRuns")) {
    cfg.mcRuns = asUnsigned(doc["mcRuns"], "mcRuns");
    if (cfg.mcRuns < 1) fail("mcRuns", "must be at least 1");
  }
  if (doc.contains("masterSeed")) {
    cfg.masterSeed = asUnsigned(doc["masterSeed"], "masterSeed");
  } else {
    cfg.notices.push_back("masterSeed missing; defaulting to 0");
  }
  cfg.initialBeliefs = doc.contains("initialBeliefs")
                           ? parseInitial(doc["initialBeliefs"], cfg.network.agents, h)
                           : InitialBeliefs{};
  if (doc.contains("retainObservations")) {
    if (!doc["retainObservations"].is_boolean()) fail("retainObservations", "expected a boolean");
    cfg.retainObservations = doc["retainObservations"].get<bool>();
  }
  return cfg;
}

SimulationConfig parseConfigText(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  return parseConfig(doc);
}

SimulationConfig loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseConfigText(buffer.str());
}

json configToJson(const SimulationConfig& cfg) {
  json j;
  j["schemaVersion"] = kSchemaVersion;
  j["hypotheses"] = {{"count", cfg.hypotheses.count},
                     {"trueIndex", cfg.hypotheses.trueIndex + 1},
                     {"txIndex", cfg.hypotheses.txIndex + 1}};
  if (cfg.likelihood.family() == Family::Gaussian) {
    const auto m = cfg.likelihood.means();
    j["likelihood"] = {{"family", "gaussian"}, {"means", std::vector<double>(m.begin(), m.end())}};
  } else {
    j["likelihood"] = {{"family", "discrete"}, {"pmf", cfg.likelihood.pmf()}};
  }
  const auto& net = cfg.network;
  switch (net.source) {
    case NetworkSpec::Source::Preset:
      j["network"] = {{"preset", net.preset}, {"agents", net.agents}, {"lambda", net.lambda}};
      break;
    case NetworkSpec::Source::Explicit:
      j["network"] = {{"adjacency", adjacencyToJson(net.adjacency)}, {"lambda", net.lambda}};
      break;
    case NetworkSpec::Source::Random:
      j["network"] = {{"random", {{"agents", net.agents},
                                  {"edgeProbability", net.edgeProbability},
                                  {"seed", net.graphSeed}}},
                      {"lambda", net.lambda}};
      break;
  }
  j["strategy"] = strategyName(cfg.strategy);
  j["horizon"] = cfg.horizon;
  j["mcRuns"] = cfg.mcRuns;
  j["masterSeed"] = cfg.masterSeed;
  switch (cfg.initialBeliefs.kind) {
    case InitialBeliefs::Kind::Uniform: j["initialBeliefs"] = "uniform"; break;
    case InitialBeliefs::Kind::RandomDirichlet: j["initialBeliefs"] = "dirichlet"; break;
    case InitialBeliefs::Kind::Explicit: j["initialBeliefs"] = cfg.initialBeliefs.table; break;
  }
  j["retainObservations"] = cfg.retainObservations;
  return j;
}

std::string configFingerprint(const SimulationConfig& cfg) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : configToJson(cfg).dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Network buildNetwork(const SimulationConfig& cfg) {
  return Network::averaging(cfg.network.adjacency, cfg.network.lambda);
}

SharingStrategy effectiveStrategy(const SimulationConfig& cfg) {
  SharingStrategy s = cfg.strategy;
  if (auto* p = std::get_if<PartialSharing>(&s)) p->tx = cfg.hypotheses.txIndex;
  if (auto* p = std::get_if<SelfAwarePartialSharing>(&s)) p->tx = cfg.hypotheses.txIndex;
  return s;
}

}  // namespace pbnet
