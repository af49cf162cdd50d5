#include "pbnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace pbnet {
namespace {

std::vector<BeliefVector> initialBeliefs(const SimulationConfig& cfg, std::size_t agents, Rng& rng) {
  const std::size_t h = cfg.hypotheses.count;
  std::vector<BeliefVector> beliefs;
  beliefs.reserve(agents);
  switch (cfg.initialBeliefs.kind) {
    case InitialBeliefs::Kind::Uniform:
      beliefs.assign(agents, BeliefVector::uniform(h));
      break;
    case InitialBeliefs::Kind::Explicit:
      if (cfg.initialBeliefs.table.size() != agents) {
        throw Error(ErrorKind::Validation, "initialBeliefs: expected one row per agent");
      }
      for (const auto& row : cfg.initialBeliefs.table) beliefs.push_back(BeliefVector::fromProbabilities(row));
      break;
    case InitialBeliefs::Kind::RandomDirichlet:
      for (std::size_t k = 0; k < agents; ++k) {
        std::vector<double> draws(h);
        for (auto& d : draws) {
          do {
            d = standardExponential(rng);
          } while (!(d > 0.0));
        }
        beliefs.push_back(BeliefVector::fromProbabilities(draws));
      }
      break;
  }
  return beliefs;
}

void appendNumber(std::string& out, double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.12g", value);
  out.append(buf, static_cast<std::size_t>(len));
}

void appendIndex(std::string& out, std::size_t value) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, res.ptr);
}

void requireSameFingerprint(std::span<const Trajectory> trajectories) {
  for (const auto& t : trajectories) {
    if (t.fingerprint != trajectories.front().fingerprint) {
      throw Error(ErrorKind::Validation, "refusing to mix trajectories from different configs (fingerprints " +
                                             trajectories.front().fingerprint + " and " + t.fingerprint + ")");
    }
  }
}

}  // namespace

Trajectory simulateRun(const SimulationConfig& cfg, const Network& net, std::size_t runIndex) {
  cfg.hypotheses.validate();
  const SharingStrategy strategy = effectiveStrategy(cfg);
  validateStrategy(strategy, cfg.hypotheses.count);
  if (cfg.likelihood.hypothesisCount() != cfg.hypotheses.count) {
    throw Error(ErrorKind::Validation, "likelihood: hypothesis count mismatch");
  }

  const std::size_t agents = net.size();
  Trajectory traj(agents, cfg.hypotheses.count);
  traj.fingerprint = configFingerprint(cfg);
  traj.runIndex = runIndex;
  traj.runSeed = deriveRunSeed(cfg.masterSeed, runIndex);
  traj.reserve(cfg.horizon);

  Rng rng(traj.runSeed);
  NetworkState state{initialBeliefs(cfg, agents, rng), 0};
  traj.record(state.beliefs);

  const std::span<const LikelihoodModel> models(&cfg.likelihood, 1);
  if (cfg.retainObservations) traj.observations.reserve(cfg.horizon);
  for (std::size_t i = 1; i <= cfg.horizon; ++i) {
    auto obs = drawObservations(models, agents, cfg.hypotheses.trueIndex, rng);
    state = advance(state, net, models, strategy, obs);
    traj.record(state.beliefs);
    if (cfg.retainObservations) traj.observations.push_back(std::move(obs));
  }
  return traj;
}

std::vector<Trajectory> MonteCarloResult::trajectories() const {
  std::vector<Trajectory> out;
  for (const auto& run : runs) {
    if (run.trajectory) out.push_back(*run.trajectory);
  }
  return out;
}

std::size_t MonteCarloResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunOutcome& r) { return !r.trajectory; }));
}

unsigned resolveThreadCount(unsigned requested) {
  if (requested == 0) {
    if (const char* env = std::getenv("PBNET_THREADS")) {
      unsigned value = 0;
      const std::string_view text(env);
      const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw Error(ErrorKind::Validation, "PBNET_THREADS: expected a nonnegative integer");
      }
      requested = value;
    }
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

MonteCarloResult runMonteCarlo(const SimulationConfig& cfg, unsigned threads) {
  MonteCarloResult result;
  result.fingerprint = configFingerprint(cfg);
  const Network net = buildNetwork(cfg);
  result.runs.resize(cfg.mcRuns);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.mcRuns; r = next++) {
      RunOutcome& out = result.runs[r];
      out.runIndex = r;
      out.seed = deriveRunSeed(cfg.masterSeed, r);
      try {
        out.trajectory = simulateRun(cfg, net, r);
      } catch (const std::exception& e) {
        out.trajectory.reset();
        out.error = e.what();
      }
    }
  };

  const unsigned count =
      static_cast<unsigned>(std::min<std::size_t>(resolveThreadCount(threads), cfg.mcRuns));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  return result;
}

void writeTrajectoriesCsv(std::span<const Trajectory> trajectories, std::ostream& out) {
  if (!trajectories.empty()) requireSameFingerprint(trajectories);
  std::string buf;
  buf += "# fingerprint=";
  buf += trajectories.empty() ? std::string() : trajectories.front().fingerprint;
  buf += "\nrun,iteration,agent,hypothesis,belief\n";
  for (const auto& t : trajectories) {
    for (std::size_t i = 1; i <= t.iterations(); ++i) {
      for (std::size_t k = 0; k < t.agents(); ++k) {
        const auto row = t.logRow(i, k);
        for (std::size_t th = 0; th < row.size(); ++th) {
          appendIndex(buf, t.runIndex);
          buf += ',';
          appendIndex(buf, i);
          buf += ',';
          appendIndex(buf, k + 1);
          buf += ',';
          appendIndex(buf, th + 1);
          buf += ',';
          appendNumber(buf, std::exp(row[th]));
          buf += '\n';
        }
      }
      if (buf.size() > (1u << 20)) {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing trajectory CSV");
}

void exportTrajectories(std::span<const Trajectory> trajectories, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  writeTrajectoriesCsv(trajectories, out);
  out.close();
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void emitPlotData(std::span<const Trajectory> trajectories, std::size_t agent,
                  const std::filesystem::path& directory) {
  if (trajectories.empty()) throw Error(ErrorKind::Validation, "no trajectories to plot");
  requireSameFingerprint(trajectories);
  const auto& first = trajectories.front();
  if (agent >= first.agents()) throw Error(ErrorKind::Validation, "agent index out of range");
  for (const auto& t : trajectories) {
    if (t.iterations() != first.iterations() || t.hypotheses() != first.hypotheses()) {
      throw Error(ErrorKind::Validation, "trajectories differ in shape");
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + directory.string() + ": " + ec.message());

  for (std::size_t th = 0; th < first.hypotheses(); ++th) {
    const auto path = directory / ("agent" + std::to_string(agent + 1) + "_theta" + std::to_string(th + 1) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    std::string buf = "iteration,mean,min,max\n";
    for (std::size_t i = 0; i <= first.iterations(); ++i) {
      double sum = 0.0;
      double lo = 1.0;
      double hi = 0.0;
      for (const auto& t : trajectories) {
        const double b = t.belief(i, agent, th);
        sum += b;
        lo = std::min(lo, b);
        hi = std::max(hi, b);
      }
      appendIndex(buf, i);
      buf += ',';
      appendNumber(buf, sum / static_cast<double>(trajectories.size()));
      buf += ',';
      appendNumber(buf, lo);
      buf += ',';
      appendNumber(buf, hi);
      buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
  }
}

bool SuiteReport::passed() const {
  return !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

}  // namespace pbnet
