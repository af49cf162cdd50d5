#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "pbnet/fixtures.hpp"
#include "pbnet/harness.hpp"

namespace pbnet {
namespace {

constexpr double kConvergedThreshold = 0.999;
constexpr std::size_t kFinalWindow = 100;
constexpr std::size_t kSpreadWindow = 500;
constexpr std::uint64_t kSuiteSeed = 20240501;

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

std::string label(std::size_t index) { return std::to_string(index + 1); }

struct CaseRun {
  SimulationConfig config;
  std::vector<Trajectory> trajectories;
  std::vector<std::string> errors;
};

CaseRun runCase(SimulationConfig cfg, std::size_t runs, unsigned threads,
                const std::optional<std::filesystem::path>& outDir, const std::string& name) {
  cfg.mcRuns = runs;
  cfg.masterSeed = kSuiteSeed;
  const auto mc = runMonteCarlo(cfg, threads);
  CaseRun out{cfg, mc.trajectories(), {}};
  for (const auto& r : mc.runs) {
    if (!r.error.empty()) out.errors.push_back("run " + std::to_string(r.runIndex) + ": " + r.error);
  }
  if (outDir && !out.trajectories.empty()) emitPlotData(out.trajectories, 0, *outDir / name);
  return out;
}

// Verdicts of every run, summarized as "ConvergedTo(1) x3" style text.
std::string tally(const std::vector<ConvergenceVerdict>& verdicts) {
  std::map<std::string, int> counts;
  for (const auto& v : verdicts) ++counts[v.describe()];
  std::string s;
  for (const auto& [name, n] : counts) {
    if (!s.empty()) s += ", ";
    s += name + " x" + std::to_string(n);
  }
  return s;
}

std::vector<ConvergenceVerdict> verdicts(const CaseRun& c, std::optional<std::size_t> tx,
                                         std::size_t window = kFinalWindow) {
  std::vector<ConvergenceVerdict> v;
  for (const auto& t : c.trajectories) v.push_back(detectConvergence(t, kConvergedThreshold, window, tx));
  return v;
}

CriterionResult expectAll(const std::string& name, const CaseRun& c, const ConvergenceVerdict& want,
                          std::optional<std::size_t> tx) {
  const std::size_t window =
      want.kind == ConvergenceVerdict::Kind::Oscillating ? kSpreadWindow : kFinalWindow;
  CriterionResult r{name, false, ""};
  if (!c.errors.empty()) {
    r.detail = c.errors.front();
    return r;
  }
  const auto v = verdicts(c, tx, window);
  r.passed = !v.empty();
  for (const auto& x : v) r.passed = r.passed && x == want;
  r.detail = "expected " + want.describe() + ", got " + tally(v);
  return r;
}

SuiteReport figNa(const std::optional<std::filesystem::path>& outDir, unsigned threads) {
  SuiteReport report{"fig_na", {}};
  const auto family = fixtures::gaussianFamily();
  using Kind = ConvergenceVerdict::Kind;
  const ConvergenceVerdict expected[] = {{Kind::ConvergedTo, 0}, {Kind::ConvergedTo, 1}, {Kind::UniformSplit, 0}};
  for (std::size_t tx = 0; tx < 3; ++tx) {
    auto cfg = fixtures::paperConfig(family, PartialSharing{tx}, tx, 0.5);
    const auto c = runCase(cfg, 3, threads, outDir, "thetaTX" + label(tx));
    const auto prediction = predictPartialRegime(family, 0, tx);
    report.criteria.push_back(expectAll("thetaTX=" + label(tx) + " verdict", c, expected[tx], tx));
    bool agrees = c.errors.empty() && !c.trajectories.empty();
    for (const auto& t : c.trajectories) {
      agrees = agrees && verdictAgrees(prediction, detectConvergence(t, kConvergedThreshold, kFinalWindow, tx), t, kFinalWindow);
    }
    report.criteria.push_back({"thetaTX=" + label(tx) + " matches predicted " + toString(prediction.predicted),
                               agrees, "rate " + fmt("%.6f", prediction.rate)});
    if (tx == 2 && c.errors.empty()) {
      double sum = 0.0;
      for (const auto& t : c.trajectories) sum += measureEmpiricalRate(t, 0, tx, 100);
      const double mean = sum / static_cast<double>(c.trajectories.size());
      report.criteria.push_back({"thetaTX=3 empirical rate", std::abs(mean - prediction.rate) <= 0.05,
                                 "measured " + fmt("%.4f", mean) + ", predicted " + fmt("%.4f", prediction.rate)});
    }
  }
  return report;
}

SuiteReport figSa(const std::optional<std::filesystem::path>& outDir, unsigned threads) {
  SuiteReport report{"fig_sa", {}};
  const auto family = fixtures::selfAwareDiscreteFamily();
  const double lambda = 0.03;
  using Kind = ConvergenceVerdict::Kind;
  for (std::size_t tx = 0; tx < 3; ++tx) {
    auto cfg = fixtures::paperConfig(family, SelfAwarePartialSharing{tx}, tx, lambda);
    const auto net = buildNetwork(cfg);
    const auto prediction = predictSelfAwareRegime(family, net, 0, tx);
    const auto c = runCase(cfg, 3, threads, outDir, "thetaTX" + label(tx));
    std::string margins;
    for (const auto& [key, value] : prediction.conditionValues) margins += key + "=" + fmt("%.4f", value) + " ";
    report.criteria.push_back({"thetaTX=" + label(tx) + " predicted " + toString(prediction.predicted),
                               prediction.predicted != Regime::Inconclusive, margins});
    if (tx == 0) {
      report.criteria.push_back(expectAll("thetaTX=1 verdict", c, {Kind::ConvergedTo, 0}, tx));
    } else if (prediction.predicted == Regime::SufficientCondZero) {
      report.criteria.push_back(expectAll("thetaTX=" + label(tx) + " verdict", c, {Kind::Oscillating, 0}, tx));
    } else if (prediction.predicted == Regime::SufficientCondOne) {
      report.criteria.push_back(expectAll("thetaTX=" + label(tx) + " verdict", c, {Kind::ConvergedTo, tx}, tx));
    }
  }
  return report;
}

SuiteReport figOscill(const std::optional<std::filesystem::path>& outDir, unsigned threads) {
  SuiteReport report{"fig_oscill", {}};
  const auto family = fixtures::selfAwareDiscreteFamily();
  const std::size_t tx = 2;
  using Kind = ConvergenceVerdict::Kind;
  double spread[2] = {0.0, 0.0};
  const double lambdas[2] = {0.9, 0.99};
  for (int j = 0; j < 2; ++j) {
    auto cfg = fixtures::paperConfig(family, SelfAwarePartialSharing{tx}, tx, lambdas[j]);
    const auto c = runCase(cfg, 1, threads, outDir, "lambda" + fmt("%g", lambdas[j]));
    report.criteria.push_back(expectAll("lambda=" + fmt("%g", lambdas[j]) + " verdict", c, {Kind::Oscillating, 0}, tx));
    if (!c.trajectories.empty()) spread[j] = logRatioSpread(c.trajectories.front(), 0, 0, 1, kSpreadWindow);
  }
  report.criteria.push_back({"oscillation grows with lambda", spread[1] > spread[0],
                             "std log mu(1)/mu(2): " + fmt("%.4f", spread[0]) + " at 0.9, " +
                                 fmt("%.4f", spread[1]) + " at 0.99"});
  return report;
}

SuiteReport figMax(const std::optional<std::filesystem::path>& outDir, unsigned threads) {
  SuiteReport report{"fig_max", {}};
  const auto family = fixtures::gaussianFamily();
  using Kind = ConvergenceVerdict::Kind;

  auto cfg = fixtures::paperConfig(family, MaxBeliefSharing{}, 0, 0.5);
  const auto uniform = runCase(cfg, 100, threads, outDir, "uniform");
  report.criteria.push_back(expectAll("uniform init: every run learns theta=1", uniform, {Kind::ConvergedTo, 0}, std::nullopt));

  cfg.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
  const auto random = runCase(cfg, 100, threads, outDir, "dirichlet");
  const auto v = verdicts(random, std::nullopt);
  std::size_t truth = 0;
  std::size_t second = 0;
  for (const auto& x : v) {
    truth += x == ConvergenceVerdict{Kind::ConvergedTo, 0};
    second += x == ConvergenceVerdict{Kind::ConvergedTo, 1};
  }
  const std::string counts = tally(v) + (random.errors.empty() ? "" : "; " + random.errors.front());
  report.criteria.push_back({"dirichlet init: some run learns theta=2", random.errors.empty() && second >= 1, counts});
  report.criteria.push_back({"dirichlet init: at least half learn theta=1",
                             random.errors.empty() && 2 * truth >= 100, counts});
  return report;
}

}  // namespace

std::vector<std::string> suiteNames() { return {"fig_na", "fig_sa", "fig_oscill", "fig_max"}; }

SuiteReport reproducePaper(const std::string& suite, const std::optional<std::filesystem::path>& outDir,
                           unsigned threads) {
  const auto dir = outDir ? std::optional(*outDir / suite) : std::nullopt;
  if (suite == "fig_na") return figNa(dir, threads);
  if (suite == "fig_sa") return figSa(dir, threads);
  if (suite == "fig_oscill") return figOscill(dir, threads);
  if (suite == "fig_max") return figMax(dir, threads);
  throw Error(ErrorKind::Validation, "unknown suite '" + suite + "' (expected fig_na, fig_sa, fig_oscill or fig_max)");
}

}  // namespace pbnet
