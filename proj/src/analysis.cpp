#include "pbnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbnet/error.hpp"

namespace pbnet {
namespace {

constexpr double kIndistinguishable = 1e-12;
constexpr double kVanishing = 1e-3;
// Log-ratios this small count as ties (rounding noise between equal components).
constexpr double kRatioDeadBand = 1e-9;

void checkIndices(const LikelihoodModel& model, std::size_t trueIndex, std::size_t txIndex) {
  HypothesisSet{model.hypothesisCount(), trueIndex, txIndex}.validate();
}

RegimeReport baseReport(const LikelihoodModel& model, std::size_t trueIndex, std::size_t txIndex,
                        std::string strategy) {
  checkIndices(model, trueIndex, txIndex);
  const std::size_t h = model.hypothesisCount();
  RegimeReport r;
  r.strategy = std::move(strategy);
  r.trueIndex = trueIndex;
  r.txIndex = txIndex;
  r.dKLTrueVsTx = klDivergence(model, trueIndex, txIndex);
  r.dKLTrueVsMixture = klDivergence(model, trueIndex, MixtureSpec::complement(h, txIndex));
  r.rate = r.dKLTrueVsTx - r.dKLTrueVsMixture;
  r.constants["H"] = static_cast<double>(h);
  return r;
}

// Whether mu(tx) < 1e-3 at every agent over the trailing window.
bool txVanishes(const Trajectory& t, std::size_t tx, std::size_t first) {
  for (std::size_t i = first; i <= t.iterations(); ++i)
    for (std::size_t k = 0; k < t.agents(); ++k)
      if (!(t.belief(i, k, tx) < kVanishing)) return false;
  return true;
}

}  // namespace

const char* toString(Regime regime) noexcept {
  switch (regime) {
    case Regime::TruthLearning: return "TruthLearning";
    case Regime::MislearnTx: return "MislearnTx";
    case Regime::UniformSplit: return "UniformSplit";
    case Regime::SufficientCondZero: return "SufficientCondZero";
    case Regime::SufficientCondOne: return "SufficientCondOne";
    case Regime::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

double theoreticalRate(const LikelihoodModel& model, std::size_t trueIndex, std::size_t txIndex) {
  checkIndices(model, trueIndex, txIndex);
  return klDivergence(model, trueIndex, txIndex) -
         klDivergence(model, trueIndex, MixtureSpec::complement(model.hypothesisCount(), txIndex));
}

RegimeReport predictPartialRegime(const LikelihoodModel& model, std::size_t trueIndex,
                                  std::size_t txIndex) {
  RegimeReport r = baseReport(model, trueIndex, txIndex, "partial");
  if (txIndex == trueIndex) {
    const double margin = r.dKLTrueVsMixture;
    r.conditionValues["thm1_true"] = margin;
    r.predicted = margin > kConditionTolerance ? Regime::TruthLearning : Regime::Inconclusive;
    return r;
  }
  if (r.dKLTrueVsTx <= kIndistinguishable) {
    throw Error(ErrorKind::IndistinguishableHypotheses,
                "L(theta0) and L(thetaTX) coincide; the collapse ratio is undefined");
  }
  const double margin = r.dKLTrueVsMixture - r.dKLTrueVsTx;
  r.conditionValues["thm1_ratio"] = margin;
  r.constants["thm1_ratio_value"] = r.dKLTrueVsMixture / r.dKLTrueVsTx;
  if (margin > kConditionTolerance) {
    r.predicted = Regime::MislearnTx;
  } else if (margin < -kConditionTolerance) {
    r.predicted = Regime::UniformSplit;
  } else {
    r.predicted = Regime::Inconclusive;
  }
  return r;
}

RegimeReport predictSelfAwareRegime(const LikelihoodModel& model, const Network& net,
                                    std::size_t trueIndex, std::size_t txIndex) {
  RegimeReport r = baseReport(model, trueIndex, txIndex, "self_aware");
  const std::size_t h = model.hypothesisCount();

  if (txIndex == trueIndex) {
    // Probe the vertices of the simplex over the other hypotheses plus its
    // barycenter. This screens the "every q" condition; it does not certify it.
    double smallest = r.dKLTrueVsMixture;
    for (std::size_t tau = 0; tau < h; ++tau) {
      if (tau == trueIndex) continue;
      smallest = std::min(smallest, klDivergence(model, trueIndex, tau));
    }
    r.conditionValues["thm2_min_probe"] = smallest;
    r.predicted = smallest > kProbeTolerance ? Regime::TruthLearning : Regime::Inconclusive;
    return r;
  }

  const double alpha = net.alpha();
  double others = 0.0;
  for (std::size_t tau = 0; tau < h; ++tau) {
    if (tau != txIndex) others += klDivergence(model, trueIndex, tau);
  }
  const double lem3 = r.dKLTrueVsTx - alpha / static_cast<double>(h - 1) * others;
  r.conditionValues["lem3"] = lem3;
  r.constants["alpha"] = alpha;
  const bool zero = lem3 > kConditionTolerance;

  if (model.family() == Family::Gaussian) {
    if (zero) {
      r.predicted = Regime::SufficientCondZero;
      return r;
    }
    throw Error(ErrorKind::UnboundedLikelihood,
                "Lemma 3 does not hold and the mislearning condition needs bounded likelihoods");
  }

  const double bound = likelihoodBoundM(model, txIndex);
  const double weights = net.lemma4Sum();
  const double lem4 = r.dKLTrueVsMixture - r.dKLTrueVsTx - bound * weights;
  r.conditionValues["lem4"] = lem4;
  r.conditionValues["lem4_plus_sign"] = r.dKLTrueVsMixture - r.dKLTrueVsTx + bound * weights;
  r.constants["M"] = bound;
  r.constants["lemma4WeightSum"] = weights;
  const bool one = lem4 > kConditionTolerance;

  if (zero && one) {
    throw Error(ErrorKind::InternalInconsistency,
                "both self-aware sufficient conditions hold; their conclusions are exclusive");
  }
  r.predicted = zero ? Regime::SufficientCondZero
                     : (one ? Regime::SufficientCondOne : Regime::Inconclusive);
  return r;
}

RegimeReport predictFullSharingRegime(const LikelihoodModel& model, std::size_t trueIndex,
                                      std::size_t txIndex) {
  RegimeReport r = baseReport(model, trueIndex, txIndex, "full");
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t tau = 0; tau < model.hypothesisCount(); ++tau) {
    if (tau != trueIndex) smallest = std::min(smallest, klDivergence(model, trueIndex, tau));
  }
  r.conditionValues["full_min_separation"] = smallest;
  r.predicted = smallest > kConditionTolerance ? Regime::TruthLearning : Regime::Inconclusive;
  return r;
}

double measureEmpiricalRate(const Trajectory& trajectory, std::size_t theta, std::size_t txIndex,
                            std::size_t burnIn, std::size_t agent) {
  if (theta == txIndex) throw Error(ErrorKind::Validation, "rate needs theta != thetaTX");
  if (agent >= trajectory.agents() || theta >= trajectory.hypotheses() ||
      txIndex >= trajectory.hypotheses()) {
    throw Error(ErrorKind::Validation, "rate: agent or hypothesis out of range");
  }
  const std::size_t last = trajectory.iterations();
  if (last < burnIn + 2) {
    throw Error(ErrorKind::Measurement, "trajectory too short for the requested burn-in");
  }
  const double count = static_cast<double>(last - burnIn);
  const double meanX = 0.5 * static_cast<double>(burnIn + 1 + last);
  double meanY = 0.0;
  std::vector<double> ys;
  ys.reserve(last - burnIn);
  for (std::size_t i = burnIn + 1; i <= last; ++i) {
    const double y = trajectory.logBelief(i, agent, theta) - trajectory.logBelief(i, agent, txIndex);
    if (!std::isfinite(y)) throw Error(ErrorKind::Measurement, "non-finite log-ratio in trajectory");
    ys.push_back(y);
    meanY += y;
  }
  meanY /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const double dx = static_cast<double>(burnIn + 1 + j) - meanX;
    sxy += dx * (ys[j] - meanY);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::string ConvergenceVerdict::describe() const {
  switch (kind) {
    case Kind::ConvergedTo: return "ConvergedTo(" + std::to_string(hypothesis + 1) + ")";
    case Kind::UniformSplit: return "UniformSplit";
    case Kind::Oscillating: return "Oscillating";
    case Kind::Undecided: return "Undecided";
  }
  return "Undecided";
}

ConvergenceVerdict detectConvergence(const Trajectory& trajectory, double threshold,
                                     std::size_t window, std::optional<std::size_t> txIndex) {
  using Kind = ConvergenceVerdict::Kind;
  const std::size_t last = trajectory.iterations();
  const std::size_t h = trajectory.hypotheses();
  const std::size_t n = trajectory.agents();
  if (window == 0 || window > last) return {};
  const std::size_t first = last - window + 1;

  for (std::size_t theta = 0; theta < h; ++theta) {
    bool all = true;
    for (std::size_t i = first; i <= last && all; ++i)
      for (std::size_t k = 0; k < n && all; ++k)
        all = trajectory.belief(i, k, theta) > threshold;
    if (all) return {Kind::ConvergedTo, theta};
  }

  if (!txIndex || *txIndex >= h || !txVanishes(trajectory, *txIndex, first)) return {};
  const std::size_t tx = *txIndex;

  // Sign changes of the log-ratio come first: at small self-weights the
  // oscillating components also sit within the uniform-split band.
  if (h >= 3) {
    std::size_t a = (tx == 0) ? 1 : 0;
    std::size_t b = a + 1;
    if (b == tx) ++b;
    bool oscillating = true;
    for (std::size_t k = 0; k < n && oscillating; ++k) {
      int changes = 0;
      int sign = 0;
      for (std::size_t i = first; i <= last; ++i) {
        const double d = trajectory.logBelief(i, k, a) - trajectory.logBelief(i, k, b);
        const int s = (d > kRatioDeadBand) - (d < -kRatioDeadBand);
        if (s == 0) continue;
        if (sign != 0 && s != sign) ++changes;
        sign = s;
      }
      oscillating = changes >= 3;
    }
    if (oscillating) return {Kind::Oscillating, 0};
  }

  const double share = 1.0 / static_cast<double>(h - 1);
  bool uniform = true;
  for (std::size_t i = first; i <= last && uniform; ++i)
    for (std::size_t k = 0; k < n && uniform; ++k)
      for (std::size_t theta = 0; theta < h && uniform; ++theta)
        if (theta != tx) uniform = std::abs(trajectory.belief(i, k, theta) - share) <= kVanishing;
  if (uniform) return {Kind::UniformSplit, 0};
  return {};
}

bool verdictAgrees(const RegimeReport& report, const ConvergenceVerdict& verdict,
                   const Trajectory& trajectory, std::size_t window) {
  using Kind = ConvergenceVerdict::Kind;
  switch (report.predicted) {
    case Regime::TruthLearning:
      return verdict == ConvergenceVerdict{Kind::ConvergedTo, report.trueIndex};
    case Regime::MislearnTx:
    case Regime::SufficientCondOne:
      return verdict == ConvergenceVerdict{Kind::ConvergedTo, report.txIndex};
    case Regime::UniformSplit:
      return verdict.kind == Kind::UniformSplit;
    case Regime::SufficientCondZero: {
      const std::size_t last = trajectory.iterations();
      if (last == 0) return false;
      const std::size_t first = last - std::min(window, last) + 1;
      return txVanishes(trajectory, report.txIndex, first);
    }
    case Regime::Inconclusive:
      return true;
  }
  return false;
}

double logRatioSpread(const Trajectory& trajectory, std::size_t agent, std::size_t a,
                      std::size_t b, std::size_t lastIterations) {
  const std::size_t last = trajectory.iterations();
  const std::size_t count = std::min(lastIterations, last);
  if (count < 2) throw Error(ErrorKind::Measurement, "need at least two iterations for a spread");
  double mean = 0.0;
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = last - count + 1; i <= last; ++i) {
    values.push_back(trajectory.logBelief(i, agent, a) - trajectory.logBelief(i, agent, b));
    mean += values.back();
  }
  mean /= static_cast<double>(count);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(count - 1));
}

nlohmann::json toJson(const RegimeReport& report) {
  nlohmann::json j;
  j["strategy"] = report.strategy;
  j["theta0"] = report.trueIndex + 1;
  j["thetaTX"] = report.txIndex + 1;
  j["dKLTrueVsTx"] = report.dKLTrueVsTx;
  j["dKLTrueVsMixture"] = report.dKLTrueVsMixture;
  j["rate"] = report.rate;
  j["predicted"] = toString(report.predicted);
  j["conditionValues"] = report.conditionValues;
  j["constants"] = report.constants;
  if (report.empirical) {
    const auto& e = *report.empirical;
    j["empirical"] = {{"finalBeliefs", e.finalBeliefs}, {"verdict", e.verdict}};
    j["empirical"]["measuredRate"] =
        e.measuredRate ? nlohmann::json(*e.measuredRate) : nlohmann::json(nullptr);
  } else {
    j["empirical"] = nullptr;
  }
  return j;
}

}  // namespace pbnet
