#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pbnet/likelihoods.hpp"
#include "pbnet/network.hpp"
#include "pbnet/trajectory.hpp"

namespace pbnet {

enum class Regime {
  TruthLearning,
  MislearnTx,
  UniformSplit,
  SufficientCondZero,
  SufficientCondOne,
  Inconclusive,
};

const char* toString(Regime regime) noexcept;

// Condition margins closer than this to zero are treated as undecided.
inline constexpr double kConditionTolerance = 1e-3;
// Threshold for the truth-learning probes with self-awareness.
inline constexpr double kProbeTolerance = 1e-6;

struct EmpiricalSummary {
  std::vector<double> finalBeliefs;  // agent 1
  std::optional<double> measuredRate;
  std::string verdict;
};

struct RegimeReport {
  std::string strategy;
  std::size_t trueIndex = 0;
  std::size_t txIndex = 0;
  double dKLTrueVsTx = 0.0;
  double dKLTrueVsMixture = 0.0;
  double rate = 0.0;
  Regime predicted = Regime::Inconclusive;
  // Left-minus-right margin of every inequality evaluated, keyed by name.
  std::map<std::string, double> conditionValues;
  // Inputs to the margins that are not themselves inequalities (alpha, M,
  // lemma4WeightSum, H).
  std::map<std::string, double> constants;
  std::optional<EmpiricalSummary> empirical;
};

// D_KL[L(true) || L(tx)] - D_KL[L(true) || P(tx^c)]: asymptotic slope of
// log mu(theta) / mu(tx) for every theta != tx under partial sharing.
double theoreticalRate(const LikelihoodModel& model, std::size_t trueIndex, std::size_t txIndex);

// Belief-collapse regimes of the partial approach. Margins:
//   thm1_true  = D_KL[L(true) || P(true^c)]                    (tx == true)
//   thm1_ratio = D_KL[L(true) || P(tx^c)] - D_KL[L(true) || L(tx)]  (tx != true)
// thm1_ratio is the ratio-minus-one condition multiplied through by the
// (positive) denominator, so it shares units with the tolerance.
RegimeReport predictPartialRegime(const LikelihoodModel& model, std::size_t trueIndex,
                                  std::size_t txIndex);

// Sufficient conditions for the self-aware approach. Margins:
//   thm2_min_probe  smallest D_KL[L(true) || P_q(true^c)] over vertex and uniform q
//   lem3            D_KL[L(true)||L(tx)] - alpha/(H-1) sum_{tau != tx} D_KL[L(true)||L(tau)]
//   lem4            D_KL[L(true)||P(tx^c)] - D_KL[L(true)||L(tx)] - M * lemma4WeightSum
//   lem4_plus_sign  same with +M * lemma4WeightSum (the variant printed alongside
//                   the published example; reported, never used for prediction)
// Gaussian families have no finite M, so when Lemma 3 does not settle the
// case the call throws Error(UnboundedLikelihood).
RegimeReport predictSelfAwareRegime(const LikelihoodModel& model, const Network& net,
                                    std::size_t trueIndex, std::size_t txIndex);

// Classic full-belief sharing: truth learning when every false hypothesis is
// separated from the truth by more than the tolerance.
RegimeReport predictFullSharingRegime(const LikelihoodModel& model, std::size_t trueIndex,
                                      std::size_t txIndex);

// Least-squares slope of log mu_{agent,i}(theta) / mu_{agent,i}(tx) over the
// iterations after `burnIn`.
double measureEmpiricalRate(const Trajectory& trajectory, std::size_t theta, std::size_t txIndex,
                            std::size_t burnIn, std::size_t agent = 0);

struct ConvergenceVerdict {
  enum class Kind { ConvergedTo, UniformSplit, Oscillating, Undecided };
  Kind kind = Kind::Undecided;
  std::size_t hypothesis = 0;  // meaningful for ConvergedTo only

  bool operator==(const ConvergenceVerdict&) const = default;
  std::string describe() const;  // 1-based labels
};

// Looks at the last `window` iterations (Undecided when fewer were recorded), checking in this order:
//   ConvergedTo(theta)  every agent has mu(theta) > threshold throughout;
//   Oscillating         mu(tx) < 1e-3 and, at every agent, the log-ratio between the
//                       two lowest-indexed non-tx hypotheses changes sign at least 3 times
//                       (ratios within 1e-9 of zero are ties and do not count);
//   UniformSplit        mu(tx) < 1e-3 and every other component within 1e-3 of 1/(H-1).
// The last two need `txIndex`.
ConvergenceVerdict detectConvergence(const Trajectory& trajectory, double threshold,
                                     std::size_t window,
                                     std::optional<std::size_t> txIndex = std::nullopt);

// Whether an empirical verdict is what the predicted regime implies.
// Inconclusive predictions agree with anything.
bool verdictAgrees(const RegimeReport& report, const ConvergenceVerdict& verdict,
                   const Trajectory& trajectory, std::size_t window);

// Sample standard deviation of log mu(a) / mu(b) at `agent` over the last
// `lastIterations` iterations.
double logRatioSpread(const Trajectory& trajectory, std::size_t agent, std::size_t a,
                      std::size_t b, std::size_t lastIterations);

nlohmann::json toJson(const RegimeReport& report);

}  // namespace pbnet
