#include "pbnet/dynamics.hpp"

#include <cmath>
#include <type_traits>

#include "pbnet/error.hpp"

namespace pbnet {
namespace {

void requireFinite(std::span<const double> logValues) {
  for (double v : logValues) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NumericalFailure, "belief vector has a non-finite log value");
    }
  }
}

const LikelihoodModel& modelFor(std::span<const LikelihoodModel> models, std::size_t agent) {
  return models.size() == 1 ? models.front() : models[agent];
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

BeliefVector BeliefVector::uniform(std::size_t hypotheses) {
  if (hypotheses == 0) throw Error(ErrorKind::Validation, "belief vector needs at least one hypothesis");
  BeliefVector b;
  b.log_.assign(hypotheses, -std::log(static_cast<double>(hypotheses)));
  return b;
}

BeliefVector BeliefVector::fromProbabilities(std::span<const double> probabilities) {
  std::vector<double> logs;
  logs.reserve(probabilities.size());
  for (double p : probabilities) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::Validation, "beliefs must be strictly positive and finite");
    }
    logs.push_back(std::log(p));
  }
  return fromLogWeights(std::move(logs));
}

BeliefVector BeliefVector::fromLogWeights(std::vector<double> logWeights) {
  if (logWeights.empty()) throw Error(ErrorKind::Validation, "belief vector needs at least one hypothesis");
  requireFinite(logWeights);
  const double norm = logSumExp(logWeights);
  for (double& v : logWeights) v -= norm;
  requireFinite(logWeights);
  BeliefVector b;
  b.log_ = std::move(logWeights);
  return b;
}

double BeliefVector::probability(std::size_t theta) const { return std::exp(log_.at(theta)); }

std::vector<double> BeliefVector::probabilities() const {
  std::vector<double> out(log_.size());
  for (std::size_t t = 0; t < log_.size(); ++t) out[t] = std::exp(log_[t]);
  return out;
}

std::string strategyName(const SharingStrategy& strategy) {
  return std::visit(Overloaded{
                        [](const FullSharing&) { return std::string("full"); },
                        [](const PartialSharing&) { return std::string("partial"); },
                        [](const SelfAwarePartialSharing&) { return std::string("self_aware"); },
                        [](const MaxBeliefSharing& m) {
                          return std::string(m.selfAware ? "max_belief_self_aware" : "max_belief");
                        },
                    },
                    strategy);
}

void validateStrategy(const SharingStrategy& strategy, std::size_t hypotheses) {
  std::visit(Overloaded{
                 [&](const PartialSharing& s) {
                   if (s.tx >= hypotheses) throw Error(ErrorKind::Validation, "strategy: txIndex out of range");
                 },
                 [&](const SelfAwarePartialSharing& s) {
                   if (s.tx >= hypotheses) throw Error(ErrorKind::Validation, "strategy: txIndex out of range");
                 },
                 [](const auto&) {},
             },
             strategy);
}

bool usesSelfAwareness(const SharingStrategy& strategy) noexcept {
  if (std::holds_alternative<SelfAwarePartialSharing>(strategy)) return true;
  if (const auto* m = std::get_if<MaxBeliefSharing>(&strategy)) return m->selfAware;
  return false;
}

BeliefVector bayesianUpdate(const BeliefVector& prior, const LikelihoodModel& model,
                            const Observation& xi) {
  if (prior.size() != model.hypothesisCount()) {
    throw Error(ErrorKind::Validation, "bayesianUpdate: belief size does not match model");
  }
  std::vector<double> logs(prior.size());
  for (std::size_t t = 0; t < prior.size(); ++t) {
    logs[t] = prior.logAt(t) + model.logLikelihood(t, xi);
  }
  return BeliefVector::fromLogWeights(std::move(logs));
}

std::size_t maxBeliefIndex(const BeliefVector& psi) noexcept {
  const auto values = psi.logValues();
  std::size_t best = 0;
  for (std::size_t t = 1; t < values.size(); ++t) {
    if (values[t] > values[best]) best = t;
  }
  return best;
}

BeliefVector keepComponent(const BeliefVector& psi, std::size_t shared) {
  const std::size_t h = psi.size();
  if (shared >= h) throw Error(ErrorKind::Validation, "keepComponent: hypothesis out of range");
  // With a single other hypothesis the split is the identity.
  if (h == 2) return psi;

  std::vector<double> rest;
  rest.reserve(h - 1);
  for (std::size_t t = 0; t < h; ++t) {
    if (t != shared) rest.push_back(psi.logAt(t));
  }
  // log((1 - psi(shared)) / (H - 1))
  const double spread = logSumExp(rest) - std::log(static_cast<double>(h - 1));

  std::vector<double> out(h, spread);
  out[shared] = psi.logAt(shared);
  return BeliefVector::fromLogWeights(std::move(out));
}

BeliefVector modifyForSharing(const BeliefVector& psi, const SharingStrategy& strategy) {
  return std::visit(Overloaded{
                        [&](const FullSharing&) { return psi; },
                        [&](const PartialSharing& s) { return keepComponent(psi, s.tx); },
                        [&](const SelfAwarePartialSharing& s) { return keepComponent(psi, s.tx); },
                        [&](const MaxBeliefSharing&) { return keepComponent(psi, maxBeliefIndex(psi)); },
                    },
                    strategy);
}

NetworkState combineStep(const NetworkState& state, const Network& net,
                         std::span<const BeliefVector> shared, std::span<const BeliefVector> own,
                         const SharingStrategy& strategy) {
  const std::size_t n = net.size();
  if (shared.size() != n || own.size() != n) {
    throw Error(ErrorKind::Validation, "combineStep: one belief vector per agent required");
  }
  const bool selfAware = usesSelfAwareness(strategy);
  const std::size_t h = shared.front().size();
  const Eigen::MatrixXd& a = net.matrix();

  NetworkState next;
  next.iteration = state.iteration + 1;
  next.beliefs.reserve(n);
  std::vector<double> acc(h);
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t l = 0; l < n; ++l) {
      const double w = a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
      if (w == 0.0) continue;
      const BeliefVector& src = (selfAware && l == k) ? own[k] : shared[l];
      if (src.size() != h) throw Error(ErrorKind::Validation, "combineStep: belief sizes differ");
      const auto logs = src.logValues();
      for (std::size_t t = 0; t < h; ++t) acc[t] += w * logs[t];
    }
    next.beliefs.push_back(BeliefVector::fromLogWeights(acc));
  }
  return next;
}

std::vector<Observation> drawObservations(std::span<const LikelihoodModel> models,
                                          std::size_t agents, std::size_t trueIndex, Rng& rng) {
  if (models.size() != 1 && models.size() != agents) {
    throw Error(ErrorKind::Validation, "need one likelihood model per agent or a single shared model");
  }
  std::vector<Observation> out;
  out.reserve(agents);
  for (std::size_t k = 0; k < agents; ++k) out.push_back(modelFor(models, k).sample(trueIndex, rng));
  return out;
}

NetworkState advance(const NetworkState& state, const Network& net,
                     std::span<const LikelihoodModel> models, const SharingStrategy& strategy,
                     std::span<const Observation> observations) {
  const std::size_t n = net.size();
  if (state.beliefs.size() != n || observations.size() != n) {
    throw Error(ErrorKind::Validation, "advance: state, observations and network sizes differ");
  }
  if (models.size() != 1 && models.size() != n) {
    throw Error(ErrorKind::Validation, "need one likelihood model per agent or a single shared model");
  }
  std::vector<BeliefVector> own;
  std::vector<BeliefVector> shared;
  own.reserve(n);
  shared.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    own.push_back(bayesianUpdate(state.beliefs[k], modelFor(models, k), observations[k]));
    shared.push_back(modifyForSharing(own.back(), strategy));
  }
  return combineStep(state, net, shared, own, strategy);
}

NetworkState runIteration(const NetworkState& state, const Network& net,
                          std::span<const LikelihoodModel> models, std::size_t trueIndex,
                          const SharingStrategy& strategy, Rng& rng) {
  const auto observations = drawObservations(models, net.size(), trueIndex, rng);
  return advance(state, net, models, strategy, observations);
}

}  // namespace pbnet
