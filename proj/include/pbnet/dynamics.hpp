#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pbnet/likelihoods.hpp"
#include "pbnet/network.hpp"
#include "pbnet/numeric.hpp"

namespace pbnet {

// Probability distribution over hypotheses, held as natural-log values.
// Every factory normalizes; entries must stay finite.
class BeliefVector {
 public:
  BeliefVector() = default;

  static BeliefVector uniform(std::size_t hypotheses);
  // Probabilities must be strictly positive; they are renormalized.
  static BeliefVector fromProbabilities(std::span<const double> probabilities);
  // Unnormalized log weights; normalized with logSumExp.
  static BeliefVector fromLogWeights(std::vector<double> logWeights);

  std::size_t size() const noexcept { return log_.size(); }
  double logAt(std::size_t theta) const { return log_.at(theta); }
  double probability(std::size_t theta) const;
  std::vector<double> probabilities() const;
  std::span<const double> logValues() const noexcept { return log_; }

  bool operator==(const BeliefVector&) const = default;

 private:
  std::vector<double> log_;
};

struct FullSharing {};
struct PartialSharing {
  std::size_t tx = 0;
};
struct SelfAwarePartialSharing {
  std::size_t tx = 0;
};
// Each agent shares its own most probable hypothesis (lowest index on ties).
// `selfAware` combines the agent's own unmodified belief; the published
// experiment only uses the plain variant.
struct MaxBeliefSharing {
  bool selfAware = false;
};

using SharingStrategy =
    std::variant<FullSharing, PartialSharing, SelfAwarePartialSharing, MaxBeliefSharing>;

std::string strategyName(const SharingStrategy& strategy);
// Throws Error(Validation) if the transmitted index is out of range.
void validateStrategy(const SharingStrategy& strategy, std::size_t hypotheses);
bool usesSelfAwareness(const SharingStrategy& strategy) noexcept;

struct NetworkState {
  std::vector<BeliefVector> beliefs;
  std::size_t iteration = 0;
};

// psi(theta) proportional to mu(theta) L(xi | theta).
BeliefVector bayesianUpdate(const BeliefVector& prior, const LikelihoodModel& model,
                            const Observation& xi);

// Hypothesis kept intact under max-belief sharing.
std::size_t maxBeliefIndex(const BeliefVector& psi) noexcept;

// Keeps the shared component and spreads the remaining mass evenly over the
// other H-1 hypotheses. The remaining mass is accumulated in log space so a
// shared component close to 1 does not cancel to zero.
BeliefVector keepComponent(const BeliefVector& psi, std::size_t shared);

BeliefVector modifyForSharing(const BeliefVector& psi, const SharingStrategy& strategy);

// Log-linear pooling: log mu_k = sum_l a_lk log shared_l (normalized). With
// self-awareness agent k uses own[k] in place of shared[k].
NetworkState combineStep(const NetworkState& state, const Network& net,
                         std::span<const BeliefVector> shared, std::span<const BeliefVector> own,
                         const SharingStrategy& strategy);

// One fresh draw from L(. | trueIndex) per agent, in agent order.
std::vector<Observation> drawObservations(std::span<const LikelihoodModel> models,
                                          std::size_t agents, std::size_t trueIndex, Rng& rng);

// Bayesian update, sharing modification and combination for the given
// observations. `models` holds one model per agent, or a single shared model.
NetworkState advance(const NetworkState& state, const Network& net,
                     std::span<const LikelihoodModel> models, const SharingStrategy& strategy,
                     std::span<const Observation> observations);

NetworkState runIteration(const NetworkState& state, const Network& net,
                          std::span<const LikelihoodModel> models, std::size_t trueIndex,
                          const SharingStrategy& strategy, Rng& rng);

}  // namespace pbnet
