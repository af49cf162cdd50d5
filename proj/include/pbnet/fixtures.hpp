#pragma once

#include <cstddef>

#include "pbnet/harness.hpp"

// Bundled experiment settings.
namespace pbnet::fixtures {

// Unit-variance Gaussians with means 0, 0.2 and 1.
LikelihoodModel gaussianFamily();

// Discrete family over xi in {0, 1, 2} standing in for the self-aware
// experiment's pmfs, which are only available as a plot. Chosen so that
// with theta0 = 1:
//   * M for thetaTX = 2 is log(33) ~ 3.4965,
//   * the Lemma 3 margin for thetaTX = 3 is positive (~2.05),
//   * the Lemma 4 margin for thetaTX = 2 at lambda = 0.03 is positive (~0.171),
//   * hypotheses 1 and 2 are close (D_KL ~ 4e-4), so with thetaTX = 3 their
//     log-ratio keeps crossing zero even at lambda = 0.99.
// The published margins cannot be matched simultaneously (see README).
LikelihoodModel selfAwareDiscreteFamily();

// Ring of 10 agents; hypotheses {1,2,3}; theta0 = 1; 0-based indices below.
SimulationConfig paperConfig(const LikelihoodModel& family, SharingStrategy strategy,
                             std::size_t txIndex, double lambda);

}  // namespace pbnet::fixtures
