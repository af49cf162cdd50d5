#include "pbnet/fixtures.hpp"

namespace pbnet::fixtures {

LikelihoodModel gaussianFamily() { return LikelihoodModel::gaussian({0.0, 0.2, 1.0}); }

LikelihoodModel selfAwareDiscreteFamily() {
  return LikelihoodModel::discrete({
      {0.04, 0.30, 0.66},
      {0.045, 0.305, 0.65},
      {0.48, 0.50, 0.02},
  });
}

SimulationConfig paperConfig(const LikelihoodModel& family, SharingStrategy strategy,
                             std::size_t txIndex, double lambda) {
  SimulationConfig cfg;
  cfg.hypotheses = {family.hypothesisCount(), 0, txIndex};
  cfg.likelihood = family;
  cfg.network.source = NetworkSpec::Source::Preset;
  cfg.network.preset = "ring";
  cfg.network.agents = kDefaultAgents;
  cfg.network.adjacency = Adjacency::ring(kDefaultAgents);
  cfg.network.lambda = lambda;
  cfg.strategy = std::move(strategy);
  cfg.strategy = effectiveStrategy(cfg);
  return cfg;
}

}  // namespace pbnet::fixtures
