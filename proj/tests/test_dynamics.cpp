#include <cmath>
#include <numeric>

#include "doctest.h"

#include "oracles.hpp"
#include "pbnet/fixtures.hpp"

using namespace pbnet;

namespace {

void checkProbabilities(const BeliefVector& b, std::initializer_list<double> expected, double tol = 1e-12) {
  REQUIRE(b.size() == expected.size());
  std::size_t t = 0;
  for (double e : expected) CHECK(std::abs(b.probability(t++) - e) < tol);
}

double massError(const BeliefVector& b) {
  const auto p = b.probabilities();
  return std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0);
}

Network pairNetwork() {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.5, 0.5, 0.5;
  return Network::fromMatrix(a);
}

SimulationConfig recordedConfig(const LikelihoodModel& family, SharingStrategy s, std::size_t tx, double lambda,
                                std::size_t horizon, std::uint64_t seed) {
  auto cfg = fixtures::paperConfig(family, std::move(s), tx, lambda);
  cfg.horizon = horizon;
  cfg.masterSeed = seed;
  cfg.retainObservations = true;
  return cfg;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("bayesian update") {
  const auto flat = LikelihoodModel::discrete({{0.5, 0.5}, {0.5, 0.5}});
  checkProbabilities(bayesianUpdate(BeliefVector::uniform(2), flat, Observation{std::size_t{0}}), {0.5, 0.5});

  const auto m = LikelihoodModel::discrete({{0.8, 0.2}, {0.2, 0.8}});
  checkProbabilities(bayesianUpdate(BeliefVector::uniform(2), m, Observation{std::size_t{0}}), {0.8, 0.2});

  const std::vector<double> tiny{1.0 - 1e-12, 1e-12};
  const auto post = bayesianUpdate(BeliefVector::fromProbabilities(tiny), m, Observation{std::size_t{1}});
  CHECK(post.probability(1) > 0.0);
  CHECK(massError(post) < 1e-12);
}

TEST_CASE("log-domain normalization survives extreme weights") {
  const auto b = BeliefVector::fromLogWeights({-2000.0, -2001.0, -5000.0});
  CHECK(std::isfinite(b.logAt(2)));
  CHECK(b.probability(0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(massError(b) < 1e-12);
  CHECK_THROWS_AS(BeliefVector::fromLogWeights({0.0, -INFINITY}), Error);
  CHECK_THROWS_AS(BeliefVector::fromProbabilities(std::vector<double>{0.5, 0.0}), Error);
}

TEST_CASE("sharing modification") {
  const auto a = BeliefVector::fromProbabilities(std::vector<double>{0.6, 0.2, 0.2});
  checkProbabilities(modifyForSharing(a, PartialSharing{0}), {0.6, 0.2, 0.2});

  const auto b = BeliefVector::fromProbabilities(std::vector<double>{0.6, 0.3, 0.1});
  checkProbabilities(modifyForSharing(b, PartialSharing{0}), {0.6, 0.2, 0.2});
  checkProbabilities(modifyForSharing(b, SelfAwarePartialSharing{0}), {0.6, 0.2, 0.2});
  checkProbabilities(modifyForSharing(b, FullSharing{}), {0.6, 0.3, 0.1});

  const auto c = BeliefVector::fromProbabilities(std::vector<double>{0.7, 0.3});
  CHECK(modifyForSharing(c, PartialSharing{0}) == c);

  const auto tie = BeliefVector::fromProbabilities(std::vector<double>{0.4, 0.4, 0.2});
  CHECK(maxBeliefIndex(tie) == 0);
  checkProbabilities(modifyForSharing(tie, MaxBeliefSharing{}), {0.4, 0.3, 0.3});
}

TEST_CASE("kept component close to one leaves a positive remainder") {
  const auto b = BeliefVector::fromLogWeights({0.0, -60.0, -80.0});
  const auto s = keepComponent(b, 0);
  CHECK(std::isfinite(s.logAt(1)));
  CHECK(s.logAt(1) == doctest::Approx(s.logAt(2)));
  CHECK(s.logAt(1) == doctest::Approx(-60.0 - std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("combination") {
  Adjacency single(1);
  single.setEdge(0, 0);
  const auto solo = Network::averaging(single, 1.0);
  const auto psi = BeliefVector::fromProbabilities(std::vector<double>{0.6, 0.3, 0.1});
  for (const SharingStrategy& s :
       {SharingStrategy{FullSharing{}}, SharingStrategy{PartialSharing{0}}, SharingStrategy{SelfAwarePartialSharing{0}}}) {
    const std::vector<BeliefVector> own{psi};
    const std::vector<BeliefVector> shared{usesSelfAwareness(s) ? psi : modifyForSharing(psi, s)};
    const auto next = combineStep({{BeliefVector::uniform(3)}, 0}, solo, shared, own, s);
    CHECK(next.iteration == 1);
    for (std::size_t t = 0; t < 3; ++t) CHECK(next.beliefs[0].probability(t) == doctest::Approx(shared[0].probability(t)));
  }
  const std::vector<BeliefVector> aware{psi};
  const std::vector<BeliefVector> split{modifyForSharing(psi, PartialSharing{0})};
  const auto next = combineStep({{BeliefVector::uniform(3)}, 0}, solo, split, aware, SelfAwarePartialSharing{0});
  checkProbabilities(next.beliefs[0], {0.6, 0.3, 0.1});

  const auto ring = Network::averaging(Adjacency::ring(5), 0.3);
  const std::vector<BeliefVector> same(5, psi);
  const auto eq = combineStep({same, 0}, ring, same, same, FullSharing{});
  for (const auto& b : eq.beliefs) checkProbabilities(b, {0.6, 0.3, 0.1}, 1e-12);

  const std::vector<BeliefVector> opposite{BeliefVector::fromProbabilities(std::vector<double>{0.8, 0.2}),
                                           BeliefVector::fromProbabilities(std::vector<double>{0.2, 0.8})};
  const auto mid = combineStep({opposite, 0}, pairNetwork(), opposite, opposite, PartialSharing{0});
  for (const auto& b : mid.beliefs) checkProbabilities(b, {0.5, 0.5});
}

TEST_CASE("full sharing is plain log-linear pooling") {
  const auto model = fixtures::gaussianFamily();
  const auto net = Network::averaging(Adjacency::ring(4), 0.4);
  const std::vector<LikelihoodModel> models{model};
  Rng rng(8);
  NetworkState state{std::vector<BeliefVector>(4, BeliefVector::uniform(3)), 0};
  for (int i = 0; i < 50; ++i) {
    const auto obs = drawObservations(models, 4, 0, rng);
    const auto next = advance(state, net, models, FullSharing{}, obs);
    for (std::size_t k = 0; k < 4; ++k) {
      std::vector<double> logs(3, 0.0);
      for (std::size_t l = 0; l < 4; ++l) {
        const double w = net.weight(l, k);
        if (w == 0.0) continue;
        for (std::size_t t = 0; t < 3; ++t)
          logs[t] += w * (state.beliefs[l].logAt(t) + std::log(oracle::density(model, t, obs[l])));
      }
      const double norm = std::log(std::exp(logs[0]) + std::exp(logs[1]) + std::exp(logs[2]));
      for (std::size_t t = 0; t < 3; ++t) CHECK(next.beliefs[k].logAt(t) == doctest::Approx(logs[t] - norm).epsilon(1e-10));
    }
    state = next;
  }
}

TEST_CASE("fixed seed gives identical runs") {
  auto cfg = fixtures::paperConfig(fixtures::gaussianFamily(), PartialSharing{1}, 1, 0.5);
  cfg.horizon = 200;
  cfg.masterSeed = 42;
  cfg.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
  const auto net = buildNetwork(cfg);
  const auto a = simulateRun(cfg, net, 3);
  const auto b = simulateRun(cfg, net, 3);
  for (std::size_t i = 0; i <= a.iterations(); ++i)
    for (std::size_t k = 0; k < a.agents(); ++k)
      for (std::size_t t = 0; t < 3; ++t) REQUIRE(a.logBelief(i, k, t) == b.logBelief(i, k, t));
}

TEST_CASE("first partial step equalizes the other components") {
  const auto model = fixtures::gaussianFamily();
  const auto net = Network::averaging(Adjacency::ring(10), 0.5);
  const std::vector<LikelihoodModel> models{model};
  Rng rng(1);
  const NetworkState start{std::vector<BeliefVector>(10, BeliefVector::uniform(3)), 0};
  const auto next = runIteration(start, net, models, 0, PartialSharing{2}, rng);
  for (const auto& b : next.beliefs) CHECK(std::abs(b.logAt(0) - b.logAt(1)) < 1e-9);
}

TEST_CASE("equal split holds from any positive start") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (std::size_t tx : {0u, 1u, 2u}) {
      auto cfg = recordedConfig(fixtures::gaussianFamily(), PartialSharing{tx}, tx, 0.5, 500, seed);
      cfg.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
      const auto t = simulateRun(cfg, buildNetwork(cfg), 0);
      CHECK(oracle::equalSplitSpread(t, tx) < 1e-9);
    }
  }
  auto four = recordedConfig(LikelihoodModel::gaussian({0.0, 0.3, 0.6, 1.0}), PartialSharing{1}, 1, 0.5, 300, 9);
  four.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
  CHECK(oracle::equalSplitSpread(simulateRun(four, buildNetwork(four), 0), 1) < 1e-9);
}

TEST_CASE("partial recursion oracle") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    for (std::size_t tx : {1u, 2u}) {
      auto cfg = recordedConfig(fixtures::gaussianFamily(), PartialSharing{tx}, tx, 0.5, 1000, seed);
      const auto net = buildNetwork(cfg);
      CHECK(oracle::partialRecursionResidual(simulateRun(cfg, net, 0), net.matrix(), cfg.likelihood, tx, 1) < 1e-8);
      cfg.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
      CHECK(oracle::partialRecursionResidual(simulateRun(cfg, net, 0), net.matrix(), cfg.likelihood, tx, 2) < 1e-8);
    }
  }
}

TEST_CASE("self-aware recursion oracle") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    for (double lambda : {0.03, 0.5, 0.9}) {
      auto cfg = recordedConfig(fixtures::selfAwareDiscreteFamily(), SelfAwarePartialSharing{2}, 2, lambda, 1000, seed);
      cfg.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
      const auto net = buildNetwork(cfg);
      CHECK(oracle::selfAwareRecursionResidual(simulateRun(cfg, net, 0), net.matrix(), cfg.likelihood, 2) < 1e-8);
    }
    auto g = recordedConfig(fixtures::gaussianFamily(), SelfAwarePartialSharing{1}, 1, 0.7, 1000, seed);
    const auto net = buildNetwork(g);
    CHECK(oracle::selfAwareRecursionResidual(simulateRun(g, net, 0), net.matrix(), g.likelihood, 1) < 1e-8);
  }
}

TEST_CASE("two hypotheses: partial equals full") {
  const auto model = LikelihoodModel::gaussian({0.0, 0.5});
  for (std::uint64_t seed : {1u, 2u}) {
    auto partial = fixtures::paperConfig(model, PartialSharing{1}, 1, 0.5);
    partial.horizon = 500;
    partial.masterSeed = seed;
    partial.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
    auto full = partial;
    full.strategy = FullSharing{};
    const auto net = buildNetwork(partial);
    const auto a = simulateRun(partial, net, 0);
    const auto b = simulateRun(full, net, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i <= a.iterations(); ++i)
      for (std::size_t k = 0; k < a.agents(); ++k)
        for (std::size_t t = 0; t < 2; ++t) worst = std::max(worst, std::abs(a.belief(i, k, t) - b.belief(i, k, t)));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("beliefs stay normalized") {
  for (const SharingStrategy& s : {SharingStrategy{FullSharing{}}, SharingStrategy{PartialSharing{1}},
                                   SharingStrategy{SelfAwarePartialSharing{2}}, SharingStrategy{MaxBeliefSharing{}},
                                   SharingStrategy{MaxBeliefSharing{true}}}) {
    auto cfg = fixtures::paperConfig(fixtures::selfAwareDiscreteFamily(), s, 2, 0.4);
    cfg.horizon = 300;
    cfg.initialBeliefs.kind = InitialBeliefs::Kind::RandomDirichlet;
    const auto t = simulateRun(cfg, buildNetwork(cfg), 0);
    double worst = 0.0;
    for (std::size_t i = 0; i <= t.iterations(); ++i)
      for (std::size_t k = 0; k < t.agents(); ++k) {
        double sum = 0.0;
        for (std::size_t th = 0; th < 3; ++th) {
          REQUIRE(std::isfinite(t.logBelief(i, k, th)));
          sum += t.belief(i, k, th);
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("full sharing learns the truth") {
  auto cfg = fixtures::paperConfig(fixtures::gaussianFamily(), FullSharing{}, 0, 0.5);
  cfg.horizon = 2000;
  const auto t = simulateRun(cfg, buildNetwork(cfg), 0);
  for (std::size_t k = 0; k < t.agents(); ++k) CHECK(t.belief(t.iterations(), k, 0) > 0.999);
}

TEST_CASE("heterogeneous models") {
  const std::vector<LikelihoodModel> models{LikelihoodModel::gaussian({0.0, 1.0}), LikelihoodModel::gaussian({0.0, 2.0})};
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.5, 0.5, 0.5;
  const auto net = Network::fromMatrix(a);
  const NetworkState s{std::vector<BeliefVector>(2, BeliefVector::uniform(2)), 0};
  const std::vector<Observation> obs{Observation{0.0}, Observation{0.0}};
  const auto next = advance(s, net, models, FullSharing{}, obs);
  const double expected = 0.5 * (0.5 + 2.0);  // log-likelihood ratios 1/2 and 2
  CHECK(next.beliefs[0].logAt(0) - next.beliefs[0].logAt(1) == doctest::Approx(expected));
  CHECK_THROWS_AS(advance(s, net, std::vector<LikelihoodModel>(3, models[0]), FullSharing{}, obs), Error);
}

TEST_CASE("strategy validation") {
  CHECK_THROWS_AS(validateStrategy(PartialSharing{3}, 3), Error);
  CHECK_NOTHROW(validateStrategy(SelfAwarePartialSharing{2}, 3));
  CHECK(strategyName(MaxBeliefSharing{true}) == "max_belief_self_aware");
  CHECK(usesSelfAwareness(SelfAwarePartialSharing{0}));
  CHECK_FALSE(usesSelfAwareness(PartialSharing{0}));
}

}
