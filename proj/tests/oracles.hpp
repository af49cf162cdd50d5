#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// They read a recorded trajectory plus its retained observations and recompute
// the closed-form recursions directly from densities, without going through
// the engine's update code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>

#include "pbnet/harness.hpp"

namespace oracle {

inline double density(const pbnet::LikelihoodModel& m, std::size_t theta, const pbnet::Observation& xi) {
  if (m.family() == pbnet::Family::Gaussian) {
    const double d = std::get<double>(xi) - m.means()[theta];
    return std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi);
  }
  return m.pmf()[theta][std::get<std::size_t>(xi)];
}

inline double logRatio(const pbnet::Trajectory& t, std::size_t i, std::size_t k, std::size_t a, std::size_t b) {
  return t.logBelief(i, k, a) - t.logBelief(i, k, b);
}

// Largest |log mu(theta) - log mu(theta')| over non-tx pairs, iterations >= 1.
inline double equalSplitSpread(const pbnet::Trajectory& t, std::size_t tx) {
  double worst = 0.0;
  for (std::size_t i = 1; i <= t.iterations(); ++i)
    for (std::size_t k = 0; k < t.agents(); ++k)
      for (std::size_t a = 0; a < t.hypotheses(); ++a)
        for (std::size_t b = a + 1; b < t.hypotheses(); ++b)
          if (a != tx && b != tx) worst = std::max(worst, std::abs(logRatio(t, i, k, a, b)));
  return worst;
}

// Partial sharing:
//   log mu_k,i(theta)/mu_k,i(tx) = sum_l a_lk [log mu_l,i-1(theta)/mu_l,i-1(tx)
//                                           + log P(xi_l,i | tx^c) / L(xi_l,i | tx)]
// valid once the non-tx components are equal, i.e. from iteration `from`.
inline double partialRecursionResidual(const pbnet::Trajectory& t, const Eigen::MatrixXd& a,
                                       const pbnet::LikelihoodModel& m, std::size_t tx, std::size_t from) {
  const std::size_t h = t.hypotheses();
  double worst = 0.0;
  for (std::size_t i = std::max<std::size_t>(from, 1); i <= t.iterations(); ++i) {
    const auto& obs = t.observations.at(i - 1);
    for (std::size_t k = 0; k < t.agents(); ++k) {
      for (std::size_t theta = 0; theta < h; ++theta) {
        if (theta == tx) continue;
        double expected = 0.0;
        for (std::size_t l = 0; l < t.agents(); ++l) {
          const double w = a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
          if (w == 0.0) continue;
          double mix = 0.0;
          for (std::size_t tau = 0; tau < h; ++tau)
            if (tau != tx) mix += density(m, tau, obs[l]);
          mix /= static_cast<double>(h - 1);
          expected += w * (logRatio(t, i - 1, l, theta, tx) + std::log(mix / density(m, tx, obs[l])));
        }
        worst = std::max(worst, std::abs(logRatio(t, i, k, theta, tx) - expected));
      }
    }
  }
  return worst;
}

// Self-aware partial sharing, theta, theta' != tx:
//   log mu_k,i(theta)/mu_k,i(theta') = a_kk [previous log-ratio + log L(xi_k,i|theta)/L(xi_k,i|theta')]
inline double selfAwareRecursionResidual(const pbnet::Trajectory& t, const Eigen::MatrixXd& a,
                                         const pbnet::LikelihoodModel& m, std::size_t tx) {
  const std::size_t h = t.hypotheses();
  double worst = 0.0;
  for (std::size_t i = 1; i <= t.iterations(); ++i) {
    const auto& obs = t.observations.at(i - 1);
    for (std::size_t k = 0; k < t.agents(); ++k) {
      const double akk = a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
      for (std::size_t x = 0; x < h; ++x)
        for (std::size_t y = 0; y < h; ++y) {
          if (x == tx || y == tx || x == y) continue;
          const double expected =
              akk * (logRatio(t, i - 1, k, x, y) + std::log(density(m, x, obs[k]) / density(m, y, obs[k])));
          worst = std::max(worst, std::abs(logRatio(t, i, k, x, y) - expected));
        }
    }
  }
  return worst;
}

}  // namespace oracle
