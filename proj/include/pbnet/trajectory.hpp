#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbnet/dynamics.hpp"
#include "pbnet/likelihoods.hpp"

namespace pbnet {

// Recorded run: log-beliefs of every agent at iterations 0 (initial) through
// iterations(). Beliefs stay in log form in memory and are exponentiated only
// on export, since components decaying at a linear log rate underflow
// doubles long before the horizon.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t agents, std::size_t hypotheses)
      : agents_(agents), hypotheses_(hypotheses) {}

  std::string fingerprint;
  std::size_t runIndex = 0;
  std::uint64_t runSeed = 0;
  // observations[i - 1][k] was drawn by agent k at iteration i. Empty unless
  // retention was requested.
  std::vector<std::vector<Observation>> observations;

  std::size_t agents() const noexcept { return agents_; }
  std::size_t hypotheses() const noexcept { return hypotheses_; }
  // Number of recorded iterations after the initial state.
  std::size_t iterations() const noexcept {
    const std::size_t row = agents_ * hypotheses_;
    return row == 0 || logs_.empty() ? 0 : logs_.size() / row - 1;
  }

  // Appends one network-wide snapshot; the first call records iteration 0.
  void record(std::span<const BeliefVector> beliefs);
  void reserve(std::size_t iterations) {
    logs_.reserve((iterations + 1) * agents_ * hypotheses_);
  }

  std::span<const double> logRow(std::size_t iteration, std::size_t agent) const {
    return std::span<const double>(logs_).subspan(
        (iteration * agents_ + agent) * hypotheses_, hypotheses_);
  }
  double logBelief(std::size_t iteration, std::size_t agent, std::size_t theta) const {
    return logs_.at((iteration * agents_ + agent) * hypotheses_ + theta);
  }
  double belief(std::size_t iteration, std::size_t agent, std::size_t theta) const {
    return std::exp(logBelief(iteration, agent, theta));
  }

 private:
  std::size_t agents_ = 0;
  std::size_t hypotheses_ = 0;
  std::vector<double> logs_;
};

}  // namespace pbnet
