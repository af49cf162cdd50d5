#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace pbnet {

// log(sum_i exp(x_i)), evaluated around the maximum so that very negative
// log-probabilities do not underflow. A single-element input is returned
// unchanged (bit-exact). Empty input yields -inf.
double logSumExp(std::span<const double> values) noexcept;

// Generator used for every random draw in the engine. Seeded explicitly and
// owned by the caller.
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t splitMix64(std::uint64_t x) noexcept;

// Seed of Monte Carlo run `runIndex` under `masterSeed`:
//   splitMix64(masterSeed + 0x9E3779B97F4A7C15 * (runIndex + 1))
std::uint64_t deriveRunSeed(std::uint64_t masterSeed, std::uint64_t runIndex) noexcept;

// Uniform on [0, 1) from the top 53 bits of one generator output.
double uniform01(Rng& rng) noexcept;

// Standard normal draw (Marsaglia polar method, second variate discarded).
// Implemented here rather than via std::normal_distribution so trajectories
// do not depend on the standard library vendor.
double standardNormal(Rng& rng) noexcept;

// Unit exponential draw, used for flat Dirichlet sampling.
double standardExponential(Rng& rng) noexcept;

}  // namespace pbnet
