#include "pbnet/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbnet/error.hpp"

namespace pbnet {

double logSumExp(std::span<const double> values) noexcept {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  if (values.size() == 1) return values.front();
  const double peak = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

std::uint64_t splitMix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t deriveRunSeed(std::uint64_t masterSeed, std::uint64_t runIndex) noexcept {
  return splitMix64(masterSeed + 0x9E3779B97F4A7C15ULL * (runIndex + 1));
}

double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standardNormal(Rng& rng) noexcept {
  double u, v, s;
  do {
    u = 2.0 * uniform01(rng) - 1.0;
    v = 2.0 * uniform01(rng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double standardExponential(Rng& rng) noexcept {
  // 1 - U lies in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform01(rng));
}

const char* toString(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InvalidObservation: return "invalid-observation";
    case ErrorKind::Connectivity: return "connectivity";
    case ErrorKind::DegenerateDegree: return "degenerate-degree";
    case ErrorKind::DivisionDegeneracy: return "division-degeneracy";
    case ErrorKind::GenerationFailure: return "generation-failure";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::UnboundedLikelihood: return "unbounded-likelihood";
    case ErrorKind::IndistinguishableHypotheses: return "indistinguishable-hypotheses";
    case ErrorKind::InternalInconsistency: return "internal-inconsistency";
    case ErrorKind::Measurement: return "measurement";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace pbnet
