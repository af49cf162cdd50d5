#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pbnet/numeric.hpp"

namespace pbnet {

// Hypotheses are addressed by 0-based index internally. Config files, CLI
// output and CSV exports use 1-based labels.
struct HypothesisSet {
  std::size_t count = 0;
  std::size_t trueIndex = 0;
  std::size_t txIndex = 0;

  // Throws Error(Validation) unless count >= 2 and both indices are in range.
  void validate() const;
};

// A single draw: a real value for the Gaussian family, a support index for
// the discrete family.
using Observation = std::variant<double, std::size_t>;

enum class Family { Gaussian, Discrete };

// Per-hypothesis observation distributions. Either unit-variance Gaussians
// (one mean per hypothesis) or a finite-support pmf table (one row per
// hypothesis, one column per support point).
class LikelihoodModel {
 public:
  // Empty model with no hypotheses; assign from a factory before use.
  LikelihoodModel() = default;

  static LikelihoodModel gaussian(std::vector<double> means);

  // Rows must sum to 1 within 1e-12 and every entry must be strictly positive.
  static LikelihoodModel discrete(std::vector<std::vector<double>> pmf);

  // Skips the positivity check (rows must still be probability vectors).
  // Test-only: zero entries make log-likelihood ratios infinite.
  static LikelihoodModel discreteUnchecked(std::vector<std::vector<double>> pmf);

  Family family() const noexcept { return family_; }
  std::size_t hypothesisCount() const noexcept;
  std::size_t supportSize() const noexcept { return pmf_.empty() ? 0 : pmf_.front().size(); }

  std::span<const double> means() const noexcept { return means_; }
  const std::vector<std::vector<double>>& pmf() const noexcept { return pmf_; }

  double likelihood(std::size_t theta, const Observation& xi) const;
  double logLikelihood(std::size_t theta, const Observation& xi) const;

  Observation sample(std::size_t theta, Rng& rng) const;

  bool operator==(const LikelihoodModel&) const = default;

 private:
  void checkHypothesis(std::size_t theta) const;

  Family family_ = Family::Gaussian;
  std::vector<double> means_;
  std::vector<std::vector<double>> pmf_;
};

// Convex combination of per-hypothesis likelihoods, stored as a weight per
// hypothesis. Covers the complement average P(xi | theta^c), the weighted
// complement P_q(xi | theta^c) and single hypotheses (point weights).
class MixtureSpec {
 public:
  // Weight 1 on `theta`.
  static MixtureSpec point(std::size_t hypotheses, std::size_t theta);

  // Uniform weight 1/(H-1) on every hypothesis except `excluded`.
  static MixtureSpec complement(std::size_t hypotheses, std::size_t excluded);

  // Weights `q` over the H-1 hypotheses other than `excluded`, in increasing
  // index order. Must be nonnegative and sum to 1 within 1e-12.
  static MixtureSpec complement(std::size_t hypotheses, std::size_t excluded,
                                std::span<const double> q);

  std::span<const double> weights() const noexcept { return weights_; }
  std::optional<std::size_t> excluded() const noexcept { return excluded_; }
  std::size_t hypothesisCount() const noexcept { return weights_.size(); }

  // Index of the single hypothesis carrying all the weight, if any.
  std::optional<std::size_t> pointIndex() const noexcept;

  double density(const LikelihoodModel& model, const Observation& xi) const;
  double logDensity(const LikelihoodModel& model, const Observation& xi) const;

 private:
  std::vector<double> weights_;
  std::optional<std::size_t> excluded_;
};

// Absolute error target for Gaussian-vs-mixture divergences.
inline constexpr double kQuadratureTolerance = 1e-6;
// Integration range is [min mean - 10, max mean + 10].
inline constexpr double kQuadratureHalfWidth = 10.0;

// D_KL[p || q]. Discrete: exact finite sum. Gaussian point-vs-point: closed
// form (m_p - m_q)^2 / 2. Any other Gaussian pair: adaptive Gauss-Kronrod
// quadrature; throws Error(NumericalFailure) if the error estimate exceeds
// kQuadratureTolerance.
double klDivergence(const LikelihoodModel& model, const MixtureSpec& p, const MixtureSpec& q);
double klDivergence(const LikelihoodModel& model, std::size_t p, std::size_t q);
double klDivergence(const LikelihoodModel& model, std::size_t p, const MixtureSpec& q);

// Largest |log L(xi|a) / L(xi|b)| over the support and all pairs a, b that
// differ from `excluded`. Only finite for discrete families; Gaussian input
// throws Error(UnboundedLikelihood).
double likelihoodBoundM(const LikelihoodModel& model, std::size_t excluded);

inline Observation sampleObservation(const LikelihoodModel& model, std::size_t theta, Rng& rng) {
  return model.sample(theta, rng);
}

}  // namespace pbnet
