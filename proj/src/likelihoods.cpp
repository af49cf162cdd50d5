#include "pbnet/likelihoods.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pbnet/error.hpp"

namespace pbnet {
namespace {

constexpr double kRowSumTolerance = 1e-12;
const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

void checkProbabilityRows(const std::vector<std::vector<double>>& pmf, bool requirePositive) {
  if (pmf.size() < 2) {
    throw Error(ErrorKind::Validation, "likelihood.pmf: need at least 2 hypotheses");
  }
  const std::size_t support = pmf.front().size();
  if (support == 0) throw Error(ErrorKind::Validation, "likelihood.pmf[0]: empty support");
  for (std::size_t r = 0; r < pmf.size(); ++r) {
    const std::string where = "likelihood.pmf[" + std::to_string(r) + "]";
    if (pmf[r].size() != support) {
      throw Error(ErrorKind::Validation, where + ": support size differs from row 0");
    }
    double sum = 0.0;
    for (double p : pmf[r]) {
      if (!std::isfinite(p) || p < 0.0) {
        throw Error(ErrorKind::Validation, where + ": entries must be finite and nonnegative");
      }
      if (requirePositive && p <= 0.0) {
        throw Error(ErrorKind::Validation, where + ": entries must be strictly positive");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw Error(ErrorKind::Validation,
                  where + ": row sums to " + std::to_string(sum) + ", expected 1");
    }
  }
}

double gaussianLogDensity(double mean, double x) noexcept {
  const double d = x - mean;
  return -0.5 * d * d - kLogSqrtTwoPi;
}

double discreteKl(const LikelihoodModel& model, const MixtureSpec& p, const MixtureSpec& q) {
  double total = 0.0;
  for (std::size_t xi = 0; xi < model.supportSize(); ++xi) {
    const Observation obs{xi};
    const double pv = p.density(model, obs);
    if (pv <= 0.0) continue;
    total += pv * (std::log(pv) - q.logDensity(model, obs));
  }
  return total;
}

double gaussianKl(const LikelihoodModel& model, const MixtureSpec& p, const MixtureSpec& q) {
  const auto pi = p.pointIndex();
  const auto qi = q.pointIndex();
  if (pi && qi) {
    const double d = model.means()[*pi] - model.means()[*qi];
    return 0.5 * d * d;
  }

  const auto means = model.means();
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double a = *lo - kQuadratureHalfWidth;
  const double b = *hi + kQuadratureHalfWidth;

  auto integrand = [&](double x) {
    const Observation obs{x};
    const double logP = p.logDensity(model, obs);
    return std::exp(logP) * (logP - q.logDensity(model, obs));
  };

  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, a, b, 15, 1e-10, &error);
  if (!std::isfinite(value) || !(error <= kQuadratureTolerance)) {
    throw Error(ErrorKind::NumericalFailure,
                "KL quadrature did not reach tolerance (error estimate " +
                    std::to_string(error) + ")");
  }
  if (value < -kQuadratureTolerance) {
    throw Error(ErrorKind::NumericalFailure,
                "KL quadrature returned negative divergence " + std::to_string(value));
  }
  return std::max(0.0, value);
}

}  // namespace

void HypothesisSet::validate() const {
  if (count < 2) throw Error(ErrorKind::Validation, "hypotheses.count: need at least 2");
  if (trueIndex >= count) throw Error(ErrorKind::Validation, "hypotheses.trueIndex: out of range");
  if (txIndex >= count) throw Error(ErrorKind::Validation, "hypotheses.txIndex: out of range");
}

LikelihoodModel LikelihoodModel::gaussian(std::vector<double> means) {
  if (means.size() < 2) {
    throw Error(ErrorKind::Validation, "likelihood.means: need at least 2 hypotheses");
  }
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (!std::isfinite(means[i])) {
      throw Error(ErrorKind::Validation,
                  "likelihood.means[" + std::to_string(i) + "]: must be finite");
    }
  }
  LikelihoodModel m;
  m.family_ = Family::Gaussian;
  m.means_ = std::move(means);
  return m;
}

LikelihoodModel LikelihoodModel::discrete(std::vector<std::vector<double>> pmf) {
  checkProbabilityRows(pmf, true);
  LikelihoodModel m;
  m.family_ = Family::Discrete;
  m.pmf_ = std::move(pmf);
  return m;
}

LikelihoodModel LikelihoodModel::discreteUnchecked(std::vector<std::vector<double>> pmf) {
  checkProbabilityRows(pmf, false);
  LikelihoodModel m;
  m.family_ = Family::Discrete;
  m.pmf_ = std::move(pmf);
  return m;
}

std::size_t LikelihoodModel::hypothesisCount() const noexcept {
  return family_ == Family::Gaussian ? means_.size() : pmf_.size();
}

void LikelihoodModel::checkHypothesis(std::size_t theta) const {
  if (theta >= hypothesisCount()) {
    throw Error(ErrorKind::Validation,
                "hypothesis index " + std::to_string(theta + 1) + " out of range");
  }
}

double LikelihoodModel::logLikelihood(std::size_t theta, const Observation& xi) const {
  checkHypothesis(theta);
  if (family_ == Family::Gaussian) {
    const double* x = std::get_if<double>(&xi);
    if (x == nullptr || !std::isfinite(*x)) {
      throw Error(ErrorKind::InvalidObservation, "Gaussian family expects a finite real observation");
    }
    return gaussianLogDensity(means_[theta], *x);
  }
  const std::size_t* s = std::get_if<std::size_t>(&xi);
  if (s == nullptr || *s >= supportSize()) {
    throw Error(ErrorKind::InvalidObservation, "observation outside the discrete support");
  }
  return std::log(pmf_[theta][*s]);
}

double LikelihoodModel::likelihood(std::size_t theta, const Observation& xi) const {
  if (family_ == Family::Discrete) {
    checkHypothesis(theta);
    const std::size_t* s = std::get_if<std::size_t>(&xi);
    if (s == nullptr || *s >= supportSize()) {
      throw Error(ErrorKind::InvalidObservation, "observation outside the discrete support");
    }
    return pmf_[theta][*s];
  }
  return std::exp(logLikelihood(theta, xi));
}

Observation LikelihoodModel::sample(std::size_t theta, Rng& rng) const {
  checkHypothesis(theta);
  if (family_ == Family::Gaussian) return means_[theta] + standardNormal(rng);

  const auto& row = pmf_[theta];
  const double u = uniform01(rng);
  double cumulative = 0.0;
  std::size_t last = 0;
  for (std::size_t s = 0; s < row.size(); ++s) {
    if (row[s] <= 0.0) continue;
    last = s;
    cumulative += row[s];
    if (u < cumulative) return s;
  }
  return last;
}

MixtureSpec MixtureSpec::point(std::size_t hypotheses, std::size_t theta) {
  if (theta >= hypotheses) throw Error(ErrorKind::Validation, "mixture: hypothesis out of range");
  MixtureSpec m;
  m.weights_.assign(hypotheses, 0.0);
  m.weights_[theta] = 1.0;
  return m;
}

MixtureSpec MixtureSpec::complement(std::size_t hypotheses, std::size_t excluded) {
  if (hypotheses < 2 || excluded >= hypotheses) {
    throw Error(ErrorKind::Validation, "mixture: invalid excluded hypothesis");
  }
  MixtureSpec m;
  m.weights_.assign(hypotheses, 1.0 / static_cast<double>(hypotheses - 1));
  m.weights_[excluded] = 0.0;
  m.excluded_ = excluded;
  return m;
}

MixtureSpec MixtureSpec::complement(std::size_t hypotheses, std::size_t excluded,
                                    std::span<const double> q) {
  if (hypotheses < 2 || excluded >= hypotheses) {
    throw Error(ErrorKind::Validation, "mixture: invalid excluded hypothesis");
  }
  if (q.size() != hypotheses - 1) {
    throw Error(ErrorKind::Validation, "mixture: expected H-1 weights");
  }
  double sum = 0.0;
  for (double w : q) {
    if (!(w >= 0.0)) throw Error(ErrorKind::Validation, "mixture: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    throw Error(ErrorKind::Validation, "mixture: weights must sum to 1");
  }
  MixtureSpec m;
  m.weights_.assign(hypotheses, 0.0);
  for (std::size_t t = 0, j = 0; t < hypotheses; ++t) {
    if (t != excluded) m.weights_[t] = q[j++];
  }
  m.excluded_ = excluded;
  return m;
}

std::optional<std::size_t> MixtureSpec::pointIndex() const noexcept {
  std::optional<std::size_t> found;
  for (std::size_t t = 0; t < weights_.size(); ++t) {
    if (weights_[t] == 0.0) continue;
    if (found || weights_[t] != 1.0) return std::nullopt;
    found = t;
  }
  return found;
}

double MixtureSpec::density(const LikelihoodModel& model, const Observation& xi) const {
  if (model.family() == Family::Discrete) {
    double total = 0.0;
    for (std::size_t t = 0; t < weights_.size(); ++t) {
      if (weights_[t] > 0.0) total += weights_[t] * model.likelihood(t, xi);
    }
    return total;
  }
  return std::exp(logDensity(model, xi));
}

double MixtureSpec::logDensity(const LikelihoodModel& model, const Observation& xi) const {
  if (weights_.size() != model.hypothesisCount()) {
    throw Error(ErrorKind::Validation, "mixture: hypothesis count does not match model");
  }
  if (auto t = pointIndex()) return model.logLikelihood(*t, xi);
  if (model.family() == Family::Discrete) return std::log(density(model, xi));

  std::vector<double> terms;
  terms.reserve(weights_.size());
  for (std::size_t t = 0; t < weights_.size(); ++t) {
    if (weights_[t] > 0.0) terms.push_back(std::log(weights_[t]) + model.logLikelihood(t, xi));
  }
  return logSumExp(terms);
}

double klDivergence(const LikelihoodModel& model, const MixtureSpec& p, const MixtureSpec& q) {
  if (p.hypothesisCount() != model.hypothesisCount() ||
      q.hypothesisCount() != model.hypothesisCount()) {
    throw Error(ErrorKind::Validation, "klDivergence: mixture does not match model");
  }
  return model.family() == Family::Discrete ? discreteKl(model, p, q) : gaussianKl(model, p, q);
}

double klDivergence(const LikelihoodModel& model, std::size_t p, std::size_t q) {
  const std::size_t h = model.hypothesisCount();
  return klDivergence(model, MixtureSpec::point(h, p), MixtureSpec::point(h, q));
}

double klDivergence(const LikelihoodModel& model, std::size_t p, const MixtureSpec& q) {
  return klDivergence(model, MixtureSpec::point(model.hypothesisCount(), p), q);
}

double likelihoodBoundM(const LikelihoodModel& model, std::size_t excluded) {
  if (model.family() == Family::Gaussian) {
    throw Error(ErrorKind::UnboundedLikelihood,
                "Gaussian log-likelihood ratios are unbounded; no finite M exists");
  }
  const std::size_t h = model.hypothesisCount();
  if (excluded >= h) throw Error(ErrorKind::Validation, "likelihoodBoundM: excluded out of range");
  double bound = 0.0;
  for (std::size_t xi = 0; xi < model.supportSize(); ++xi) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t t = 0; t < h; ++t) {
      if (t == excluded) continue;
      const double v = std::log(model.pmf()[t][xi]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi >= lo) bound = std::max(bound, hi - lo);
  }
  return bound;
}

}  // namespace pbnet
