#include "efda/error.hpp"
#include "efda/expfam.hpp"
#include "efda/mathutil.hpp"
#include "efda/rng.hpp"

#include <cmath>
#include <numbers>

namespace efda {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) + index);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

namespace {

// Marsaglia-Tsang; shape < 1 is boosted through G(a + 1) * U^(1/a).
double gamma_variate(double shape, double scale, Rng& rng) {
  if (shape < 1.0) {
    const double g = gamma_variate(shape + 1.0, 1.0, rng);
    return scale * g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

// Sequential inversion; only used for small means.
double poisson_inversion(double lambda, Rng& rng) {
  const double u = rng.uniform();
  double k = 0.0;
  double p = std::exp(-lambda);
  double cdf = p;
  while (u > cdf) {
    k += 1.0;
    p *= lambda / k;
    const double next = cdf + p;
    if (next == cdf) break;  // tail exhausted in double precision
    cdf = next;
  }
  return k;
}

// Hormann's transformed rejection with squeeze (PTRS).
double poisson_ptrs(double lambda, Rng& rng) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0))
      return k;
  }
}

double poisson_variate(double lambda, Rng& rng) {
  if (lambda <= 0.0) return 0.0;
  return lambda < 30.0 ? poisson_inversion(lambda, rng) : poisson_ptrs(lambda, rng);
}

}  // namespace

double sample_one(const FamilySpec& spec, const NaturalParam& eta, Rng& rng) {
  if (!in_natural_space(spec, eta))
    fail(ErrorCode::Domain, spec.name() + ": cannot sample outside the natural parameter space");
  const double e = eta[0];
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar: {
      const double sigma = spec.aux();
      return sigma * e + sigma * rng.normal();
    }
    case FamilyKind::NormalFull: {
      const double var = -0.5 / eta[1];
      return eta[0] * var + std::sqrt(var) * rng.normal();
    }
    case FamilyKind::LaplaceKnownLoc: {
      const double b = -1.0 / e;
      const double u = rng.uniform();
      return u < 0.5 ? spec.aux() + b * std::log(2.0 * u)
                     : spec.aux() - b * std::log(2.0 * (1.0 - u));
    }
    case FamilyKind::Exponential: return (1.0 / e) * std::log(rng.uniform());
    case FamilyKind::GammaKnownShape: return gamma_variate(spec.aux(), -1.0 / e, rng);
    case FamilyKind::WeibullKnownShape: {
      // X^k is exponential with mean -1/eta.
      const double t = (1.0 / e) * std::log(rng.uniform());
      return std::pow(t, 1.0 / spec.aux());
    }
    case FamilyKind::Poisson: return poisson_variate(std::exp(e), rng);
    case FamilyKind::Bernoulli: {
      return rng.uniform() < logistic(e) ? 1.0 : 0.0;
    }
    case FamilyKind::NegBinomialKnownR: {
      // Gamma-Poisson mixture: rate ~ Gamma(r, p / (1 - p)), p = e^eta.
      const double odds = 1.0 / std::expm1(-e);
      return poisson_variate(gamma_variate(spec.aux(), odds, rng), rng);
    }
  }
  return 0.0;
}

std::vector<double> sample(const FamilySpec& spec, const NaturalParam& eta, Rng& rng,
                           std::size_t n) {
  if (!in_natural_space(spec, eta))
    fail(ErrorCode::Domain, spec.name() + ": cannot sample outside the natural parameter space");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(spec, eta, rng));
  return out;
}

}  // namespace efda
