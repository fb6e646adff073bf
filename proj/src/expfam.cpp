#include "efda/expfam.hpp"
#include "efda/error.hpp"
#include "efda/mathutil.hpp"
#include "efda/numfmt.hpp"

#include <cmath>
#include <numbers>

namespace efda {

namespace {

void require_aux(double value, bool strictly_positive, const char* what) {
  if (!std::isfinite(value) || (strictly_positive && !(value > 0.0)))
    fail(ErrorCode::InvalidArgument,
         std::string(what) + " must be finite" + (strictly_positive ? " and positive" : ""));
}

void require_dim(const FamilySpec& spec, int dim) {
  if (dim != spec.dim())
    fail(ErrorCode::InvalidArgument, spec.name() + ": expected parameter of length " +
                                         std::to_string(spec.dim()) + ", got " +
                                         std::to_string(dim));
}

void require_eta(const FamilySpec& spec, const NaturalParam& eta) {
  require_dim(spec, eta.dim());
  if (!in_natural_space(spec, eta)) {
    std::string s = spec.name() + ": natural parameter (";
    for (int i = 0; i < eta.dim(); ++i) s += (i ? ", " : "") + format_double(eta[i]);
    fail(ErrorCode::Domain, s + ") outside the natural parameter space");
  }
}

void require_support(const FamilySpec& spec, double x) {
  if (!in_support(spec, x))
    fail(ErrorCode::Support, spec.name() + ": observation " + format_double(x) +
                                 " outside the support");
}

bool is_count(double x) { return std::isfinite(x) && x >= 0.0 && x == std::floor(x); }

}  // namespace

FamilySpec::FamilySpec(FamilyKind kind, double aux) : kind_(kind), aux_(aux) {}

FamilySpec FamilySpec::normal_known_var(double sigma) {
  require_aux(sigma, true, "normal sigma");
  return {FamilyKind::NormalKnownVar, sigma};
}
FamilySpec FamilySpec::normal_full() { return {FamilyKind::NormalFull, 0.0}; }
FamilySpec FamilySpec::laplace(double location) {
  require_aux(location, false, "laplace location");
  return {FamilyKind::LaplaceKnownLoc, location};
}
FamilySpec FamilySpec::exponential() { return {FamilyKind::Exponential, 0.0}; }
FamilySpec FamilySpec::gamma(double shape) {
  require_aux(shape, true, "gamma shape");
  return {FamilyKind::GammaKnownShape, shape};
}
FamilySpec FamilySpec::weibull(double shape) {
  require_aux(shape, true, "weibull shape");
  return {FamilyKind::WeibullKnownShape, shape};
}
FamilySpec FamilySpec::poisson() { return {FamilyKind::Poisson, 0.0}; }
FamilySpec FamilySpec::bernoulli() { return {FamilyKind::Bernoulli, 0.0}; }
FamilySpec FamilySpec::negative_binomial(double r) {
  require_aux(r, true, "negative binomial r");
  return {FamilyKind::NegBinomialKnownR, r};
}

bool FamilySpec::discrete() const noexcept {
  return kind_ == FamilyKind::Poisson || kind_ == FamilyKind::Bernoulli ||
         kind_ == FamilyKind::NegBinomialKnownR;
}

bool FamilySpec::has_aux() const noexcept {
  switch (kind_) {
    case FamilyKind::NormalKnownVar:
    case FamilyKind::LaplaceKnownLoc:
    case FamilyKind::GammaKnownShape:
    case FamilyKind::WeibullKnownShape:
    case FamilyKind::NegBinomialKnownR: return true;
    default: return false;
  }
}

std::string FamilySpec::name() const {
  const char* base = "";
  switch (kind_) {
    case FamilyKind::NormalKnownVar: base = "normal"; break;
    case FamilyKind::NormalFull: base = "normal_full"; break;
    case FamilyKind::LaplaceKnownLoc: base = "laplace"; break;
    case FamilyKind::Exponential: base = "exponential"; break;
    case FamilyKind::GammaKnownShape: base = "gamma"; break;
    case FamilyKind::WeibullKnownShape: base = "weibull"; break;
    case FamilyKind::Poisson: base = "poisson"; break;
    case FamilyKind::Bernoulli: base = "bernoulli"; break;
    case FamilyKind::NegBinomialKnownR: base = "negbin"; break;
  }
  std::string s = base;
  if (has_aux()) s += ":" + format_double(aux_);
  return s;
}

FamilySpec FamilySpec::parse(std::string_view text) {
  text = trim(text);
  std::string_view head = text;
  std::optional<double> aux;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    head = trim(text.substr(0, colon));
    aux = parse_double(text.substr(colon + 1));
    if (!aux) fail(ErrorCode::Parse, "bad family parameter in '" + std::string(text) + "'");
  }
  auto need = [&](const char* what) {
    if (!aux) fail(ErrorCode::Parse, "family '" + std::string(head) + "' needs :" + what);
    return *aux;
  };
  auto none = [&]() {
    if (aux) fail(ErrorCode::Parse, "family '" + std::string(head) + "' takes no parameter");
  };
  if (head == "normal") return normal_known_var(need("sigma"));
  if (head == "normal_full") return none(), normal_full();
  if (head == "laplace") return laplace(need("location"));
  if (head == "exponential") return none(), exponential();
  if (head == "gamma") return gamma(need("shape"));
  if (head == "weibull") return weibull(need("shape"));
  if (head == "poisson") return none(), poisson();
  if (head == "bernoulli") return none(), bernoulli();
  if (head == "negbin") return negative_binomial(need("r"));
  fail(ErrorCode::Parse, "unknown family '" + std::string(head) + "'");
}

double dot(const NaturalParam& eta, const SuffStat& t) {
  if (eta.dim() != t.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch in eta . T");
  double s = eta[0] * t[0];
  if (eta.dim() == 2) s += eta[1] * t[1];
  return s;
}

SuffStatMean SuffStatMean::from_data(const FamilySpec& spec, std::span<const double> xs) {
  if (xs.empty()) fail(ErrorCode::EmptyClass, "sufficient statistic of an empty sample");
  double s0 = 0.0, s1 = 0.0;
  for (double x : xs) {
    const SuffStat t = suff_stat(spec, x);
    s0 += t[0];
    if (t.dim() == 2) s1 += t[1];
  }
  const double n = static_cast<double>(xs.size());
  SuffStatMean m;
  m.count = xs.size();
  m.value = spec.dim() == 2 ? SuffStat(s0 / n, s1 / n) : SuffStat(s0 / n);
  return m;
}

bool in_natural_space(const FamilySpec& spec, const NaturalParam& eta) noexcept {
  if (eta.dim() != spec.dim()) return false;
  for (double v : eta)
    if (!std::isfinite(v)) return false;
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar:
    case FamilyKind::Poisson:
    case FamilyKind::Bernoulli: return true;
    case FamilyKind::NormalFull: return eta[1] < 0.0;
    default: return eta[0] < 0.0;
  }
}

bool in_support(const FamilySpec& spec, double x) noexcept {
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar:
    case FamilyKind::NormalFull:
    case FamilyKind::LaplaceKnownLoc: return std::isfinite(x);
    case FamilyKind::Exponential:
    case FamilyKind::GammaKnownShape:
    case FamilyKind::WeibullKnownShape: return std::isfinite(x) && x > 0.0;
    case FamilyKind::Poisson:
    case FamilyKind::NegBinomialKnownR: return is_count(x);
    case FamilyKind::Bernoulli: return x == 0.0 || x == 1.0;
  }
  return false;
}

double log_partition(const FamilySpec& spec, const NaturalParam& eta) {
  require_eta(spec, eta);
  const double e = eta[0];
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar: return 0.5 * e * e;
    case FamilyKind::NormalFull:
      return -eta[0] * eta[0] / (4.0 * eta[1]) - 0.5 * std::log(-2.0 * eta[1]);
    case FamilyKind::LaplaceKnownLoc: return std::log(-2.0 / e);
    case FamilyKind::Exponential: return -std::log(-e);
    case FamilyKind::GammaKnownShape: return -spec.aux() * std::log(-e);
    case FamilyKind::WeibullKnownShape: return -std::log(-e) - std::log(spec.aux());
    case FamilyKind::Poisson: return std::exp(e);
    case FamilyKind::Bernoulli: return softplus(e);
    case FamilyKind::NegBinomialKnownR: return -spec.aux() * std::log(-std::expm1(e));
  }
  return 0.0;
}

SuffStat mean_suffstat(const FamilySpec& spec, const NaturalParam& eta) {
  require_eta(spec, eta);
  const double e = eta[0];
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar: return SuffStat(e);
    case FamilyKind::NormalFull: {
      const double mu = -eta[0] / (2.0 * eta[1]);
      const double var = -1.0 / (2.0 * eta[1]);
      return SuffStat(mu, mu * mu + var);
    }
    case FamilyKind::LaplaceKnownLoc:
    case FamilyKind::Exponential:
    case FamilyKind::WeibullKnownShape: return SuffStat(-1.0 / e);
    case FamilyKind::GammaKnownShape: return SuffStat(-spec.aux() / e);
    case FamilyKind::Poisson: return SuffStat(std::exp(e));
    case FamilyKind::Bernoulli: return SuffStat(logistic(e));
    case FamilyKind::NegBinomialKnownR: return SuffStat(spec.aux() / std::expm1(-e));
  }
  return SuffStat(0.0);
}

double var_suffstat(const FamilySpec& spec, const NaturalParam& eta) {
  if (spec.kind() == FamilyKind::NormalFull)
    fail(ErrorCode::UnsupportedFamily, "var_suffstat is defined for scalar families only");
  require_eta(spec, eta);
  const double e = eta[0];
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar: return 1.0;
    case FamilyKind::LaplaceKnownLoc:
    case FamilyKind::Exponential:
    case FamilyKind::WeibullKnownShape: return 1.0 / (e * e);
    case FamilyKind::GammaKnownShape: return spec.aux() / (e * e);
    case FamilyKind::Poisson: return std::exp(e);
    case FamilyKind::Bernoulli: return logistic(e) * logistic(-e);
    case FamilyKind::NegBinomialKnownR: {
      const double d = std::expm1(-e);
      return spec.aux() * std::exp(-e) / (d * d);
    }
    default: break;
  }
  return 0.0;
}

SuffStat suff_stat(const FamilySpec& spec, double x) {
  require_support(spec, x);
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar: return SuffStat(x / spec.aux());
    case FamilyKind::NormalFull: return SuffStat(x, x * x);
    case FamilyKind::LaplaceKnownLoc: return SuffStat(std::abs(x - spec.aux()));
    case FamilyKind::WeibullKnownShape: return SuffStat(std::pow(x, spec.aux()));
    default: return SuffStat(x);
  }
}

double log_base_measure(const FamilySpec& spec, double x) {
  require_support(spec, x);
  const double c = spec.aux();
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar:
      return -0.5 * std::log(2.0 * std::numbers::pi * c * c) - x * x / (2.0 * c * c);
    case FamilyKind::NormalFull: return -0.5 * std::log(2.0 * std::numbers::pi);
    case FamilyKind::LaplaceKnownLoc:
    case FamilyKind::Exponential:
    case FamilyKind::Bernoulli: return 0.0;
    case FamilyKind::GammaKnownShape: return (c - 1.0) * std::log(x) - std::lgamma(c);
    case FamilyKind::WeibullKnownShape: return (c - 1.0) * std::log(x);  // k is carried by A
    case FamilyKind::Poisson: return -std::lgamma(x + 1.0);
    case FamilyKind::NegBinomialKnownR:
      return std::lgamma(x + c) - std::lgamma(c) - std::lgamma(x + 1.0);
  }
  return 0.0;
}

double log_density(const FamilySpec& spec, const NaturalParam& eta, double x) {
  return log_base_measure(spec, x) + dot(eta, suff_stat(spec, x)) - log_partition(spec, eta);
}

NaturalParam mle_from_mean(const FamilySpec& spec, const SuffStatMean& mean) {
  require_dim(spec, mean.value.dim());
  if (mean.count == 0) fail(ErrorCode::EmptyClass, "mle from zero observations");
  for (double v : mean.value)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite sufficient statistic");

  const double m = mean.value[0];
  auto degenerate = [&](const char* why) {
    fail(ErrorCode::DegenerateData, spec.name() + ": " + why);
  };
  auto positive = [&]() {
    if (m < 0.0) fail(ErrorCode::InvalidArgument, spec.name() + ": negative mean statistic");
    if (m == 0.0) degenerate("mean sufficient statistic is zero");
  };
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar: return NaturalParam(m);
    case FamilyKind::NormalFull: {
      const double var = mean.value[1] - m * m;
      if (!(var > 0.0)) degenerate("zero sample variance");
      return NaturalParam(m / var, -0.5 / var);
    }
    case FamilyKind::LaplaceKnownLoc:
    case FamilyKind::Exponential:
    case FamilyKind::WeibullKnownShape: positive(); return NaturalParam(-1.0 / m);
    case FamilyKind::GammaKnownShape: positive(); return NaturalParam(-spec.aux() / m);
    case FamilyKind::Poisson: positive(); return NaturalParam(std::log(m));
    case FamilyKind::Bernoulli:
      if (m < 0.0 || m > 1.0) fail(ErrorCode::InvalidArgument, "bernoulli mean outside [0, 1]");
      if (m == 0.0 || m == 1.0) degenerate("bernoulli mean on the boundary");
      return NaturalParam(std::log(m) - std::log1p(-m));
    case FamilyKind::NegBinomialKnownR:
      positive();
      return NaturalParam(std::log(m) - std::log(spec.aux() + m));
  }
  return NaturalParam(0.0);
}

NaturalParam natural_from_conventional(const FamilySpec& spec, std::span<const double> p) {
  const std::size_t want = spec.kind() == FamilyKind::NormalFull ? 2 : 1;
  if (p.size() != want)
    fail(ErrorCode::InvalidArgument, spec.name() + ": expected " + std::to_string(want) +
                                         " conventional parameter(s)");
  const double v = p[0];
  auto bad = [&](const char* what) {
    fail(ErrorCode::Domain, spec.name() + ": invalid " + what + " " + format_double(v));
  };
  if (!std::isfinite(v)) bad("parameter");
  switch (spec.kind()) {
    case FamilyKind::NormalKnownVar: return NaturalParam(v / spec.aux());
    case FamilyKind::NormalFull: {
      const double var = p[1];
      if (!(var > 0.0) || !std::isfinite(var)) bad("variance");
      return NaturalParam(v / var, -0.5 / var);
    }
    case FamilyKind::LaplaceKnownLoc:
    case FamilyKind::Exponential:
    case FamilyKind::GammaKnownShape:
      if (!(v > 0.0)) bad("scale");
      return NaturalParam(-1.0 / v);
    case FamilyKind::WeibullKnownShape:
      if (!(v > 0.0)) bad("scale");
      return NaturalParam(-std::pow(v, -spec.aux()));
    case FamilyKind::Poisson:
      if (!(v > 0.0)) bad("rate");
      return NaturalParam(std::log(v));
    case FamilyKind::Bernoulli:
      if (!(v > 0.0 && v < 1.0)) bad("probability");
      return NaturalParam(std::log(v) - std::log1p(-v));
    case FamilyKind::NegBinomialKnownR:
      if (!(v > 0.0 && v < 1.0)) bad("probability");
      return NaturalParam(std::log(v));
  }
  return NaturalParam(0.0);
}

}  // namespace efda
