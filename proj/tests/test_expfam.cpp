#include "efda/error.hpp"
#include "efda/expfam.hpp"
#include "efda/rng.hpp"
#include "support/closed_form.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace efda;
using doctest::Approx;

namespace {

void check_code(ErrorCode expected, auto&& fn) {
  try {
    fn();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == expected);
  }
}

struct Moments {
  double mean = 0.0, var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

}  // namespace

TEST_CASE("log_partition examples") {
  CHECK(log_partition(FamilySpec::poisson(), NaturalParam(0.0)) == Approx(1.0).epsilon(1e-15));
  CHECK(log_partition(FamilySpec::exponential(), NaturalParam(-1.0)) == 0.0);
  CHECK(log_partition(FamilySpec::weibull(3.0), NaturalParam(-1.0)) ==
        Approx(-1.0986122886681098).epsilon(1e-14));
  check_code(ErrorCode::Domain, [] { log_partition(FamilySpec::exponential(), NaturalParam(0.0)); });
  check_code(ErrorCode::Domain, [] { log_partition(FamilySpec::normal_full(), NaturalParam(0.0, 1.0)); });
}

TEST_CASE("mean and variance of the sufficient statistic") {
  CHECK(mean_suffstat(FamilySpec::poisson(), NaturalParam(std::log(2.0)))[0] == Approx(2.0).epsilon(1e-15));
  CHECK(mean_suffstat(FamilySpec::exponential(), NaturalParam(-0.5))[0] == 2.0);
  CHECK(mean_suffstat(FamilySpec::bernoulli(), NaturalParam(0.0))[0] == 0.5);
  CHECK(var_suffstat(FamilySpec::poisson(), NaturalParam(0.0)) == 1.0);
  CHECK(var_suffstat(FamilySpec::weibull(3.0), NaturalParam(-0.25)) == 16.0);
  CHECK(var_suffstat(FamilySpec::exponential(), NaturalParam(-2.0)) == 0.25);
  check_code(ErrorCode::UnsupportedFamily,
             [] { var_suffstat(FamilySpec::normal_full(), NaturalParam(0.0, -0.5)); });
}

TEST_CASE("sufficient statistics and support") {
  CHECK(suff_stat(FamilySpec::weibull(3.0), 2.0)[0] == 8.0);
  const SuffStat t = suff_stat(FamilySpec::normal_full(), 3.0);
  CHECK(t.dim() == 2);
  CHECK(t[0] == 3.0);
  CHECK(t[1] == 9.0);
  CHECK(suff_stat(FamilySpec::laplace(1.0), -2.0)[0] == 3.0);
  CHECK(suff_stat(FamilySpec::normal_known_var(2.0), 3.0)[0] == 1.5);
  check_code(ErrorCode::Support, [] { suff_stat(FamilySpec::weibull(3.0), 0.0); });
  check_code(ErrorCode::Support, [] { suff_stat(FamilySpec::poisson(), 1.5); });
  check_code(ErrorCode::Support, [] { suff_stat(FamilySpec::bernoulli(), 2.0); });
  check_code(ErrorCode::Support, [] { suff_stat(FamilySpec::negative_binomial(2.0), -1.0); });
}

TEST_CASE("log_density examples") {
  CHECK(log_density(FamilySpec::exponential(), NaturalParam(-1.0), 1.0) == -1.0);
  CHECK(log_density(FamilySpec::poisson(), NaturalParam(0.0), 0.0) == -1.0);
  CHECK(log_density(FamilySpec::bernoulli(), NaturalParam(0.0), 1.0) ==
        Approx(std::log(0.5)).epsilon(1e-15));
  // Weibull(k=3, lambda=2) at x=1 against the textbook density.
  const double k = 3.0, lam = 2.0, x = 1.0;
  const double pdf = k / lam * std::pow(x / lam, k - 1) * std::exp(-std::pow(x / lam, k));
  CHECK(log_density(FamilySpec::weibull(k), NaturalParam(-std::pow(lam, -k)), x) ==
        Approx(std::log(pdf)).epsilon(1e-13));
  // Gamma(a=2.5, theta=1.5) at x=2.
  const double a = 2.5, th = 1.5;
  const double gpdf = std::pow(2.0, a - 1) * std::exp(-2.0 / th) / (std::tgamma(a) * std::pow(th, a));
  CHECK(log_density(FamilySpec::gamma(a), NaturalParam(-1.0 / th), 2.0) ==
        Approx(std::log(gpdf)).epsilon(1e-13));
  // NegBinomial(r=2, p) with pmf C(x+r-1, x) p^x (1-p)^r at x=3.
  const double p = 0.4;
  const double nb = 4.0 * std::pow(p, 3) * std::pow(1 - p, 2);
  CHECK(log_density(FamilySpec::negative_binomial(2.0), NaturalParam(std::log(p)), 3.0) ==
        Approx(std::log(nb)).epsilon(1e-13));
  // Normal with known sigma=2, mean 1, at x=0.5.
  const double s = 2.0, mu = 1.0;
  const double npdf = std::exp(-(0.5 - mu) * (0.5 - mu) / (2 * s * s)) / (s * std::sqrt(2 * std::numbers::pi));
  CHECK(log_density(FamilySpec::normal_known_var(s), NaturalParam(mu / s), 0.5) ==
        Approx(std::log(npdf)).epsilon(1e-13));
}

TEST_CASE("mle_from_mean examples") {
  auto mle = [](const FamilySpec& s, double m) { return mle_from_mean(s, SuffStatMean{SuffStat(m), 10})[0]; };
  CHECK(mle(FamilySpec::poisson(), 2.0) == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(mle(FamilySpec::bernoulli(), 0.5) == 0.0);
  CHECK(mle(FamilySpec::weibull(3.0), 8.0) == -0.125);
  CHECK(mle(FamilySpec::negative_binomial(2.0), 2.0) == Approx(std::log(0.5)).epsilon(1e-15));
  check_code(ErrorCode::DegenerateData, [&] { mle(FamilySpec::bernoulli(), 1.0); });
  check_code(ErrorCode::DegenerateData, [&] { mle(FamilySpec::poisson(), 0.0); });
  check_code(ErrorCode::DegenerateData, [] {
    mle_from_mean(FamilySpec::normal_full(), SuffStatMean{SuffStat(2.0, 4.0), 5});
  });
}

TEST_CASE("closed-form suite over all nine families") {
  const auto rep = testing::run_closed_form_suite(20);
  INFO(rep.moments.detail, rep.round_trip.detail, rep.normalization.detail, rep.argmax.detail);
  CHECK(rep.moments.ok);
  CHECK(rep.round_trip.ok);
  CHECK(rep.normalization.ok);
  CHECK(rep.argmax.ok);
  CHECK(rep.moments.cases >= 9 * 20);
}

TEST_CASE("conventional parameterisation") {
  CHECK(natural_from_conventional(FamilySpec::weibull(3.0), std::vector<double>{2.0})[0] == -0.125);
  CHECK(natural_from_conventional(FamilySpec::exponential(), std::vector<double>{2.0})[0] == -0.5);
  CHECK(natural_from_conventional(FamilySpec::poisson(), std::vector<double>{3.0})[0] ==
        Approx(std::log(3.0)).epsilon(1e-15));
  const auto nf = natural_from_conventional(FamilySpec::normal_full(), std::vector<double>{1.0, 4.0});
  CHECK(nf[0] == 0.25);
  CHECK(nf[1] == -0.125);
  // A gamma with scale theta has mean a * theta.
  const auto g = natural_from_conventional(FamilySpec::gamma(2.0), std::vector<double>{1.5});
  CHECK(mean_suffstat(FamilySpec::gamma(2.0), g)[0] == Approx(3.0).epsilon(1e-15));
}

TEST_CASE("family spec text form") {
  for (const auto& s : testing::all_families()) CHECK(FamilySpec::parse(s.name()) == s);
  check_code(ErrorCode::Parse, [] { FamilySpec::parse("cauchy"); });
  CHECK_THROWS_AS(FamilySpec::parse("weibull:-1"), Error);
  CHECK_THROWS_AS(FamilySpec::parse("poisson:2"), Error);
}

TEST_CASE("samplers match A' and A'' within 4 standard errors") {
  constexpr std::size_t n = 1'000'000;
  std::uint64_t seed = 100;
  for (const auto& spec : testing::all_families()) {
    if (spec.kind() == FamilyKind::NormalFull) continue;
    for (const auto& eta : testing::eta_grid(spec, 3)) {
      Rng rng(seed++);
      const auto xs = sample(spec, eta, rng, n);
      std::vector<double> t(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) t[i] = suff_stat(spec, xs[i])[0];
      const Moments m = moments(t);
      const double mu = mean_suffstat(spec, eta)[0];
      const double v = var_suffstat(spec, eta);
      // Standard error of the variance uses the fourth central moment of T.
      double m4 = 0.0;
      for (double x : t) m4 += std::pow(x - m.mean, 4);
      m4 /= static_cast<double>(n);
      INFO(spec.name(), " eta=", eta[0]);
      CHECK(std::abs(m.mean - mu) <= 4.0 * std::sqrt(v / n));
      CHECK(std::abs(m.var - v) <= 4.0 * std::sqrt((m4 - v * v) / n));
    }
  }
}

TEST_CASE("normal_full sampler and statistic") {
  Rng rng(5);
  const auto spec = FamilySpec::normal_full();
  const auto eta = natural_from_conventional(spec, std::vector<double>{1.5, 2.0});
  const auto xs = sample(spec, eta, rng, 400000);
  const Moments m = moments(xs);
  CHECK(std::abs(m.mean - 1.5) < 4.0 * std::sqrt(2.0 / 400000));
  CHECK(std::abs(m.var - 2.0) < 4.0 * std::sqrt(2.0 * 4.0 / 400000));
}

TEST_CASE("sampling edge cases and determinism") {
  Rng a(9), b(9);
  CHECK(sample(FamilySpec::poisson(), NaturalParam(1.0), a, 0).empty());
  // Large Poisson means go through the rejection branch.
  const auto x1 = sample(FamilySpec::poisson(), NaturalParam(std::log(80.0)), a, 1000);
  const auto x2 = sample(FamilySpec::poisson(), NaturalParam(std::log(80.0)), b, 0);
  CHECK(x2.empty());
  Rng c(9);
  CHECK(sample(FamilySpec::poisson(), NaturalParam(std::log(80.0)), c, 1000) == x1);
  check_code(ErrorCode::Domain, [] {
    Rng r(1);
    sample(FamilySpec::exponential(), NaturalParam(1.0), r, 3);
  });
  // Gamma with shape below one uses the boosted Marsaglia-Tsang path.
  Rng g(3);
  const auto gs = sample(FamilySpec::gamma(0.4), NaturalParam(-1.0), g, 200000);
  CHECK(std::abs(moments(gs).mean - 0.4) < 4.0 * std::sqrt(0.4 / 200000));
}

TEST_CASE("weibull shape estimation") {
  Rng rng(2024);
  const auto spec = FamilySpec::weibull(3.0);
  const auto xs = sample(spec, natural_from_conventional(spec, std::vector<double>{2.0}), rng, 5000);
  CHECK(std::abs(fit_weibull_shape(xs).shape - 3.0) < 0.15);

  const auto ex = sample(FamilySpec::exponential(), NaturalParam(-0.5), rng, 50000);
  CHECK(std::abs(fit_weibull_shape(ex).shape - 1.0) < 0.02);

  check_code(ErrorCode::DegenerateData, [] { fit_weibull_shape(std::vector<double>{1, 1, 1}); });
  check_code(ErrorCode::Support, [] { fit_weibull_shape(std::vector<double>{1, -1, 2}); });

  SUBCASE("score equation holds at the estimate") {
    const double k = fit_weibull_shape(xs).shape;
    double s0 = 0, s1 = 0, ml = 0;
    for (double x : xs) {
      s0 += std::pow(x, k);
      s1 += std::pow(x, k) * std::log(x);
      ml += std::log(x);
    }
    ml /= static_cast<double>(xs.size());
    CHECK(std::abs(s1 / s0 - 1.0 / k - ml) < 1e-9);
  }

  SUBCASE("shared shape with per-class scales") {
    const auto a = sample(spec, natural_from_conventional(spec, std::vector<double>{4.0}), rng, 3000);
    const auto b = sample(spec, natural_from_conventional(spec, std::vector<double>{2.0}), rng, 7000);
    std::vector<double> x(a);
    x.insert(x.end(), b.begin(), b.end());
    std::vector<int> y(a.size(), 0);
    y.insert(y.end(), b.size(), 1);
    const double joint = fit_weibull_shape(x, y).shape;
    CHECK(std::abs(joint - 3.0) < 0.1);
    // Mixing two scales inflates the spread, so a single pooled fit is biased low.
    CHECK(fit_weibull_shape(x).shape < joint - 0.3);
    // One label reduces to the ungrouped estimate.
    CHECK(fit_weibull_shape(a, std::vector<int>(a.size(), 0)).shape ==
          Approx(fit_weibull_shape(a).shape).epsilon(1e-12));
  }
}
