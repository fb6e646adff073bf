#include "efda/classifier.hpp"
#include "efda/baselines.hpp"
#include "efda/error.hpp"
#include "efda/mathutil.hpp"
#include "efda/rng.hpp"

#include "support/structural.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace efda;
using doctest::Approx;

namespace {

// Direct full-Bayes log joint: log prior + log density, base measure included.
std::vector<double> log_joint(const MulticlassModel& m, double x) {
  std::vector<double> out;
  for (int k = 0; k < m.classes(); ++k)
    out.push_back(std::log(m.priors()[static_cast<std::size_t>(k)]) +
                  log_density(m.spec(), m.etas()[static_cast<std::size_t>(k)], x));
  return out;
}

}  // namespace

TEST_CASE("fit_binary examples") {
  const auto spec = FamilySpec::poisson();
  const std::vector<double> x{1, 3, 4, 4};
  const std::vector<int> y{0, 0, 1, 1};
  const auto m = fit_binary(spec, x, y);
  CHECK(m.alpha() == 0.5);
  CHECK(m.eta0()[0] == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(m.eta1()[0] == Approx(std::log(4.0)).epsilon(1e-15));
  CHECK_FALSE(m.symmetric());

  const auto same = fit_binary(spec, std::vector<double>{2, 5, 2, 5}, std::vector<int>{0, 0, 1, 1});
  CHECK(same.symmetric());
  CHECK(same.log_odds(3.0) == 0.0);

  std::vector<double> bx(100);
  std::vector<int> by(100);
  for (int i = 0; i < 100; ++i) {
    bx[static_cast<std::size_t>(i)] = i % 2;
    by[static_cast<std::size_t>(i)] = i < 30 ? 0 : 1;
  }
  CHECK(fit_binary(FamilySpec::bernoulli(), bx, by).alpha() == Approx(0.7).epsilon(1e-15));

  CHECK_THROWS_AS(fit_binary(spec, std::vector<double>{1, 2}, std::vector<int>{1, 1}), Error);
  CHECK_THROWS_AS(fit_binary(spec, std::vector<double>{1, 2}, std::vector<int>{0, 2}), Error);
  CHECK_THROWS_AS(fit_binary(spec, std::vector<double>{1, 2.5}, std::vector<int>{0, 1}), Error);
}

TEST_CASE("degenerate classes are shrunk and flagged") {
  const auto m = fit_binary(FamilySpec::poisson(), std::vector<double>{0, 0, 0, 2, 3},
                            std::vector<int>{0, 0, 0, 1, 1});
  CHECK(m.degenerate(0));
  CHECK_FALSE(m.degenerate(1));
  CHECK(std::isfinite(m.eta0()[0]));
  const auto b = fit_binary(FamilySpec::bernoulli(), std::vector<double>{1, 1, 0, 1},
                            std::vector<int>{0, 0, 1, 1});
  CHECK(b.degenerate(0));
  CHECK(std::isfinite(b.log_odds(1.0)));
}

TEST_CASE("log-odds closed forms") {
  // Exponential with scales theta0 = 2, theta1 = 1. From the densities
  // (1/theta) exp(-x/theta): log(theta0/theta1) + x (1/theta0 - 1/theta1).
  const BinaryModel m(FamilySpec::exponential(), 0.5, NaturalParam(-0.5), NaturalParam(-1.0));
  for (double x : {0.3, 2.0 * std::log(2.0), 4.0})
    CHECK(m.log_odds(x) == Approx(std::log(2.0) - 0.5 * x).epsilon(1e-14));
  CHECK(std::abs(m.log_odds(2.0 * std::log(2.0))) < 1e-15);

  const BinaryModel sym(FamilySpec::weibull(3.0), 0.5, NaturalParam(-0.2), NaturalParam(-0.2));
  CHECK(sym.log_odds(1.7) == 0.0);
  CHECK(sym.posterior(1.7) == 0.5);

  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double a = 0.05 + 0.9 * rng.uniform();
    const BinaryModel r(FamilySpec::gamma(2.0), a, NaturalParam(-0.2 - rng.uniform()),
                        NaturalParam(-0.2 - rng.uniform()));
    const double xx = 0.1 + 10.0 * rng.uniform();
    const double p = r.posterior(xx);
    if (p > 1e-9 && p < 1 - 1e-9) CHECK(std::log(p / (1 - p)) == Approx(r.log_odds(xx)).epsilon(1e-9));
    // Same quantity from the definition with the base measure.
    const double direct = std::log(a / (1 - a)) + log_density(r.spec(), r.eta1(), xx) -
                          log_density(r.spec(), r.eta0(), xx);
    CHECK(r.log_odds(xx) == Approx(direct).epsilon(1e-12));
    // Binary against the equivalent two-class multiclass model.
    const MulticlassModel mc(r.spec(), {1 - a, a}, {r.eta0(), r.eta1()});
    CHECK(std::abs(mc.posteriors(xx)[1] - p) < 1e-12);
    const auto s = mc.score(xx);
    CHECK(std::abs((s[1] - s[0]) - r.log_odds(xx)) < 1e-12);
  }
}

TEST_CASE("posterior is stable at extreme log-odds") {
  // eta1 - eta0 = 1 on T(x) = x with equal partitions gives log-odds = x.
  const BinaryModel m(FamilySpec::normal_known_var(1.0), 0.5, NaturalParam(-0.5), NaturalParam(0.5));
  CHECK(m.log_odds(40.0) == Approx(40.0).epsilon(1e-14));
  CHECK(m.posterior(40.0) >= 1 - 1e-15);
  CHECK(m.posterior(-800.0) >= 0.0);
  CHECK(m.posterior(800.0) == 1.0);
  CHECK(std::isfinite(m.log_odds(800.0)));
}

TEST_CASE("monotone in T and prior shift moves only the intercept") {
  const auto spec = FamilySpec::weibull(3.0);
  Rng rng(4);
  auto x0 = sample(spec, NaturalParam(-1.0 / 64), rng, 300);
  auto x1 = sample(spec, NaturalParam(-1.0 / 8), rng, 300);
  std::vector<double> x(x0);
  x.insert(x.end(), x1.begin(), x1.end());
  std::vector<int> y(300, 0);
  y.insert(y.end(), 300, 1);
  const auto m = fit_binary(spec, x, y);
  // Here eta1 < eta0, so the log-odds falls as T(x) = x^3 grows.
  REQUIRE(m.slope()[0] < 0.0);
  double prev = INFINITY;
  for (double t = 0.1; t < 6.0; t += 0.1) {
    CHECK(m.log_odds(t) <= prev);
    prev = m.log_odds(t);
  }
  const BinaryModel up(spec, 0.5, m.eta1(), m.eta0());
  prev = -INFINITY;
  for (double t = 0.1; t < 6.0; t += 0.1) {
    CHECK(up.log_odds(t) >= prev);
    prev = up.log_odds(t);
  }
  // Duplicate the class-1 data: slope identical, intercept shifts by the prior logit.
  std::vector<double> xd(x);
  xd.insert(xd.end(), x1.begin(), x1.end());
  std::vector<int> yd(y);
  yd.insert(yd.end(), 300, 1);
  const auto md = fit_binary(spec, xd, yd);
  // Equal up to summation rounding of the duplicated class mean.
  CHECK(md.slope()[0] == Approx(m.slope()[0]).epsilon(1e-13));
  CHECK(md.intercept() - m.intercept() == Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("multiclass fitting and MAP rule") {
  const auto spec = FamilySpec::poisson();
  const std::vector<double> x{1, 1, 2, 2, 4, 4};
  const std::vector<int> y{0, 0, 1, 1, 2, 2};
  const auto m = fit_multiclass(spec, x, y, 3);
  CHECK(m.etas()[0][0] == 0.0);
  CHECK(m.etas()[1][0] == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(m.etas()[2][0] == Approx(std::log(4.0)).epsilon(1e-15));
  for (double p : m.priors()) CHECK(p == 1.0 / 3.0);
  CHECK(m.predict(10.0) == 2);

  // K = 2 reproduces fit_binary.
  const std::vector<double> bx{1, 3, 4, 4, 6};
  const std::vector<int> byy{0, 0, 1, 1, 1};
  const auto b = fit_binary(spec, bx, byy);
  const auto mc = fit_multiclass(spec, bx, byy, 2);
  CHECK(mc.priors()[1] == b.alpha());
  CHECK(mc.etas()[0] == b.eta0());
  CHECK(mc.etas()[1] == b.eta1());

  CHECK_THROWS_AS(fit_multiclass(spec, x, y, 4), Error);
}

TEST_CASE("multiclass scores and posteriors") {
  const auto spec = FamilySpec::gamma(2.0);
  const MulticlassModel m(spec, {0.2, 0.3, 0.5},
                          {NaturalParam(-2.0), NaturalParam(-1.0), NaturalParam(-0.5)});
  for (double x : {0.1, 0.7, 2.0, 5.0, 20.0}) {
    const auto s = m.score(x);
    const auto p = m.posteriors(x);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == Approx(1.0).epsilon(1e-12));
    // Pairwise differences are the pairwise log-odds.
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const auto uj = static_cast<std::size_t>(j), uk = static_cast<std::size_t>(k);
        const double lo = std::log(m.priors()[uk] / m.priors()[uj]) + log_partition(spec, m.etas()[uj]) -
                          log_partition(spec, m.etas()[uk]) +
                          (m.etas()[uk][0] - m.etas()[uj][0]) * suff_stat(spec, x)[0];
        CHECK(std::abs((s[uk] - s[uj]) - lo) < 1e-12);
      }
    // Full-Bayes oracle with the base measure.
    auto lj = log_joint(m, x);
    softmax(lj);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(lj[k] - p[k]) < 1e-9);
  }
  // Identical classes: all scores equal and ties go to class 0.
  const MulticlassModel flat(spec, {0.25, 0.25, 0.25, 0.25},
                             std::vector<NaturalParam>(4, NaturalParam(-1.0)));
  const auto s = flat.score(1.3);
  for (double v : s) CHECK(v == s[0]);
  CHECK(flat.predict(1.3) == 0);
  for (double v : flat.posteriors(1.3)) CHECK(v == 0.25);

  const MulticlassModel tie(FamilySpec::normal_known_var(1.0), {0.5, 0.5},
                            {NaturalParam(-1.0), NaturalParam(1.0)});
  CHECK(tie.predict(0.0) == 0);

  // One dominant score.
  const MulticlassModel dom(FamilySpec::normal_known_var(1.0), {0.5, 0.5},
                            {NaturalParam(0.0), NaturalParam(10.0)});
  CHECK(dom.posteriors(10.0)[1] >= 1 - 1e-15);
}

TEST_CASE("separated classes are recovered") {
  const auto spec = FamilySpec::poisson();
  Rng rng(8);
  const std::vector<double> rates{1, 20, 80};
  const MulticlassModel m(spec, {1.0 / 3, 1.0 / 3, 1.0 / 3},
                          {NaturalParam(std::log(1.0)), NaturalParam(std::log(20.0)),
                           NaturalParam(std::log(80.0))});
  int correct = 0;
  for (int i = 0; i < 3000; ++i) {
    const int k = i % 3;
    const double x = sample_one(spec, m.etas()[static_cast<std::size_t>(k)], rng);
    correct += m.predict(x) == k;
  }
  CHECK(correct >= 2990);
}

TEST_CASE("product model") {
  Rng rng(12);
  SUBCASE("d = 1 matches the multiclass model") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) CHECK(testing::product_reduction_error(seed) < 1e-12);
  }

  SUBCASE("two Poisson features equal a direct Naive Bayes computation") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) CHECK(testing::poisson_naive_bayes_error(seed) < 1e-9);
  }

  SUBCASE("mixed features decompose into per-feature log-odds") {
    const std::vector<FamilySpec> specs{FamilySpec::poisson(), FamilySpec::weibull(3.0),
                                        FamilySpec::bernoulli()};
    Dataset d;
    d.dims = 3;
    for (int i = 0; i < 600; ++i) {
      const int k = i % 2;
      d.push_back(std::vector<double>{sample_one(specs[0], NaturalParam(k ? 1.5 : 0.5), rng),
                                      sample_one(specs[1], NaturalParam(k ? -0.125 : -1.0 / 64), rng),
                                      sample_one(specs[2], NaturalParam(k ? 0.8 : -0.4), rng)},
                  k);
    }
    const auto pm = fit_product(specs, d, 2);
    const double prior = std::log(pm.priors()[1] / pm.priors()[0]);
    const std::vector<double> x{2.0, 1.7, 1.0};
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const BinaryModel b(specs[j], pm.priors()[1], pm.etas()[0][j], pm.etas()[1][j]);
      sum += b.log_odds(x[j]);
    }
    const auto s = pm.score(x);
    CHECK(std::abs((s[1] - s[0]) - (sum - 2.0 * prior)) < 1e-12);
  }
}

TEST_CASE("EFDA with a known-variance normal reproduces LDA") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) CHECK(testing::lda_identity_error(seed) < 1e-10);
}
