#include "efda/baselines.hpp"
#include "efda/error.hpp"
#include "efda/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

using namespace efda;
using doctest::Approx;

namespace {

double normal_logpdf(double x, double mu, double var) {
  return -0.5 * std::log(2 * std::numbers::pi * var) - (x - mu) * (x - mu) / (2 * var);
}

struct Data {
  std::vector<double> x;
  std::vector<int> y;
};

Data gaussian_data(Rng& rng, std::size_t n, double alpha, double m0, double m1, double s0, double s1) {
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    const int k = rng.uniform() < alpha ? 1 : 0;
    d.x.push_back(k ? m1 + s1 * rng.normal() : m0 + s0 * rng.normal());
    d.y.push_back(k);
  }
  return d;
}

}  // namespace

TEST_CASE("LDA moments") {
  const std::vector<double> x{-2, 0, 0, 2};
  const std::vector<int> y{0, 0, 1, 1};
  const auto m = fit_lda(x, y, 2);
  CHECK(m.pooled);
  CHECK(m.means[0] == -1.0);
  CHECK(m.means[1] == 1.0);
  CHECK(m.variances[0] == 1.0);  // each class has squared deviations 1, 1
  CHECK(m.variances[1] == 1.0);
  CHECK(m.priors[0] == 0.5);

  const std::vector<double> x3{1, 2, 3, 4, 5, 6};
  const std::vector<int> y3{0, 0, 1, 1, 2, 2};
  for (double p : fit_lda(x3, y3, 3).priors) CHECK(p == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(fit_lda(x3, y3, 4), Error);
}

TEST_CASE("LDA log-odds is linear with the textbook coefficients") {
  Rng rng(1);
  const auto d = gaussian_data(rng, 500, 0.3, 0.0, 2.0, 1.0, 1.0);
  const auto m = fit_lda(d.x, d.y, 2);
  const double v = m.variances[0];
  const double slope = (m.means[1] - m.means[0]) / v;
  const double icpt = std::log(m.priors[1] / m.priors[0]) - (m.means[1] * m.means[1] - m.means[0] * m.means[0]) / (2 * v);
  for (double x : {-3.0, 0.5, 4.0}) CHECK(gaussian_log_odds(m, x) == Approx(icpt + slope * x).epsilon(1e-12));
}

TEST_CASE("QDA") {
  Rng rng(2);
  const auto d = gaussian_data(rng, 2000, 0.5, 0.0, 1.0, 1.0, 3.0);
  const auto q = fit_qda(d.x, d.y, 2);
  CHECK_FALSE(q.pooled);
  // Density-ratio oracle.
  for (double x : {-4.0, 0.0, 1.0, 6.0}) {
    const double oracle = std::log(q.priors[1] / q.priors[0]) + normal_logpdf(x, q.means[1], q.variances[1]) -
                          normal_logpdf(x, q.means[0], q.variances[0]);
    CHECK(std::abs(gaussian_log_odds(q, x) - oracle) < 1e-12);
  }
  // With exactly tied class variances QDA and LDA coincide.
  const std::vector<double> x{-1, 1, 2, 4};
  const std::vector<int> y{0, 0, 1, 1};
  const auto a = fit_qda(x, y, 2);
  const auto b = fit_lda(x, y, 2);
  for (double t : {-2.0, 1.5, 3.0}) CHECK(gaussian_posteriors(a, t)[1] == Approx(gaussian_posteriors(b, t)[1]).epsilon(1e-12));

  // A constant class hits the variance floor.
  const auto c = fit_qda(std::vector<double>{1, 1, 1, 0, 3}, std::vector<int>{0, 0, 0, 1, 1}, 2);
  CHECK(c.degenerate);
  CHECK(c.variances[0] > 0.0);
  CHECK(std::isfinite(gaussian_log_odds(c, 1.5)));
}

TEST_CASE("Gaussian posteriors") {
  GaussianClassModel m{{1.0 / 3, 1.0 / 3, 1.0 / 3}, {0, 0, 0}, {1, 1, 1}, true, false};
  for (double p : gaussian_posteriors(m, 0.7)) CHECK(p == Approx(1.0 / 3).epsilon(1e-15));
  GaussianClassModel dom{{0.5, 0.5}, {0, 100}, {1, 1}, true, false};
  CHECK(gaussian_posteriors(dom, 100.0)[1] >= 1 - 1e-15);
  const auto p = gaussian_posteriors(dom, 50.1);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("logistic regression: binary") {
  SUBCASE("symmetric data gives a zero intercept") {
    std::vector<double> x;
    std::vector<int> y;
    for (double v : {0.3, 0.9, 1.4, 2.2, 0.1, -0.5}) {
      x.push_back(v);
      y.push_back(1);
      x.push_back(-v);
      y.push_back(0);
    }
    const auto m = fit_logistic(x, y, 2);
    CHECK(m.converged);
    CHECK(std::abs(m.intercept()) < 1e-6);
    CHECK(m.grad_norm <= 1e-8);
  }
  SUBCASE("recovers the generating coefficients") {
    Rng rng(3);
    std::vector<double> x;
    std::vector<int> y;
    for (int i = 0; i < 100000; ++i) {
      const double v = 2.0 * rng.normal();
      x.push_back(v);
      y.push_back(rng.uniform() < 1.0 / (1.0 + std::exp(-(-1.0 + 2.0 * v))) ? 1 : 0);
    }
    const auto m = fit_logistic(x, y, 2);
    CHECK(m.converged);
    CHECK(std::abs(m.intercept() + 1.0) < 0.05);
    CHECK(std::abs(m.slope() - 2.0) < 0.05);
    for (std::size_t i = 1; i < m.loglik_trace.size(); ++i) CHECK(m.loglik_trace[i] >= m.loglik_trace[i - 1]);
    const auto p = logistic_posteriors(m, 0.4);
    CHECK(std::log(p[1] / p[0]) == Approx(logistic_log_odds(m, 0.4)).epsilon(1e-12));
  }
  SUBCASE("complete separation") {
    const std::vector<double> x{-3, -2, -1, 1, 2, 3};
    const std::vector<int> y{0, 0, 0, 1, 1, 1};
    const auto m = fit_logistic(x, y, 2);
    CHECK_FALSE(m.converged);
    CHECK(std::isfinite(m.slope()));
    CHECK(m.slope() > 0.0);
    CHECK(logistic_posteriors(m, 2.0)[1] > 0.99);
  }
  SUBCASE("matches EFDA-style posterior when coefficients are set from the LDA fit") {
    Rng rng(4);
    const auto d = gaussian_data(rng, 300, 0.5, 0.0, 1.0, 1.0, 1.0);
    const auto lda = fit_lda(d.x, d.y, 2);
    LogisticModel m;
    m.coef = {{gaussian_log_odds(lda, 0.0), gaussian_log_odds(lda, 1.0) - gaussian_log_odds(lda, 0.0)}};
    for (double t : {-2.0, 0.3, 2.0})
      CHECK(logistic_posteriors(m, t)[1] == Approx(gaussian_posteriors(lda, t)[1]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(fit_logistic(std::vector<double>{1, 2}, std::vector<int>{0, 0}, 2), Error);
}

TEST_CASE("logistic regression: multinomial") {
  Rng rng(5);
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 3000; ++i) {
    const int k = i % 3;
    x.push_back(2.0 * k + rng.normal());
    y.push_back(k);
  }
  const auto m = fit_logistic(x, y, 3);
  CHECK(m.classes() == 3);
  CHECK(m.converged);
  CHECK(m.grad_norm <= 1e-8);
  for (std::size_t i = 1; i < m.loglik_trace.size(); ++i) CHECK(m.loglik_trace[i] >= m.loglik_trace[i - 1]);
  const auto p = logistic_posteriors(m, 2.0);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == Approx(1.0).epsilon(1e-12));
  CHECK(p[1] > p[0]);
  CHECK(p[1] > p[2]);
  // Extreme inputs stay finite.
  for (double v : logistic_posteriors(m, 1e6)) CHECK(std::isfinite(v));
}
