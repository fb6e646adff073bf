#include "efda/baselines.hpp"
#include "efda/error.hpp"
#include "efda/mathutil.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace efda {

namespace {

constexpr double kVarianceFloor = 1e-12;
constexpr double kStepTol = 1e-6;
constexpr int kMaxHalvings = 60;

std::vector<std::size_t> checked_counts(std::span<const double> x, std::span<const int> y,
                                        int classes) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidArgument, "feature/label length mismatch");
  if (classes < 2) fail(ErrorCode::InvalidArgument, "need at least two classes");
  std::vector<std::size_t> counts(static_cast<std::size_t>(classes), 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= classes)
      fail(ErrorCode::InvalidArgument, "label " + std::to_string(y[i]) + " out of range");
    if (!std::isfinite(x[i])) fail(ErrorCode::Support, "non-finite feature value");
    ++counts[static_cast<std::size_t>(y[i])];
  }
  for (int k = 0; k < classes; ++k)
    if (counts[static_cast<std::size_t>(k)] == 0)
      fail(ErrorCode::EmptyClass, "class " + std::to_string(k) + " has no training samples");
  return counts;
}

double variance_floor(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double range = *hi - *lo;
  return kVarianceFloor * (range > 0.0 ? range * range : 1.0);
}

GaussianClassModel fit_gaussian(std::span<const double> x, std::span<const int> y, int classes,
                                bool pooled) {
  const auto counts = checked_counts(x, y, classes);
  const auto K = static_cast<std::size_t>(classes);
  if (pooled && x.size() < K + 1)
    fail(ErrorCode::InvalidArgument, "LDA needs at least K + 1 samples");
  GaussianClassModel m;
  m.pooled = pooled;
  m.means.assign(K, 0.0);
  std::vector<double> ss(K, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) m.means[static_cast<std::size_t>(y[i])] += x[i];
  for (std::size_t k = 0; k < K; ++k) {
    m.means[k] /= static_cast<double>(counts[k]);
    m.priors.push_back(static_cast<double>(counts[k]) / static_cast<double>(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto k = static_cast<std::size_t>(y[i]);
    const double d = x[i] - m.means[k];
    ss[k] += d * d;
  }
  const double floor = variance_floor(x);
  auto floored = [&](double v) {
    if (v > floor) return v;
    m.degenerate = true;
    return floor;
  };
  if (pooled) {
    double total = 0.0;
    for (double s : ss) total += s;
    m.variances.assign(K, floored(total / static_cast<double>(x.size())));
  } else {
    for (std::size_t k = 0; k < K; ++k)
      m.variances.push_back(floored(ss[k] / static_cast<double>(counts[k])));
  }
  return m;
}

struct NewtonState {
  double loglik = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd info;  // negative Hessian
};

// Linear softmax with reference class 0; parameters packed [b0_1, b1_1, b0_2, ...].
double loglik_only(const Eigen::VectorXd& theta, std::span<const double> x,
                   std::span<const int> y, int classes) {
  const int m = classes - 1;
  std::vector<double> s(static_cast<std::size_t>(classes));
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[0] = 0.0;
    double mx = 0.0;
    for (int k = 0; k < m; ++k) {
      s[static_cast<std::size_t>(k + 1)] = theta[2 * k] + theta[2 * k + 1] * x[i];
      mx = std::max(mx, s[static_cast<std::size_t>(k + 1)]);
    }
    double z = 0.0;
    for (double v : s) z += std::exp(v - mx);
    ll += s[static_cast<std::size_t>(y[i])] - (mx + std::log(z));
  }
  return ll;
}

NewtonState evaluate(const Eigen::VectorXd& theta, std::span<const double> x,
                     std::span<const int> y, int classes) {
  const int m = classes - 1;
  NewtonState st;
  st.grad = Eigen::VectorXd::Zero(2 * m);
  st.info = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  std::vector<double> p(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[0] = 0.0;
    for (int k = 0; k < m; ++k) p[static_cast<std::size_t>(k + 1)] = theta[2 * k] + theta[2 * k + 1] * x[i];
    const double score_y = p[static_cast<std::size_t>(y[i])];
    const double mx = *std::max_element(p.begin(), p.end());
    double z = 0.0;
    for (double& v : p) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : p) v /= z;
    st.loglik += score_y - (mx + std::log(z));
    const double xi = x[i];
    for (int k = 0; k < m; ++k) {
      const double pk = p[static_cast<std::size_t>(k + 1)];
      const double r = (y[i] == k + 1 ? 1.0 : 0.0) - pk;
      st.grad[2 * k] += r;
      st.grad[2 * k + 1] += r * xi;
      for (int l = 0; l < m; ++l) {
        const double pl = p[static_cast<std::size_t>(l + 1)];
        const double w = (k == l ? pk : 0.0) - pk * pl;
        st.info(2 * k, 2 * l) += w;
        st.info(2 * k, 2 * l + 1) += w * xi;
        st.info(2 * k + 1, 2 * l) += w * xi;
        st.info(2 * k + 1, 2 * l + 1) += w * xi * xi;
      }
    }
  }
  return st;
}

}  // namespace

GaussianClassModel fit_lda(std::span<const double> x, std::span<const int> y, int classes) {
  return fit_gaussian(x, y, classes, true);
}

GaussianClassModel fit_qda(std::span<const double> x, std::span<const int> y, int classes) {
  return fit_gaussian(x, y, classes, false);
}

std::vector<double> gaussian_scores(const GaussianClassModel& model, double x) {
  std::vector<double> s(model.priors.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double v = model.variances[k];
    const double d = x - model.means[k];
    s[k] = std::log(model.priors[k]) - 0.5 * std::log(2.0 * std::numbers::pi * v) -
           d * d / (2.0 * v);
  }
  return s;
}

std::vector<double> gaussian_posteriors(const GaussianClassModel& model, double x) {
  auto s = gaussian_scores(model, x);
  softmax(s);
  return s;
}

double gaussian_log_odds(const GaussianClassModel& model, double x) {
  if (model.classes() != 2) fail(ErrorCode::InvalidArgument, "log-odds needs a two-class model");
  const auto s = gaussian_scores(model, x);
  return s[1] - s[0];
}

LogisticModel fit_logistic(std::span<const double> x, std::span<const int> y, int classes,
                           const LogisticOptions& options) {
  const auto counts = checked_counts(x, y, classes);
  const int m = classes - 1;
  const double n = static_cast<double>(x.size());

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(2 * m);
  for (int k = 0; k < m; ++k)
    theta[2 * k] = std::log(static_cast<double>(counts[static_cast<std::size_t>(k + 1)]) /
                            static_cast<double>(counts[0]));

  LogisticModel model;
  NewtonState st = evaluate(theta, x, y, classes);
  model.loglik_trace.push_back(st.loglik);
  bool last_step_small = false;

  for (int it = 0; it < options.max_iter; ++it) {
    model.grad_norm = st.grad.cwiseAbs().maxCoeff() / n;
    if (model.grad_norm <= options.grad_tol && last_step_small) {
      model.converged = true;
      break;
    }
    const Eigen::VectorXd step = st.info.ldlt().solve(st.grad);
    if (!step.allFinite()) break;
    ++model.iterations;

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      const Eigen::VectorXd trial = theta + t * step;
      if (loglik_only(trial, x, y, classes) >= st.loglik) {
        last_step_small = (t * step).cwiseAbs().maxCoeff() <=
                          kStepTol * (1.0 + trial.cwiseAbs().maxCoeff());
        theta = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent left in double precision: stationary iff the gradient is small.
      model.converged = model.grad_norm <= options.grad_tol;
      break;
    }
    st = evaluate(theta, x, y, classes);
    model.loglik_trace.push_back(st.loglik);
    model.grad_norm = st.grad.cwiseAbs().maxCoeff() / n;
  }
  if (!model.converged && model.grad_norm <= options.grad_tol && last_step_small)
    model.converged = true;

  for (int k = 0; k < m; ++k) model.coef.push_back({theta[2 * k], theta[2 * k + 1]});
  return model;
}

std::vector<double> logistic_posteriors(const LogisticModel& model, double x) {
  std::vector<double> s(static_cast<std::size_t>(model.classes()), 0.0);
  for (std::size_t k = 0; k < model.coef.size(); ++k)
    s[k + 1] = model.coef[k][0] + model.coef[k][1] * x;
  softmax(s);
  return s;
}

double logistic_log_odds(const LogisticModel& model, double x) {
  if (model.classes() != 2) fail(ErrorCode::InvalidArgument, "log-odds needs a two-class model");
  return model.coef[0][0] + model.coef[0][1] * x;
}

}  // namespace efda
