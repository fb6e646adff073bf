#pragma once

#include <array>
#include <span>
#include <vector>

namespace efda {

// Scalar Gaussian class-conditional model. pooled = true is LDA (one shared
// variance), false is QDA (per-class variances). All moments are MLEs (divide
// by the count, not count - 1).
struct GaussianClassModel {
  std::vector<double> priors;
  std::vector<double> means;
  std::vector<double> variances;
  bool pooled = true;
  bool degenerate = false;  // a variance hit the floor

  int classes() const noexcept { return static_cast<int>(priors.size()); }
};

GaussianClassModel fit_lda(std::span<const double> x, std::span<const int> y, int classes);
GaussianClassModel fit_qda(std::span<const double> x, std::span<const int> y, int classes);

// Unnormalised log posterior: log prior_k + log N(x; mean_k, var_k).
std::vector<double> gaussian_scores(const GaussianClassModel& model, double x);
std::vector<double> gaussian_posteriors(const GaussianClassModel& model, double x);
// log P(Y=1|x) / P(Y=0|x); two-class models only.
double gaussian_log_odds(const GaussianClassModel& model, double x);

// Linear-softmax model on features (1, x) with class 0 as the reference:
// score_k = coef[k-1][0] + coef[k-1][1] * x, score_0 = 0.
struct LogisticModel {
  std::vector<std::array<double, 2>> coef;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;  // max-norm of the mean log-likelihood gradient at exit
  std::vector<double> loglik_trace;  // log-likelihood after each accepted step

  int classes() const noexcept { return static_cast<int>(coef.size()) + 1; }
  double intercept() const { return coef.at(0)[0]; }
  double slope() const { return coef.at(0)[1]; }
};

struct LogisticOptions {
  double grad_tol = 1e-8;
  int max_iter = 100;
};

// Unregularised maximum likelihood by Newton/IRLS with step halving.
LogisticModel fit_logistic(std::span<const double> x, std::span<const int> y, int classes,
                           const LogisticOptions& options = {});

std::vector<double> logistic_posteriors(const LogisticModel& model, double x);
double logistic_log_odds(const LogisticModel& model, double x);

}  // namespace efda
