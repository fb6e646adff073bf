#pragma once

#include "efda/expfam.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace efda {

// Top-label prediction: confidence is the probability assigned to `predicted`.
struct PredictionRecord {
  double confidence = 0.0;
  int predicted = 0;
  int actual = 0;

  bool correct() const noexcept { return predicted == actual; }
};

// Builds a record from a class-probability vector (argmax, lowest index on ties).
PredictionRecord make_record(std::span<const double> probs, int actual);
// Two-class shortcut from P(Y=1|x); predicts 1 only when p1 > 0.5.
PredictionRecord make_binary_record(double p1, int actual);
// Reliability record for the positive-class probability itself: the event is
// Y = 1 regardless of which class p1 favours. Meant for ece(), not accuracy().
PredictionRecord make_class1_record(double p1, int actual);

struct ReliabilityBin {
  double lower = 0.0, upper = 0.0;  // (lower, upper]; the first bin also holds 0
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
};

// Equal-width, right-closed bins over [0, 1].
std::vector<ReliabilityBin> reliability_bins(std::span<const PredictionRecord> records,
                                             int bins);
double ece(std::span<const PredictionRecord> records, int bins = 10);
double accuracy(std::span<const PredictionRecord> records);

// Log-odds of class 1 at x0 under known parameters.
double true_log_odds(const FamilySpec& spec, const NaturalParam& eta0, const NaturalParam& eta1,
                     double alpha, double x0);

struct CRInputs {
  FamilySpec spec;
  NaturalParam eta0, eta1;
  double n0 = 0.0, n1 = 0.0;
  double x0 = 0.0;
};

// Delta-method variance of the fitted log-odds at x0 when each class's eta
// attains its Cramer-Rao bound:
//   sum_k (T(x0) - A'(eta_k))^2 / (N_k I(eta_k)).
double cr_bound_log_odds(const CRInputs& in);

struct EstimatorStats {
  double mean = 0.0;
  double variance = 0.0;  // population variance over trials
  double mse = 0.0;
  double bias = 0.0;
};

EstimatorStats estimator_stats(std::span<const double> estimates, double truth);

}  // namespace efda
