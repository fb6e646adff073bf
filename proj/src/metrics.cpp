#include "efda/metrics.hpp"
#include "efda/error.hpp"
#include "efda/mathutil.hpp"

#include <algorithm>
#include <cmath>

namespace efda {

PredictionRecord make_record(std::span<const double> probs, int actual) {
  if (probs.empty()) fail(ErrorCode::InvalidArgument, "empty probability vector");
  const int k = argmax(probs);
  return {probs[static_cast<std::size_t>(k)], k, actual};
}

PredictionRecord make_binary_record(double p1, int actual) {
  return p1 > 0.5 ? PredictionRecord{p1, 1, actual} : PredictionRecord{1.0 - p1, 0, actual};
}

PredictionRecord make_class1_record(double p1, int actual) { return {p1, 1, actual}; }

std::vector<ReliabilityBin> reliability_bins(std::span<const PredictionRecord> records,
                                             int bins) {
  if (bins < 1) fail(ErrorCode::InvalidArgument, "bin count must be >= 1");
  if (records.empty()) fail(ErrorCode::InvalidArgument, "no prediction records");
  const auto nb = static_cast<std::size_t>(bins);
  std::vector<ReliabilityBin> out(nb);
  std::vector<double> conf_sum(nb, 0.0), hits(nb, 0.0);
  for (const auto& r : records) {
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0))
      fail(ErrorCode::InvalidArgument, "confidence outside [0, 1]");
    // Right-closed: (b/B, (b+1)/B] maps to b; exactly 0 goes to the first bin.
    const double c = std::ceil(r.confidence * bins) - 1.0;
    const auto b = static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(bins - 1)));
    ++out[b].count;
    conf_sum[b] += r.confidence;
    hits[b] += r.correct() ? 1.0 : 0.0;
  }
  for (std::size_t b = 0; b < nb; ++b) {
    out[b].lower = static_cast<double>(b) / bins;
    out[b].upper = static_cast<double>(b + 1) / bins;
    if (out[b].count) {
      out[b].mean_confidence = conf_sum[b] / static_cast<double>(out[b].count);
      out[b].accuracy = hits[b] / static_cast<double>(out[b].count);
    }
  }
  return out;
}

double ece(std::span<const PredictionRecord> records, int bins) {
  const auto table = reliability_bins(records, bins);
  const double n = static_cast<double>(records.size());
  double e = 0.0;
  for (const auto& b : table)
    if (b.count)
      e += (static_cast<double>(b.count) / n) * std::abs(b.mean_confidence - b.accuracy);
  return e;
}

double accuracy(std::span<const PredictionRecord> records) {
  if (records.empty()) fail(ErrorCode::InvalidArgument, "no prediction records");
  const auto hits = std::count_if(records.begin(), records.end(),
                                  [](const PredictionRecord& r) { return r.correct(); });
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double true_log_odds(const FamilySpec& spec, const NaturalParam& eta0, const NaturalParam& eta1,
                     double alpha, double x0) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha outside (0, 1)");
  const SuffStat t = suff_stat(spec, x0);
  return std::log(alpha) - std::log1p(-alpha) + log_partition(spec, eta0) -
         log_partition(spec, eta1) + dot(eta1, t) - dot(eta0, t);
}

double cr_bound_log_odds(const CRInputs& in) {
  if (!(in.n0 > 0.0) || !(in.n1 > 0.0))
    fail(ErrorCode::InvalidArgument, "class counts must be positive");
  const double t = suff_stat(in.spec, in.x0)[0];
  auto term = [&](const NaturalParam& eta, double count) {
    const double d = t - mean_suffstat(in.spec, eta)[0];
    return d * d / (count * var_suffstat(in.spec, eta));
  };
  return term(in.eta1, in.n1) + term(in.eta0, in.n0);
}

EstimatorStats estimator_stats(std::span<const double> estimates, double truth) {
  if (estimates.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two estimates");
  const double n = static_cast<double>(estimates.size());
  EstimatorStats s;
  for (double e : estimates) s.mean += e;
  s.mean /= n;
  for (double e : estimates) {
    s.variance += (e - s.mean) * (e - s.mean);
    s.mse += (e - truth) * (e - truth);
  }
  s.variance /= n;
  s.mse /= n;
  s.bias = s.mean - truth;
  return s;
}

}  // namespace efda
