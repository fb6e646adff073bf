#include "efda/error.hpp"
#include "efda/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace efda {

namespace {

constexpr double kScoreTol = 1e-10;
constexpr int kMaxIter = 100;

struct Score {
  double value;
  double slope;
};

// Log data of one group, shifted so its maximum is 0. The profile score is
// invariant to per-group rescaling, and the shift keeps exp(k * log y) <= 1.
struct Group {
  std::vector<double> log_y;
  double weight = 0.0;  // group size / total size
};

// Shared-shape profile score
//   sum_g w_g [sum(y^k log y) / sum(y^k)]_g - 1/k - mean(log y)
// and its derivative in k. One group gives the ordinary two-parameter fit.
Score shape_score(const std::vector<Group>& groups, double mean_log_y, double k) {
  double value = -1.0 / k - mean_log_y;
  double slope = 1.0 / (k * k);
  for (const auto& g : groups) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double ly : g.log_y) {
      const double w = std::exp(k * ly);
      s0 += w;
      s1 += w * ly;
      s2 += w * ly * ly;
    }
    const double r = s1 / s0;
    value += g.weight * r;
    slope += g.weight * (s2 / s0 - r * r);
  }
  return {value, slope};
}

WeibullShapeFit solve(const std::vector<Group>& groups, std::size_t n) {
  double mean = 0.0, ss = 0.0;
  for (const auto& g : groups) {
    double gm = 0.0;
    for (double ly : g.log_y) gm += ly;
    gm /= static_cast<double>(g.log_y.size());
    for (double ly : g.log_y) ss += (ly - gm) * (ly - gm);
    mean += g.weight * gm;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n));
  if (!(sd > 0.0)) fail(ErrorCode::DegenerateData, "weibull shape fit: no spread in the data");

  // Var(log X) = pi^2 / (6 k^2) for a Weibull variable.
  double k = std::numbers::pi / (std::sqrt(6.0) * sd);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= kMaxIter; ++it) {
    const Score s = shape_score(groups, mean, k);
    if (!std::isfinite(s.value)) break;
    if (std::abs(s.value) <= kScoreTol) return {k, it};
    // The score is increasing in k, so its sign tells which side the root is on.
    if (s.value < 0.0) lo = k;
    else hi = k;

    double next = k - s.value / s.slope;
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * k;
    }
    if (next == k) return {k, it};
    k = next;
  }
  fail(ErrorCode::NoConvergence, "weibull shape fit did not converge in 100 iterations");
}

Group make_group(std::vector<double> xs, std::size_t total) {
  double max_x = 0.0;
  for (double x : xs) {
    if (!(x > 0.0) || !std::isfinite(x))
      fail(ErrorCode::Support, "weibull shape fit needs positive finite data");
    max_x = std::max(max_x, x);
  }
  const double weight = static_cast<double>(xs.size()) / static_cast<double>(total);
  for (double& x : xs) x = std::log(x / max_x);
  return {std::move(xs), weight};
}

}  // namespace

WeibullShapeFit fit_weibull_shape(std::span<const double> data) {
  if (data.size() < 2) fail(ErrorCode::InvalidArgument, "weibull shape fit needs >= 2 values");
  std::vector<Group> groups;
  groups.push_back(make_group({data.begin(), data.end()}, data.size()));
  return solve(groups, data.size());
}

WeibullShapeFit fit_weibull_shape(std::span<const double> data, std::span<const int> labels) {
  if (data.size() != labels.size())
    fail(ErrorCode::InvalidArgument, "weibull shape fit: data and labels differ in length");
  if (data.size() < 2) fail(ErrorCode::InvalidArgument, "weibull shape fit needs >= 2 values");
  int classes = 0;
  for (int y : labels) {
    if (y < 0) fail(ErrorCode::InvalidArgument, "negative class label");
    classes = std::max(classes, y + 1);
  }
  std::vector<std::vector<double>> split(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < data.size(); ++i)
    split[static_cast<std::size_t>(labels[i])].push_back(data[i]);
  std::vector<Group> groups;
  for (auto& xs : split)
    if (!xs.empty()) groups.push_back(make_group(std::move(xs), data.size()));
  return solve(groups, data.size());
}

}  // namespace efda
