#include "efda/classifier.hpp"
#include "efda/error.hpp"
#include "efda/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace efda {

namespace {

constexpr double kPseudoCount = 0.5;
constexpr double kVarianceFloor = 1e-12;

std::vector<std::size_t> class_counts(std::span<const int> y, int classes) {
  if (classes < 2) fail(ErrorCode::InvalidArgument, "need at least two classes");
  std::vector<std::size_t> counts(static_cast<std::size_t>(classes), 0);
  for (int label : y) {
    if (label < 0 || label >= classes)
      fail(ErrorCode::InvalidArgument, "label " + std::to_string(label) + " outside 0.." +
                                           std::to_string(classes - 1));
    ++counts[static_cast<std::size_t>(label)];
  }
  for (int k = 0; k < classes; ++k)
    if (counts[static_cast<std::size_t>(k)] == 0)
      fail(ErrorCode::EmptyClass, "class " + std::to_string(k) + " has no training samples");
  return counts;
}

std::vector<std::vector<double>> split_by_class(std::span<const double> x, std::span<const int> y,
                                                int classes) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(y[i])].push_back(x[i]);
  return out;
}

void check_priors(const std::vector<double>& priors) {
  if (priors.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two classes");
  double s = 0.0;
  for (double p : priors) {
    if (!(p > 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "class prior outside (0, 1]");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "class priors do not sum to 1");
}

}  // namespace

void Dataset::push_back(std::span<const double> x, int label) {
  if (x.size() != dims) fail(ErrorCode::InvalidArgument, "feature vector has wrong length");
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
}

ClassParam fit_class_param(const FamilySpec& spec, std::span<const double> xs) {
  SuffStatMean mean = SuffStatMean::from_data(spec, xs);
  try {
    return {mle_from_mean(spec, mean), false};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateData) throw;
  }
  const double n = static_cast<double>(mean.count);
  double& m = mean.value[0];
  switch (spec.kind()) {
    case FamilyKind::Bernoulli: m = (m * n + kPseudoCount) / (n + 1.0); break;
    case FamilyKind::Poisson:
    case FamilyKind::NegBinomialKnownR: m = (m * n + kPseudoCount) / n; break;
    case FamilyKind::NormalFull:
      mean.value[1] = m * m + kVarianceFloor * std::max(1.0, m * m);
      break;
    case FamilyKind::LaplaceKnownLoc:
      m = kVarianceFloor * std::max(1.0, std::abs(spec.aux()));
      break;
    default: m = kVarianceFloor; break;
  }
  return {mle_from_mean(spec, mean), true};
}

BinaryModel::BinaryModel(FamilySpec spec, double alpha, NaturalParam eta0, NaturalParam eta1,
                         std::array<bool, 2> degenerate)
    : spec_(spec), alpha_(alpha), eta0_(eta0), eta1_(eta1), degenerate_(degenerate) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha outside (0, 1)");
  intercept_ = std::log(alpha) - std::log1p(-alpha) + log_partition(spec_, eta0_) -
               log_partition(spec_, eta1_);
  slope_ = eta0_.dim() == 2 ? NaturalParam(eta1_[0] - eta0_[0], eta1_[1] - eta0_[1])
                            : NaturalParam(eta1_[0] - eta0_[0]);
}

double BinaryModel::log_odds(double x) const {
  return intercept_ + dot(slope_, suff_stat(spec_, x));
}

double BinaryModel::posterior(double x) const { return logistic(log_odds(x)); }

BinaryModel fit_binary(const FamilySpec& spec, std::span<const double> x, std::span<const int> y) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidArgument, "feature/label length mismatch");
  const auto counts = class_counts(y, 2);
  const auto parts = split_by_class(x, y, 2);
  const ClassParam c0 = fit_class_param(spec, parts[0]);
  const ClassParam c1 = fit_class_param(spec, parts[1]);
  const double alpha = static_cast<double>(counts[1]) / static_cast<double>(y.size());
  return BinaryModel(spec, alpha, c0.eta, c1.eta, {c0.degenerate, c1.degenerate});
}

MulticlassModel::MulticlassModel(FamilySpec spec, std::vector<double> priors,
                                 std::vector<NaturalParam> etas, std::vector<bool> degenerate)
    : spec_(spec), priors_(std::move(priors)), etas_(std::move(etas)),
      degenerate_(std::move(degenerate)) {
  check_priors(priors_);
  if (etas_.size() != priors_.size())
    fail(ErrorCode::InvalidArgument, "one natural parameter per class required");
  if (degenerate_.empty()) degenerate_.assign(priors_.size(), false);
  for (std::size_t k = 0; k < priors_.size(); ++k) {
    log_priors_.push_back(std::log(priors_[k]));
    partitions_.push_back(log_partition(spec_, etas_[k]));
  }
}

std::vector<double> MulticlassModel::score(double x) const {
  const SuffStat t = suff_stat(spec_, x);
  std::vector<double> s(priors_.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    s[k] = log_priors_[k] + dot(etas_[k], t) - partitions_[k];
  return s;
}

int MulticlassModel::predict(double x) const { return argmax(score(x)); }

std::vector<double> MulticlassModel::posteriors(double x) const {
  auto s = score(x);
  softmax(s);
  return s;
}

MulticlassModel fit_multiclass(const FamilySpec& spec, std::span<const double> x,
                               std::span<const int> y, int classes) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidArgument, "feature/label length mismatch");
  const auto counts = class_counts(y, classes);
  const auto parts = split_by_class(x, y, classes);
  std::vector<double> priors;
  std::vector<NaturalParam> etas;
  std::vector<bool> degenerate;
  for (int k = 0; k < classes; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    priors.push_back(static_cast<double>(counts[uk]) / static_cast<double>(y.size()));
    const ClassParam c = fit_class_param(spec, parts[uk]);
    etas.push_back(c.eta);
    degenerate.push_back(c.degenerate);
  }
  return MulticlassModel(spec, std::move(priors), std::move(etas), std::move(degenerate));
}

ProductModel::ProductModel(std::vector<FamilySpec> specs, std::vector<double> priors,
                           std::vector<std::vector<NaturalParam>> etas,
                           std::vector<std::vector<bool>> degenerate)
    : specs_(std::move(specs)), priors_(std::move(priors)), etas_(std::move(etas)),
      degenerate_(std::move(degenerate)) {
  check_priors(priors_);
  if (specs_.empty()) fail(ErrorCode::InvalidArgument, "product model needs >= 1 feature");
  if (etas_.size() != priors_.size())
    fail(ErrorCode::InvalidArgument, "one parameter row per class required");
  if (degenerate_.empty())
    degenerate_.assign(priors_.size(), std::vector<bool>(specs_.size(), false));
  for (std::size_t k = 0; k < priors_.size(); ++k) {
    if (etas_[k].size() != specs_.size())
      fail(ErrorCode::InvalidArgument, "one natural parameter per feature required");
    log_priors_.push_back(std::log(priors_[k]));
    double a = 0.0;
    for (std::size_t j = 0; j < specs_.size(); ++j) a += log_partition(specs_[j], etas_[k][j]);
    partitions_.push_back(a);
  }
}

std::vector<double> ProductModel::score(std::span<const double> x) const {
  if (x.size() != specs_.size()) fail(ErrorCode::InvalidArgument, "feature vector has wrong length");
  std::vector<SuffStat> t;
  t.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) t.push_back(suff_stat(specs_[j], x[j]));
  std::vector<double> s(priors_.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    double lin = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) lin += dot(etas_[k][j], t[j]);
    s[k] = log_priors_[k] + lin - partitions_[k];
  }
  return s;
}

int ProductModel::predict(std::span<const double> x) const { return argmax(score(x)); }

std::vector<double> ProductModel::posteriors(std::span<const double> x) const {
  auto s = score(x);
  softmax(s);
  return s;
}

ProductModel fit_product(std::span<const FamilySpec> specs, const Dataset& data, int classes) {
  if (specs.size() != data.dims)
    fail(ErrorCode::InvalidArgument, "one family per feature column required");
  const auto counts = class_counts(data.labels, classes);
  const std::size_t d = data.dims;
  std::vector<double> priors;
  std::vector<std::vector<NaturalParam>> etas(static_cast<std::size_t>(classes));
  std::vector<std::vector<bool>> degenerate(static_cast<std::size_t>(classes));
  std::vector<double> column;
  for (int k = 0; k < classes; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    priors.push_back(static_cast<double>(counts[uk]) / static_cast<double>(data.size()));
    for (std::size_t j = 0; j < d; ++j) {
      column.clear();
      for (std::size_t i = 0; i < data.size(); ++i)
        if (data.labels[i] == k) column.push_back(data.features[i * d + j]);
      const ClassParam c = fit_class_param(specs[j], column);
      etas[uk].push_back(c.eta);
      degenerate[uk].push_back(c.degenerate);
    }
  }
  return ProductModel(std::vector<FamilySpec>(specs.begin(), specs.end()), std::move(priors),
                      std::move(etas), std::move(degenerate));
}

}  // namespace efda
