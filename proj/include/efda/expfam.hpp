#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace efda {

class Rng;

enum class FamilyKind {
  NormalKnownVar,
  NormalFull,
  LaplaceKnownLoc,
  Exponential,
  GammaKnownShape,
  WeibullKnownShape,
  Poisson,
  Bernoulli,
  NegBinomialKnownR,
};

// One of the nine supported exponential families together with its fixed
// auxiliary parameter: sigma (NormalKnownVar), location (Laplace), shape a
// (Gamma), shape k (Weibull) or r (NegBinomial). Immutable.
class FamilySpec {
public:
  static FamilySpec normal_known_var(double sigma);
  static FamilySpec normal_full();
  static FamilySpec laplace(double location);
  static FamilySpec exponential();
  static FamilySpec gamma(double shape);
  static FamilySpec weibull(double shape);
  static FamilySpec poisson();
  static FamilySpec bernoulli();
  static FamilySpec negative_binomial(double r);

  // Accepts the textual form produced by name(): "weibull:3", "poisson",
  // "normal_full", "laplace:0.5", ...
  static FamilySpec parse(std::string_view text);

  FamilyKind kind() const noexcept { return kind_; }
  double aux() const noexcept { return aux_; }
  int dim() const noexcept { return kind_ == FamilyKind::NormalFull ? 2 : 1; }
  bool discrete() const noexcept;
  bool has_aux() const noexcept;
  std::string name() const;

  bool operator==(const FamilySpec&) const = default;

private:
  FamilySpec(FamilyKind kind, double aux);

  FamilyKind kind_;
  double aux_;
};

// Length-1 or length-2 real vector. The tag keeps natural parameters and
// sufficient statistics from being mixed up.
template <class Tag>
class SmallVec {
public:
  SmallVec() = default;
  explicit SmallVec(double a) : v_{a, 0.0}, dim_(1) {}
  SmallVec(double a, double b) : v_{a, b}, dim_(2) {}

  int dim() const noexcept { return dim_; }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
  const double* begin() const noexcept { return v_.data(); }
  const double* end() const noexcept { return v_.data() + dim_; }

  bool operator==(const SmallVec&) const = default;

private:
  std::array<double, 2> v_{0.0, 0.0};
  int dim_ = 1;
};

using NaturalParam = SmallVec<struct NaturalParamTag>;
using SuffStat = SmallVec<struct SuffStatTag>;

double dot(const NaturalParam& eta, const SuffStat& t);

// Class-conditional average of T(x) over `count` observations.
struct SuffStatMean {
  SuffStat value;
  std::size_t count = 0;

  static SuffStatMean from_data(const FamilySpec& spec, std::span<const double> xs);
};

bool in_natural_space(const FamilySpec& spec, const NaturalParam& eta) noexcept;
bool in_support(const FamilySpec& spec, double x) noexcept;

double log_partition(const FamilySpec& spec, const NaturalParam& eta);
// Gradient of the log-partition, i.e. E[T(X)].
SuffStat mean_suffstat(const FamilySpec& spec, const NaturalParam& eta);
// A''(eta) = Var[T(X)] = per-observation Fisher information. Scalar families only.
double var_suffstat(const FamilySpec& spec, const NaturalParam& eta);

SuffStat suff_stat(const FamilySpec& spec, double x);
double log_base_measure(const FamilySpec& spec, double x);
double log_density(const FamilySpec& spec, const NaturalParam& eta, double x);

// Inverts the moment map: the unique eta with mean_suffstat(eta) == mean.
// Throws DegenerateData when the mean sits on the boundary of the moment space.
NaturalParam mle_from_mean(const FamilySpec& spec, const SuffStatMean& mean);

// Maps the customary parameterisation to eta:
//   normal  -> mean mu              normal_full -> (mu, variance)
//   laplace -> scale b              exponential, gamma -> scale theta
//   weibull -> scale lambda         poisson -> rate lambda
//   bernoulli -> p                  negbin -> p with mean r p / (1 - p)
NaturalParam natural_from_conventional(const FamilySpec& spec, std::span<const double> params);

double sample_one(const FamilySpec& spec, const NaturalParam& eta, Rng& rng);
std::vector<double> sample(const FamilySpec& spec, const NaturalParam& eta, Rng& rng,
                           std::size_t n);

struct WeibullShapeFit {
  double shape = 0.0;
  int iterations = 0;
};

// Profile-likelihood shape estimate for a two-parameter Weibull sample.
WeibullShapeFit fit_weibull_shape(std::span<const double> data);
// Joint shape estimate when every class shares one shape but has its own
// scale: the profile likelihood maximised over one scale per label.
WeibullShapeFit fit_weibull_shape(std::span<const double> data, std::span<const int> labels);

}  // namespace efda
