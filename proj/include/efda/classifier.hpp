#pragma once

#include "efda/expfam.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace efda {

// Labeled samples stored column-compactly: row i is features[i*dims, (i+1)*dims).
struct Dataset {
  std::size_t dims = 1;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dims, dims);
  }
  void push_back(std::span<const double> x, int label);
};

// Per-class fitted parameter. `degenerate` marks a class whose statistic sat on
// the moment boundary and was shrunk (pseudo-count 0.5 or a 1e-12 relative
// variance floor) before inversion.
struct ClassParam {
  NaturalParam eta;
  bool degenerate = false;
};

ClassParam fit_class_param(const FamilySpec& spec, std::span<const double> xs);

class BinaryModel {
public:
  BinaryModel(FamilySpec spec, double alpha, NaturalParam eta0, NaturalParam eta1,
              std::array<bool, 2> degenerate = {false, false});

  const FamilySpec& spec() const noexcept { return spec_; }
  double alpha() const noexcept { return alpha_; }
  const NaturalParam& eta0() const noexcept { return eta0_; }
  const NaturalParam& eta1() const noexcept { return eta1_; }
  bool degenerate(int cls) const { return degenerate_.at(static_cast<std::size_t>(cls)); }
  bool symmetric() const noexcept { return eta0_ == eta1_; }

  // log(alpha / (1 - alpha)) + A(eta0) - A(eta1)
  double intercept() const noexcept { return intercept_; }
  // eta1 - eta0, the coefficient on T(x).
  const NaturalParam& slope() const noexcept { return slope_; }

  double log_odds(double x) const;
  double posterior(double x) const;

private:
  FamilySpec spec_;
  double alpha_;
  NaturalParam eta0_, eta1_;
  std::array<bool, 2> degenerate_;
  double intercept_;
  NaturalParam slope_;
};

// alpha = N1 / n and per-class closed-form MLE. Labels must be 0 or 1.
BinaryModel fit_binary(const FamilySpec& spec, std::span<const double> x, std::span<const int> y);

class MulticlassModel {
public:
  MulticlassModel(FamilySpec spec, std::vector<double> priors, std::vector<NaturalParam> etas,
                  std::vector<bool> degenerate = {});

  const FamilySpec& spec() const noexcept { return spec_; }
  int classes() const noexcept { return static_cast<int>(priors_.size()); }
  const std::vector<double>& priors() const noexcept { return priors_; }
  const std::vector<NaturalParam>& etas() const noexcept { return etas_; }
  const std::vector<bool>& degenerate() const noexcept { return degenerate_; }

  // log prior_k + eta_k . T(x) - A(eta_k)
  std::vector<double> score(double x) const;
  int predict(double x) const;
  std::vector<double> posteriors(double x) const;

private:
  FamilySpec spec_;
  std::vector<double> priors_;
  std::vector<NaturalParam> etas_;
  std::vector<bool> degenerate_;
  std::vector<double> log_priors_;
  std::vector<double> partitions_;
};

MulticlassModel fit_multiclass(const FamilySpec& spec, std::span<const double> x,
                               std::span<const int> y, int classes);

// Conditionally independent features, each with its own family.
class ProductModel {
public:
  ProductModel(std::vector<FamilySpec> specs, std::vector<double> priors,
               std::vector<std::vector<NaturalParam>> etas,
               std::vector<std::vector<bool>> degenerate = {});

  int classes() const noexcept { return static_cast<int>(priors_.size()); }
  std::size_t dims() const noexcept { return specs_.size(); }
  const std::vector<FamilySpec>& specs() const noexcept { return specs_; }
  const std::vector<double>& priors() const noexcept { return priors_; }
  // etas()[k][j]: class k, feature j.
  const std::vector<std::vector<NaturalParam>>& etas() const noexcept { return etas_; }
  const std::vector<std::vector<bool>>& degenerate() const noexcept { return degenerate_; }

  std::vector<double> score(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  std::vector<double> posteriors(std::span<const double> x) const;

private:
  std::vector<FamilySpec> specs_;
  std::vector<double> priors_;
  std::vector<std::vector<NaturalParam>> etas_;
  std::vector<std::vector<bool>> degenerate_;
  std::vector<double> log_priors_;
  std::vector<double> partitions_;  // per class, summed over features
};

ProductModel fit_product(std::span<const FamilySpec> specs, const Dataset& data, int classes);

}  // namespace efda
