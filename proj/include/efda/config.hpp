#pragma once

#include "efda/expfam.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace efda {

// efda_khat estimates one Weibull shape shared by all classes (per-class
// scales); efda_khat_pooled fits a single Weibull to the unlabeled training
// features and takes its shape.
enum class Method { Efda, EfdaEstimatedShape, EfdaPooledShape, Lda, Qda, Lr };

std::string_view method_name(Method m) noexcept;
Method parse_method(std::string_view name);

// Confidence used for two-class ECE. ClassOne bins P(Y=1|x) against the
// frequency of Y = 1; TopLabel bins max(p, 1 - p) against correctness.
// Runs with more than two classes always use the top label.
enum class BinaryConfidence { ClassOne, TopLabel };

std::string_view confidence_name(BinaryConfidence c) noexcept;
BinaryConfidence parse_confidence(std::string_view name);

// One experiment: a true data-generating model plus the protocol to run on it.
struct ExperimentConfig {
  std::string name = "experiment";
  FamilySpec family = FamilySpec::weibull(3.0);
  std::vector<NaturalParam> class_etas;  // true per-class natural parameters
  std::vector<double> priors;            // P(Y = k); two-class runs use {1 - alpha, alpha}
  std::size_t n_train = 1000;
  std::size_t n_test = 2000;
  std::size_t trials = 100;
  std::uint64_t seed = 42;
  std::vector<Method> methods{Method::Efda, Method::Lda, Method::Qda, Method::Lr};
  int ece_bins = 10;
  BinaryConfidence confidence = BinaryConfidence::ClassOne;
  std::vector<std::size_t> n_values;  // sample-size sweep, efficiency, ablation
  std::vector<double> alpha_values;   // imbalance sweep
  std::size_t grid_points = 100;      // efficiency: evaluation points, half per class

  int classes() const noexcept { return static_cast<int>(class_etas.size()); }
  // P(Y = 1) of a two-class experiment.
  double alpha() const { return priors.at(1); }
  bool has_method(Method m) const noexcept;

  // Throws InvalidArgument describing the first violated invariant.
  void validate() const;
};

struct ConfigFile {
  std::string name;  // output table name; defaults to the file stem
  std::vector<ExperimentConfig> experiments;
};

// INI-style text: `key = value` lines, `# comment`, `[section]` per experiment.
// Keys before the first section are defaults for every section. Errors carry
// the source name and line number.
ConfigFile parse_config(std::string_view text, const std::string& source = "<config>");
ConfigFile load_config(const std::string& path);

}  // namespace efda
