#pragma once

#include "efda/baselines.hpp"
#include "efda/classifier.hpp"
#include "efda/config.hpp"

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace efda {

using AnyModel =
    std::variant<BinaryModel, MulticlassModel, ProductModel, GaussianClassModel, LogisticModel>;

// Short type tag used in the text format: binary, multiclass, product, lda,
// qda or logistic.
std::string model_type(const AnyModel& model);
int model_classes(const AnyModel& model);
std::size_t model_dims(const AnyModel& model);
std::vector<double> model_posteriors(const AnyModel& model, std::span<const double> x);

// Fits `method` on `data` with labels 0..K-1, K = max label + 1. EFDA with
// several features fits a product model; `specs` holds one family per feature
// or a single family applied to every feature. Baselines need one feature.
AnyModel fit_model(Method method, std::span<const FamilySpec> specs, const Dataset& data);

// Line-oriented `key = value` text, first line "efda-model 1". Doubles are
// written in shortest round-trip form, so parse(serialize(m)) reproduces m.
std::string serialize_model(const AnyModel& model);
AnyModel parse_model(std::string_view text, const std::string& source = "<model>");

}  // namespace efda
