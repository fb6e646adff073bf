#pragma once

#include "efda/classifier.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace efda {

// Numeric rows read from delimited text. Cells are separated by commas,
// semicolons, tabs or blanks; `#` starts a comment; a first row that does not
// parse as numbers is taken as a header.
struct FeatureTable {
  std::size_t dims = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> header;
  std::vector<int> lines;  // source line of each row

  std::size_t rows() const noexcept { return dims ? values.size() / dims : 0; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * dims, dims);
  }
};

FeatureTable parse_feature_table(std::string_view text, const std::string& source = "<data>");

// Features followed by an integer class label in the last column.
Dataset parse_labeled_data(std::string_view text, const std::string& source = "<data>");

}  // namespace efda
