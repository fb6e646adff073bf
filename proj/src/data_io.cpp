#include "efda/data_io.hpp"
#include "efda/error.hpp"
#include "efda/numfmt.hpp"

#include <cmath>

namespace efda {

namespace {

bool is_delim(char c) { return c == ',' || c == ';' || c == '\t' || c == ' ' || c == '\r'; }

// Commas and semicolons separate cells one-for-one (an empty cell is an
// error later); runs of blanks count as one separator.
std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  std::size_t start = i;
  while (i <= line.size()) {
    if (i == line.size() || is_delim(line[i])) {
      std::size_t end = i;
      // Swallow blanks around a hard delimiter.
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i < line.size() && (line[i] == ',' || line[i] == ';')) {
        ++i;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      }
      cells.push_back(line.substr(start, end - start));
      if (i >= line.size()) break;
      start = i;
      continue;
    }
    ++i;
  }
  return cells;
}

}  // namespace

FeatureTable parse_feature_table(std::string_view text, const std::string& source) {
  FeatureTable table;
  std::size_t pos = 0;
  int line_no = 0;
  bool first = true;
  auto error = [&](const std::string& what) {
    fail(ErrorCode::Parse, source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    if (trim(line).empty()) continue;
    const auto cells = split_cells(trim(line));
    std::vector<double> row;
    bool numeric = true;
    for (auto c : cells) {
      auto v = parse_double(c);
      if (!v || !std::isfinite(*v)) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (!first) error("expected numbers, got '" + std::string(trim(line)) + "'");
      for (auto c : cells) table.header.emplace_back(c);
      table.dims = cells.size();
      first = false;
      continue;
    }
    if (table.dims == 0) table.dims = row.size();
    if (row.size() != table.dims)
      error("expected " + std::to_string(table.dims) + " columns, got " +
            std::to_string(row.size()));
    table.values.insert(table.values.end(), row.begin(), row.end());
    table.lines.push_back(line_no);
    first = false;
  }
  if (table.rows() == 0) fail(ErrorCode::Parse, source + ": no data rows");
  return table;
}

Dataset parse_labeled_data(std::string_view text, const std::string& source) {
  const FeatureTable t = parse_feature_table(text, source);
  if (t.dims < 2) fail(ErrorCode::Parse, source + ": need at least one feature and a label column");
  Dataset d;
  d.dims = t.dims - 1;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const auto r = t.row(i);
    const double label = r[t.dims - 1];
    if (!(label >= 0.0 && label == std::floor(label) && label < 1e6))
      fail(ErrorCode::Parse, source + ":" + std::to_string(t.lines[i]) +
                                 ": label must be a non-negative integer");
    d.push_back(r.first(d.dims), static_cast<int>(label));
  }
  return d;
}

}  // namespace efda
