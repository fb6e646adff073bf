#include "efda/table.hpp"
#include "efda/error.hpp"
#include "efda/numfmt.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace efda {

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

std::string field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class RowWriter {
public:
  explicit RowWriter(std::string& out) : out_(out) {}
  RowWriter& str(std::string_view s) { return put(field(s)); }
  RowWriter& num(double v) { return put(format_double(v)); }
  RowWriter& count(std::size_t v) { return put(std::to_string(v)); }
  void end() { out_ += '\n'; }

private:
  RowWriter& put(const std::string& s) {
    if (!first_) out_ += ',';
    first_ = false;
    out_ += s;
    return *this;
  }
  std::string& out_;
  bool first_ = true;
};

class RowReader {
public:
  RowReader(const std::vector<std::string>& cells, std::size_t line)
      : cells_(cells), line_(line) {}
  const std::string& str() { return next(); }
  double num() {
    const auto& s = next();
    auto v = parse_double(s);
    if (!v) bad("expected a number, got '" + s + "'");
    return *v;
  }
  std::size_t count() {
    const auto& s = next();
    auto v = parse_int(s);
    if (!v || *v < 0) bad("expected a count, got '" + s + "'");
    return static_cast<std::size_t>(*v);
  }

private:
  const std::string& next() {
    if (i_ >= cells_.size()) bad("too few columns");
    return cells_[i_++];
  }
  [[noreturn]] void bad(const std::string& what) const {
    fail(ErrorCode::Parse, "csv line " + std::to_string(line_) + ": " + what);
  }
  const std::vector<std::string>& cells_;
  std::size_t line_;
  std::size_t i_ = 0;
};

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) fail(ErrorCode::Parse, "csv line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(std::move(cur));
  return cells;
}

}  // namespace

bool ClassificationRow::operator==(const ClassificationRow& o) const {
  return experiment == o.experiment && family == o.family && classes == o.classes &&
         n_train == o.n_train && n_test == o.n_test && same(alpha, o.alpha) &&
         method == o.method && trials == o.trials && failed == o.failed &&
         same(acc_mean, o.acc_mean) && same(acc_sd, o.acc_sd) && same(ece_mean, o.ece_mean) &&
         same(ece_sd, o.ece_sd);
}

bool EfficiencyRow::operator==(const EfficiencyRow& o) const {
  return experiment == o.experiment && n == o.n && n0 == o.n0 && n1 == o.n1 &&
         method == o.method && trials == o.trials && failed == o.failed &&
         same(variance, o.variance) && same(mse, o.mse) && same(bias_sq, o.bias_sq) &&
         same(cr_bound, o.cr_bound);
}

bool TrialRow::operator==(const TrialRow& o) const {
  return experiment == o.experiment && n == o.n && same(alpha, o.alpha) && trial == o.trial &&
         method == o.method && failed == o.failed && same(value_a, o.value_a) &&
         same(value_b, o.value_b);
}

void BenchmarkTable::append(const BenchmarkTable& other) {
  if (kind != other.kind) fail(ErrorCode::InvalidArgument, "cannot merge tables of different kinds");
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  efficiency.insert(efficiency.end(), other.efficiency.begin(), other.efficiency.end());
  trials.insert(trials.end(), other.trials.begin(), other.trials.end());
}

std::string table_csv(const BenchmarkTable& t) {
  std::string out;
  if (t.kind == TableKind::Classification) {
    out += kClassificationHeader;
    out += '\n';
    for (const auto& r : t.rows) {
      RowWriter w(out);
      w.str(r.experiment).str(r.family).count(static_cast<std::size_t>(r.classes))
          .count(r.n_train).count(r.n_test).num(r.alpha).str(r.method).count(r.trials)
          .count(r.failed).num(r.acc_mean).num(r.acc_sd).num(r.ece_mean).num(r.ece_sd);
      w.end();
    }
  } else {
    out += kEfficiencyHeader;
    out += '\n';
    for (const auto& r : t.efficiency) {
      RowWriter w(out);
      w.str(r.experiment).count(r.n).count(r.n0).count(r.n1).str(r.method).count(r.trials)
          .count(r.failed).num(r.variance).num(r.mse).num(r.bias_sq).num(r.cr_bound);
      w.end();
    }
  }
  return out;
}

std::string trials_csv(const BenchmarkTable& t) {
  std::string out(t.kind == TableKind::Classification ? kClassificationTrialHeader
                                                      : kEfficiencyTrialHeader);
  out += '\n';
  for (const auto& r : t.trials) {
    RowWriter w(out);
    w.str(r.experiment).count(r.n).num(r.alpha).count(r.trial).str(r.method)
        .count(r.failed ? 1 : 0).num(r.value_a).num(r.value_b);
    w.end();
  }
  return out;
}

CsvData parse_csv(std::string_view text) {
  CsvData data;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) {
      if (nl == text.size()) break;
      continue;
    }
    auto cells = split_csv_line(line, line_no);
    if (data.header.empty()) {
      data.header = std::move(cells);
    } else {
      if (cells.size() != data.header.size())
        fail(ErrorCode::Parse, "csv line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(data.header.size()) + " columns, got " +
                                   std::to_string(cells.size()));
      data.rows.push_back(std::move(cells));
    }
    if (nl == text.size()) break;
  }
  if (data.header.empty()) fail(ErrorCode::Parse, "csv has no header row");
  return data;
}

int CsvData::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

BenchmarkTable parse_table_csv(std::string_view text) {
  const CsvData csv = parse_csv(text);
  std::string header;
  for (std::size_t i = 0; i < csv.header.size(); ++i) header += (i ? "," : "") + csv.header[i];
  BenchmarkTable t;
  if (header == kClassificationHeader) {
    t.kind = TableKind::Classification;
    std::size_t line = 1;
    for (const auto& cells : csv.rows) {
      RowReader r(cells, ++line);
      ClassificationRow row;
      row.experiment = r.str();
      row.family = r.str();
      row.classes = static_cast<int>(r.count());
      row.n_train = r.count();
      row.n_test = r.count();
      row.alpha = r.num();
      row.method = r.str();
      row.trials = r.count();
      row.failed = r.count();
      row.acc_mean = r.num();
      row.acc_sd = r.num();
      row.ece_mean = r.num();
      row.ece_sd = r.num();
      t.rows.push_back(std::move(row));
    }
  } else if (header == kEfficiencyHeader) {
    t.kind = TableKind::Efficiency;
    std::size_t line = 1;
    for (const auto& cells : csv.rows) {
      RowReader r(cells, ++line);
      EfficiencyRow row;
      row.experiment = r.str();
      row.n = r.count();
      row.n0 = r.count();
      row.n1 = r.count();
      row.method = r.str();
      row.trials = r.count();
      row.failed = r.count();
      row.variance = r.num();
      row.mse = r.num();
      row.bias_sq = r.num();
      row.cr_bound = r.num();
      t.efficiency.push_back(std::move(row));
    }
  } else {
    fail(ErrorCode::Parse, "unrecognised table header '" + header + "'");
  }
  return t;
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!f) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace efda
