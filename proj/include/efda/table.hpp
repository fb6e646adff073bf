#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace efda {

// One aggregated (method, design point) cell of a classification benchmark,
// sample-size sweep, imbalance sweep or shape ablation. alpha is P(Y=1) for
// two-class runs and NaN otherwise.
struct ClassificationRow {
  std::string experiment;
  std::string family;
  int classes = 2;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double alpha = 0.0;
  std::string method;
  std::size_t trials = 0;
  std::size_t failed = 0;
  double acc_mean = 0.0, acc_sd = 0.0;
  double ece_mean = 0.0, ece_sd = 0.0;

  bool operator==(const ClassificationRow&) const;
};

// Grid-averaged variance / MSE of the fitted log-odds for one method at one n.
// cr_bound is the grid-averaged Cramer-Rao variance for the same design.
struct EfficiencyRow {
  std::string experiment;
  std::size_t n = 0, n0 = 0, n1 = 0;
  std::string method;
  std::size_t trials = 0;
  std::size_t failed = 0;
  double variance = 0.0;
  double mse = 0.0;
  double bias_sq = 0.0;
  double cr_bound = 0.0;

  bool operator==(const EfficiencyRow&) const;
};

// Per-trial rows. For classification value_a / value_b are accuracy / ECE;
// for efficiency they are the grid-mean squared and signed log-odds errors.
struct TrialRow {
  std::string experiment;
  std::size_t n = 0;
  double alpha = 0.0;
  std::size_t trial = 0;
  std::string method;
  bool failed = false;
  double value_a = 0.0;
  double value_b = 0.0;

  bool operator==(const TrialRow&) const;
};

enum class TableKind { Classification, Efficiency };

struct BenchmarkTable {
  std::string name;
  TableKind kind = TableKind::Classification;
  std::vector<ClassificationRow> rows;
  std::vector<EfficiencyRow> efficiency;
  std::vector<TrialRow> trials;  // filled only when per-trial output is requested

  void append(const BenchmarkTable& other);
};

inline constexpr std::string_view kClassificationHeader =
    "experiment,family,classes,n_train,n_test,alpha,method,trials,failed,"
    "acc_mean,acc_sd,ece_mean,ece_sd";
inline constexpr std::string_view kEfficiencyHeader =
    "experiment,n,n0,n1,method,trials,failed,variance,mse,bias_sq,cr_bound";
inline constexpr std::string_view kClassificationTrialHeader =
    "experiment,n_train,alpha,trial,method,failed,accuracy,ece";
inline constexpr std::string_view kEfficiencyTrialHeader =
    "experiment,n,alpha,trial,method,failed,mean_sq_error,mean_error";

std::string table_csv(const BenchmarkTable& table);
std::string trials_csv(const BenchmarkTable& table);
// Inverse of table_csv; the kind is taken from the header row.
BenchmarkTable parse_table_csv(std::string_view text);

// Minimal CSV reader for plotting: header names plus string cells.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  // -1 when absent
};
CsvData parse_csv(std::string_view text);

void write_text_file(const std::string& path, std::string_view contents);
std::string read_text_file(const std::string& path);

}  // namespace efda
