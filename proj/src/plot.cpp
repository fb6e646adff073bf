#include "efda/plot.hpp"
#include "efda/error.hpp"
#include "efda/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace efda {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;  // legend column
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-3)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0e", v);
    return buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Round step of the form {1, 2, 5} x 10^k giving about `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f <= 1.0 ? 1.0 : f <= 2.0 ? 2.0 : f <= 5.0 ? 5.0 : 10.0) * mag;
}

class Axis {
public:
  Axis(double lo, double hi, bool log, double px0, double px1, bool include_zero)
      : log_(log), px0_(px0), px1_(px1) {
    if (log_) {
      lo_ = std::floor(std::log10(lo));
      hi_ = std::ceil(std::log10(hi));
      if (hi_ <= lo_) hi_ = lo_ + 1.0;
    } else {
      if (include_zero) lo = std::min(lo, 0.0);
      if (hi <= lo) hi = lo + 1.0;
      const double step = nice_step(hi - lo, 5);
      lo_ = std::floor(lo / step) * step;
      hi_ = std::ceil(hi / step) * step;
      step_ = step;
    }
  }

  double map(double v) const {
    const double t = ((log_ ? std::log10(v) : v) - lo_) / (hi_ - lo_);
    return px0_ + t * (px1_ - px0_);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log_) {
      for (double e = lo_; e <= hi_ + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
    } else {
      for (double v = lo_; v <= hi_ + step_ * 1e-6; v += step_)
        out.push_back(std::abs(v) < step_ * 1e-9 ? 0.0 : v);
    }
    return out;
  }

private:
  bool log_;
  double px0_, px1_;
  double lo_ = 0.0, hi_ = 1.0, step_ = 1.0;
};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
};

double cell_number(const std::vector<std::string>& row, int col, const std::string& name) {
  auto v = parse_double(row[static_cast<std::size_t>(col)]);
  if (!v) fail(ErrorCode::Parse, "column '" + name + "' has non-numeric value '" +
                                     row[static_cast<std::size_t>(col)] + "'");
  return *v;
}

int require_column(const CsvData& csv, const std::string& name) {
  const int c = csv.column(name);
  if (c < 0) fail(ErrorCode::InvalidArgument, "CSV has no column '" + name + "'");
  return c;
}

void frame(std::string& svg, const PlotSpec& spec) {
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) +
         "\" height=\"" + fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " +
         fixed(kHeight, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed((kLeft + kWidth - kRight) / 2) + "\" y=\"28\" text-anchor=\"middle\" "
         "font-size=\"15\">" + escape(spec.title) + "</text>\n";
  svg += "<text x=\"" + fixed((kLeft + kWidth - kRight) / 2) + "\" y=\"" +
         fixed(kHeight - 14) + "\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + fixed((kTop + kHeight - kBottom) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fixed((kTop + kHeight - kBottom) / 2) + ")\">" + escape(spec.y_label) + "</text>\n";
}

void y_axis(std::string& svg, const Axis& y) {
  const double x0 = kLeft, x1 = kWidth - kRight;
  for (double t : y.ticks()) {
    const double py = y.map(t);
    svg += "<line x1=\"" + fixed(x0) + "\" y1=\"" + fixed(py) + "\" x2=\"" + fixed(x1) +
           "\" y2=\"" + fixed(py) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + fixed(x0 - 6) + "\" y=\"" + fixed(py + 4) +
           "\" text-anchor=\"end\">" + tick_label(t) + "</text>\n";
  }
  svg += "<line x1=\"" + fixed(x0) + "\" y1=\"" + fixed(kTop) + "\" x2=\"" + fixed(x0) +
         "\" y2=\"" + fixed(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed(x0) + "\" y1=\"" + fixed(kHeight - kBottom) + "\" x2=\"" +
         fixed(x1) + "\" y2=\"" + fixed(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
}

void legend(std::string& svg, const std::vector<Series>& series) {
  double y = kTop + 10;
  const double x = kWidth - kRight + 16;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = series[i].dashed ? "black" : kPalette[i % std::size(kPalette)];
    svg += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(x + 22) +
           "\" y2=\"" + fixed(y) + "\" stroke=\"" + colour + "\" stroke-width=\"2.5\"" +
           (series[i].dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    svg += "<text x=\"" + fixed(x + 28) + "\" y=\"" + fixed(y + 4) + "\">" +
           escape(series[i].name) + "</text>\n";
    y += 20;
  }
}

std::string line_chart(const CsvData& csv, const PlotSpec& spec) {
  const int xc = require_column(csv, spec.x_column);
  const int yc = require_column(csv, spec.y_column);
  const int sc = require_column(csv, spec.series_column);
  const int ec = csv.column("experiment");
  const int rc = spec.reference_column.empty() ? -1 : require_column(csv, spec.reference_column);

  bool multi_experiment = false;
  if (ec >= 0)
    for (const auto& row : csv.rows)
      if (row[static_cast<std::size_t>(ec)] != csv.rows.front()[static_cast<std::size_t>(ec)])
        multi_experiment = true;

  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  Series reference{spec.reference_label.empty() ? spec.reference_column : spec.reference_label,
                   {}, true};
  std::map<double, double> ref_points;
  for (const auto& row : csv.rows) {
    std::string key = row[static_cast<std::size_t>(sc)];
    if (multi_experiment) key = row[static_cast<std::size_t>(ec)] + "/" + key;
    auto [it, inserted] = index.emplace(key, series.size());
    if (inserted) series.push_back({key, {}, false});
    const double x = cell_number(row, xc, spec.x_column);
    const double y = cell_number(row, yc, spec.y_column) * spec.y_scale;
    if (std::isfinite(x) && std::isfinite(y)) series[it->second].points.emplace_back(x, y);
    if (rc >= 0) {
      const double r = cell_number(row, rc, spec.reference_column) * spec.y_scale;
      if (std::isfinite(r)) ref_points.emplace(x, r);
    }
  }
  for (auto& [x, r] : ref_points) reference.points.emplace_back(x, r);
  if (!reference.points.empty()) series.push_back(std::move(reference));
  for (auto& s : series) std::sort(s.points.begin(), s.points.end());

  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if ((spec.log_x && !(x > 0)) || (spec.log_y && !(y > 0))) continue;
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  if (!std::isfinite(xlo)) fail(ErrorCode::InvalidArgument, "nothing to plot");
  if (!spec.log_x && xhi == xlo) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  const Axis xa(xlo, xhi, spec.log_x, kLeft, kWidth - kRight, false);
  const Axis ya(ylo, yhi, spec.log_y, kHeight - kBottom, kTop, true);

  std::string svg;
  frame(svg, spec);
  y_axis(svg, ya);
  for (double t : xa.ticks()) {
    const double px = xa.map(t);
    svg += "<line x1=\"" + fixed(px) + "\" y1=\"" + fixed(kHeight - kBottom) + "\" x2=\"" +
           fixed(px) + "\" y2=\"" + fixed(kHeight - kBottom + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed(px) + "\" y=\"" + fixed(kHeight - kBottom + 19) +
           "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* colour = s.dashed ? "black" : kPalette[i % std::size(kPalette)];
    std::string pts;
    for (auto [x, y] : s.points) {
      if ((spec.log_x && !(x > 0)) || (spec.log_y && !(y > 0))) continue;
      if (!pts.empty()) pts += ' ';
      pts += fixed(xa.map(x)) + "," + fixed(ya.map(y));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) +
           "\" stroke-width=\"2\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") +
           " points=\"" + pts + "\"/>\n";
    if (!s.dashed)
      for (auto [x, y] : s.points) {
        if ((spec.log_x && !(x > 0)) || (spec.log_y && !(y > 0))) continue;
        svg += "<circle cx=\"" + fixed(xa.map(x)) + "\" cy=\"" + fixed(ya.map(y)) +
               "\" r=\"3\" fill=\"" + colour + "\"/>\n";
      }
  }
  legend(svg, series);
  svg += "</svg>\n";
  return svg;
}

std::string bar_chart(const CsvData& csv, const PlotSpec& spec) {
  const int xc = require_column(csv, spec.x_column);
  const int yc = require_column(csv, spec.y_column);
  const int sc = require_column(csv, spec.series_column);

  std::vector<std::string> categories, names;
  std::map<std::pair<std::string, std::string>, double> values;
  for (const auto& row : csv.rows) {
    const auto& cat = row[static_cast<std::size_t>(xc)];
    const auto& name = row[static_cast<std::size_t>(sc)];
    if (std::find(categories.begin(), categories.end(), cat) == categories.end())
      categories.push_back(cat);
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    values[{cat, name}] = cell_number(row, yc, spec.y_column) * spec.y_scale;
  }
  if (categories.empty()) fail(ErrorCode::InvalidArgument, "nothing to plot");
  double yhi = 0.0;
  for (const auto& [k, v] : values)
    if (std::isfinite(v)) yhi = std::max(yhi, v);
  const Axis ya(0.0, yhi > 0 ? yhi : 1.0, false, kHeight - kBottom, kTop, true);

  std::string svg;
  frame(svg, spec);
  y_axis(svg, ya);
  const double plot_w = kWidth - kRight - kLeft;
  const double group_w = plot_w / static_cast<double>(categories.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(names.size());
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c) + group_w * 0.1;
    for (std::size_t s = 0; s < names.size(); ++s) {
      auto it = values.find({categories[c], names[s]});
      if (it == values.end() || !std::isfinite(it->second)) continue;
      const double top = ya.map(it->second);
      svg += "<rect x=\"" + fixed(gx + bar_w * static_cast<double>(s)) + "\" y=\"" + fixed(top) +
             "\" width=\"" + fixed(bar_w) + "\" height=\"" + fixed(kHeight - kBottom - top) +
             "\" fill=\"" + kPalette[s % std::size(kPalette)] + "\"/>\n";
    }
    svg += "<text x=\"" + fixed(gx + group_w * 0.4) + "\" y=\"" +
           fixed(kHeight - kBottom + 19) + "\" text-anchor=\"middle\">" + escape(categories[c]) +
           "</text>\n";
  }
  std::vector<Series> legend_entries;
  for (const auto& n : names) legend_entries.push_back({n, {}, false});
  legend(svg, legend_entries);
  svg += "</svg>\n";
  return svg;
}

}  // namespace

PlotSpec plot_preset(std::string_view name) {
  PlotSpec p;
  if (name == "sweep_n") {
    p.title = "ECE vs training size";
    p.x_column = "n_train";
    p.y_column = "ece_mean";
    p.x_label = "training size n";
    p.y_label = "ECE (%)";
    p.log_x = true;
    p.y_scale = 100.0;
  } else if (name == "sweep_alpha") {
    p.title = "ECE vs class prior";
    p.x_column = "alpha";
    p.y_column = "ece_mean";
    p.x_label = "P(Y = 1)";
    p.y_label = "ECE (%)";
    p.y_scale = 100.0;
  } else if (name == "efficiency_variance") {
    p.title = "Variance of the fitted log-odds";
    p.x_column = "n";
    p.y_column = "variance";
    p.x_label = "training size n";
    p.y_label = "mean variance over grid";
    p.log_x = true;
    p.reference_column = "cr_bound";
    p.reference_label = "CR bound";
  } else if (name == "efficiency_mse") {
    p.title = "MSE of the fitted log-odds";
    p.x_column = "n";
    p.y_column = "mse";
    p.x_label = "training size n";
    p.y_label = "mean MSE over grid";
    p.log_x = true;
    p.log_y = true;
  } else if (name == "ablation") {
    p.title = "Accuracy with known and estimated shape";
    p.x_column = "n_train";
    p.y_column = "acc_mean";
    p.x_label = "training size n";
    p.y_label = "accuracy (%)";
    p.log_x = true;
    p.y_scale = 100.0;
  } else if (name == "bench_ece") {
    p.kind = PlotKind::Bar;
    p.title = "ECE by distribution";
    p.x_column = "experiment";
    p.y_column = "ece_mean";
    p.y_label = "ECE (%)";
    p.y_scale = 100.0;
  } else if (name == "bench_accuracy") {
    p.kind = PlotKind::Bar;
    p.title = "Accuracy by distribution";
    p.x_column = "experiment";
    p.y_column = "acc_mean";
    p.y_label = "accuracy (%)";
    p.y_scale = 100.0;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown plot preset '" + std::string(name) + "'");
  }
  return p;
}

std::vector<std::string> plot_preset_names() {
  return {"sweep_n", "sweep_alpha", "efficiency_variance", "efficiency_mse",
          "ablation", "bench_ece",  "bench_accuracy"};
}

std::string render_svg(const CsvData& csv, const PlotSpec& spec) {
  return spec.kind == PlotKind::Line ? line_chart(csv, spec) : bar_chart(csv, spec);
}

}  // namespace efda
