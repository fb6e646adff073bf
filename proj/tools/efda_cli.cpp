// Command-line front end. Talks to the library only through efda.h.
#include "efda/efda.h"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(efda_status st, const std::string& context) {
  if (st == EFDA_OK) return;
  std::string msg = context + ": " + efda_status_string(st);
  const std::string detail = efda_last_error();
  if (!detail.empty()) msg += ": " + detail;
  throw RuntimeFailure(msg);
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DatasetPtr = std::unique_ptr<efda_dataset, Deleter<efda_dataset, efda_dataset_free>>;
using ModelPtr = std::unique_ptr<efda_model, Deleter<efda_model, efda_model_free>>;
using TablePtr = std::unique_ptr<efda_table, Deleter<efda_table, efda_table_free>>;

std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

struct ExperimentArgs {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  int bins = 0;
  unsigned threads = 1;
  bool per_trial = false;
  std::string confidence;
};

void add_experiment(CLI::App& app, const std::string& name, const std::string& help,
                    ExperimentArgs& args, std::string& chosen) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--config", args.config, "Experiment config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", args.out, "Output directory")->capture_default_str();
  sub->add_option("--seed", args.seed, "Override the master seed");
  sub->add_option("--bins", args.bins, "Override the ECE bin count")->check(CLI::PositiveNumber);
  sub->add_option("--threads", args.threads, "Worker threads, 0 for all cores")->capture_default_str();
  sub->add_flag("--per-trial", args.per_trial, "Also write <name>_trials.csv");
  sub->add_option("--confidence", args.confidence, "Two-class ECE confidence")
      ->check(CLI::IsMember({"class1", "top_label"}));
  sub->callback([&chosen, name] { chosen = name; });
}

int run_experiment(const std::string& kind, const ExperimentArgs& args, const CLI::App& sub) {
  efda_run_options opts;
  efda_run_options_init(&opts);
  if (sub.count("--seed") > 0) {
    opts.override_seed = 1;
    opts.seed = args.seed;
  }
  opts.bins = args.bins;
  opts.threads = args.threads;
  opts.per_trial = args.per_trial ? 1 : 0;
  if (args.confidence == "class1") opts.confidence = 1;
  if (args.confidence == "top_label") opts.confidence = 2;

  efda_table* raw = nullptr;
  check(efda_experiment_run(kind.c_str(), args.config.c_str(), &opts, &raw), args.config);
  TablePtr table(raw);

  std::error_code ec;
  std::filesystem::create_directories(args.out, ec);
  if (ec) throw RuntimeFailure("cannot create " + args.out + ": " + ec.message());
  const auto dir = std::filesystem::path(args.out);
  const std::string name = efda_table_name(table.get());
  const auto csv = (dir / (name + ".csv")).string();
  check(efda_table_write_csv(table.get(), csv.c_str()), csv);
  std::cout << csv << " (" << efda_table_rows(table.get()) << " rows)\n";
  if (args.per_trial) {
    const auto trials = (dir / (name + "_trials.csv")).string();
    check(efda_table_write_trials_csv(table.get(), trials.c_str()), trials);
    std::cout << trials << " (" << efda_table_trial_rows(table.get()) << " rows)\n";
  }
  return 0;
}

struct FitArgs {
  std::string data, family, method = "efda", model;
};

int run_fit(const FitArgs& a) {
  efda_dataset* d = nullptr;
  check(efda_dataset_load(a.data.c_str(), 1, &d), a.data);
  DatasetPtr data(d);
  efda_model* m = nullptr;
  const char* family = a.family.empty() ? nullptr : a.family.c_str();
  check(efda_model_fit(a.method.c_str(), family, data.get(), &m), "fit");
  ModelPtr model(m);
  check(efda_model_save(model.get(), a.model.c_str()), a.model);
  std::cout << a.model << " (" << efda_model_classes(model.get()) << " classes, "
            << efda_dataset_rows(data.get()) << " rows)\n";
  return 0;
}

struct PredictArgs {
  std::string model, data, output;
};

int run_predict(const PredictArgs& a) {
  efda_model* m = nullptr;
  check(efda_model_load(a.model.c_str(), &m), a.model);
  ModelPtr model(m);
  efda_dataset* d = nullptr;
  check(efda_dataset_load(a.data.c_str(), 0, &d), a.data);
  DatasetPtr data(d);

  const size_t dims = efda_dataset_dims(data.get());
  const size_t rows = efda_dataset_rows(data.get());
  const int classes = efda_model_classes(model.get());
  const double* x = efda_dataset_features(data.get());

  std::string out;
  for (size_t j = 0; j < dims; ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
  for (int k = 0; k < classes; ++k) out += ",p" + std::to_string(k);
  out += ",predicted\n";
  std::vector<double> p(static_cast<size_t>(classes));
  for (size_t i = 0; i < rows; ++i) {
    const double* row = x + i * dims;
    check(efda_model_posteriors(model.get(), row, dims, p.data(), p.size()),
          a.data + " row " + std::to_string(i + 1));
    int best = 0;
    for (size_t j = 0; j < dims; ++j) out += (j ? "," : "") + shortest(row[j]);
    for (int k = 0; k < classes; ++k) {
      out += "," + shortest(p[static_cast<size_t>(k)]);
      if (p[static_cast<size_t>(k)] > p[static_cast<size_t>(best)]) best = k;
    }
    out += "," + std::to_string(best) + "\n";
  }

  if (a.output.empty() || a.output == "-") {
    std::cout << out;
  } else {
    std::ofstream f(a.output, std::ios::binary);
    f << out;
    if (!f) throw RuntimeFailure("cannot write " + a.output);
  }
  return 0;
}

struct PlotArgs {
  std::string input, preset, output;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential family discriminant analysis: fitting, prediction and benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(efda_version()));
  std::string chosen;

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a classifier to labeled data (label in the last column)");
  fit_cmd->add_option("--data", fit.data, "Training file")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--family", fit.family, "Family, e.g. weibull:3, or one per feature joined by ';'");
  fit_cmd->add_option("--method", fit.method, "efda, efda_khat, efda_khat_pooled, lda, qda or lr")
      ->capture_default_str();
  fit_cmd->add_option("--model", fit.model, "Where to write the model")->required();
  fit_cmd->callback([&] { chosen = "fit"; });

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Write class posteriors for a feature file");
  predict_cmd->add_option("--model", predict.model, "Model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", predict.data, "Feature file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--output", predict.output, "Output CSV (stdout if omitted)");
  predict_cmd->callback([&] { chosen = "predict"; });

  ExperimentArgs exp;
  add_experiment(app, "bench-binary", "Two-class benchmark", exp, chosen);
  add_experiment(app, "bench-multiclass", "Multiclass benchmark", exp, chosen);
  add_experiment(app, "efficiency", "Log-odds variance and MSE against the Cramer-Rao bound", exp, chosen);
  add_experiment(app, "sweep-n", "Accuracy and ECE against training size", exp, chosen);
  add_experiment(app, "sweep-alpha", "Accuracy and ECE against class imbalance", exp, chosen);
  add_experiment(app, "ablate-shape", "Known against estimated Weibull shape", exp, chosen);

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render a result CSV as SVG");
  plot_cmd->add_option("--input", plot.input, "CSV written by an experiment")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--preset", plot.preset,
                       "sweep_n, sweep_alpha, efficiency_variance, efficiency_mse, ablation, bench_ece or bench_accuracy")
      ->required();
  plot_cmd->add_option("--output", plot.output, "SVG path")->required();
  plot_cmd->callback([&] { chosen = "plot"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (chosen == "fit") return run_fit(fit);
    if (chosen == "predict") return run_predict(predict);
    if (chosen == "plot") {
      check(efda_plot_svg(plot.input.c_str(), plot.preset.c_str(), plot.output.c_str()), plot.input);
      std::cout << plot.output << "\n";
      return 0;
    }
    return run_experiment(chosen, exp, *app.get_subcommand(chosen));
  } catch (const RuntimeFailure& e) {
    std::cerr << "efda: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "efda: " << e.what() << "\n";
    return kRuntimeError;
  }
}
