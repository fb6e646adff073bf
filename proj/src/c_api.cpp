#include "efda/efda.h"

#include "efda/config.hpp"
#include "efda/data_io.hpp"
#include "efda/error.hpp"
#include "efda/numfmt.hpp"
#include "efda/model_io.hpp"
#include "efda/plot.hpp"
#include "efda/sim.hpp"
#include "efda/table.hpp"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

struct efda_dataset {
  efda::Dataset data;
  bool labeled = false;
};

struct efda_model {
  efda::AnyModel model;
};

struct efda_table {
  efda::BenchmarkTable table;
};

namespace {

thread_local std::string g_last_error;

efda_status to_status(efda::ErrorCode code) {
  return static_cast<efda_status>(static_cast<int>(code));
}

template <class F>
efda_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return EFDA_OK;
  } catch (const efda::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return EFDA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EFDA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return EFDA_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) efda::fail(efda::ErrorCode::InvalidArgument, what);
}

efda_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf || cap < text.size() + 1) {
    g_last_error = "buffer too small";
    return EFDA_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  g_last_error.clear();
  return EFDA_OK;
}

std::vector<efda::FamilySpec> parse_families(const char* text) {
  std::vector<efda::FamilySpec> specs;
  if (!text) return specs;
  std::string_view s(text);
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(';', start);
    if (end == std::string_view::npos) end = s.size();
    auto part = efda::trim(s.substr(start, end - start));
    if (!part.empty()) specs.push_back(efda::FamilySpec::parse(part));
    start = end + 1;
  }
  return specs;
}

efda::BenchmarkTable run_one(std::string_view kind, const efda::ExperimentConfig& cfg,
                             const efda::RunOptions& opts) {
  if (kind == "bench-binary") return efda::run_binary_benchmark(cfg, opts);
  if (kind == "bench-multiclass") return efda::run_multiclass_benchmark(cfg, opts);
  if (kind == "efficiency") return efda::run_efficiency(cfg, opts);
  if (kind == "sweep-n") return efda::run_sample_size_sweep(cfg, opts);
  if (kind == "sweep-alpha") return efda::run_imbalance_sweep(cfg, opts);
  if (kind == "ablate-shape") return efda::run_unknown_k_ablation(cfg, opts);
  efda::fail(efda::ErrorCode::InvalidArgument, "unknown experiment kind '" + std::string(kind) + "'");
}

}  // namespace

extern "C" {

const char* efda_version(void) { return "0.1.0"; }

const char* efda_status_string(efda_status status) {
  switch (status) {
    case EFDA_OK: return "ok";
    case EFDA_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case EFDA_ERR_INTERNAL: return "internal error";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 9) return efda::to_string(static_cast<efda::ErrorCode>(code));
  return "unknown status";
}

const char* efda_last_error(void) { return g_last_error.c_str(); }

efda_status efda_dataset_load(const char* path, int labeled, efda_dataset** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = nullptr;
    const std::string text = efda::read_text_file(path);
    auto handle = std::make_unique<efda_dataset>();
    handle->labeled = labeled != 0;
    if (labeled) {
      handle->data = efda::parse_labeled_data(text, path);
    } else {
      const auto t = efda::parse_feature_table(text, path);
      handle->data.dims = t.dims;
      handle->data.features = t.values;
    }
    *out = handle.release();
  });
}

efda_status efda_dataset_from_arrays(const double* features, const int* labels, size_t rows,
                                     size_t dims, efda_dataset** out) {
  return guarded([&] {
    require(out && dims > 0 && (features || rows == 0), "invalid dataset arguments");
    *out = nullptr;
    auto handle = std::make_unique<efda_dataset>();
    handle->labeled = labels != nullptr;
    handle->data.dims = dims;
    handle->data.features.assign(features, features + rows * dims);
    if (labels) handle->data.labels.assign(labels, labels + rows);
    *out = handle.release();
  });
}

size_t efda_dataset_rows(const efda_dataset* d) {
  if (!d || d->data.dims == 0) return 0;
  return d->data.features.size() / d->data.dims;
}

size_t efda_dataset_dims(const efda_dataset* d) { return d ? d->data.dims : 0; }

const double* efda_dataset_features(const efda_dataset* d) {
  return d ? d->data.features.data() : nullptr;
}

const int* efda_dataset_labels(const efda_dataset* d) {
  return d && d->labeled ? d->data.labels.data() : nullptr;
}

void efda_dataset_free(efda_dataset* d) { delete d; }

efda_status efda_model_fit(const char* method, const char* families, const efda_dataset* data,
                           efda_model** out) {
  return guarded([&] {
    require(method && data && out, "null argument");
    require(data->labeled, "training data needs labels");
    *out = nullptr;
    const auto m = efda::parse_method(method);
    const auto specs = parse_families(families);
    *out = new efda_model{efda::fit_model(m, specs, data->data)};
  });
}

efda_status efda_model_load(const char* path, efda_model** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = nullptr;
    *out = new efda_model{efda::parse_model(efda::read_text_file(path), path)};
  });
}

efda_status efda_model_parse(const char* text, efda_model** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = nullptr;
    *out = new efda_model{efda::parse_model(text)};
  });
}

efda_status efda_model_save(const efda_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "null argument");
    efda::write_text_file(path, efda::serialize_model(model->model));
  });
}

efda_status efda_model_serialize(const efda_model* model, char* buf, size_t cap, size_t* needed) {
  std::string text;
  const auto st = guarded([&] {
    require(model, "null model");
    text = efda::serialize_model(model->model);
  });
  return st == EFDA_OK ? copy_out(text, buf, cap, needed) : st;
}

int efda_model_classes(const efda_model* model) {
  return model ? efda::model_classes(model->model) : 0;
}

size_t efda_model_dims(const efda_model* model) {
  return model ? efda::model_dims(model->model) : 0;
}

efda_status efda_model_posteriors(const efda_model* model, const double* x, size_t dims,
                                  double* out, size_t out_len) {
  return guarded([&] {
    require(model && x && out, "null argument");
    const auto p = efda::model_posteriors(model->model, {x, dims});
    require(out_len >= p.size(), "output buffer shorter than the class count");
    std::copy(p.begin(), p.end(), out);
  });
}

void efda_model_free(efda_model* model) { delete model; }

void efda_run_options_init(efda_run_options* o) {
  if (!o) return;
  *o = efda_run_options{};
  o->threads = 1;
}

efda_status efda_experiment_run(const char* kind, const char* config_path,
                                const efda_run_options* options, efda_table** out) {
  return guarded([&] {
    require(kind && config_path && out, "null argument");
    *out = nullptr;
    efda_run_options o;
    efda_run_options_init(&o);
    if (options) o = *options;
    require(o.confidence >= 0 && o.confidence <= 2, "confidence must be 0, 1 or 2");

    auto cfg = efda::load_config(config_path);
    efda::RunOptions run;
    run.threads = o.threads;
    run.per_trial = o.per_trial != 0;

    auto handle = std::make_unique<efda_table>();
    handle->table.name = cfg.name;
    bool first = true;
    for (auto& e : cfg.experiments) {
      if (o.override_seed) e.seed = o.seed;
      if (o.bins > 0) e.ece_bins = o.bins;
      if (o.confidence == 1) e.confidence = efda::BinaryConfidence::ClassOne;
      if (o.confidence == 2) e.confidence = efda::BinaryConfidence::TopLabel;
      auto part = run_one(kind, e, run);
      if (first) handle->table.kind = part.kind;
      first = false;
      handle->table.append(part);
    }
    *out = handle.release();
  });
}

const char* efda_table_name(const efda_table* t) { return t ? t->table.name.c_str() : ""; }

size_t efda_table_rows(const efda_table* t) {
  if (!t) return 0;
  return t->table.kind == efda::TableKind::Classification ? t->table.rows.size()
                                                          : t->table.efficiency.size();
}

size_t efda_table_trial_rows(const efda_table* t) { return t ? t->table.trials.size() : 0; }

efda_status efda_table_write_csv(const efda_table* t, const char* path) {
  return guarded([&] {
    require(t && path, "null argument");
    efda::write_text_file(path, efda::table_csv(t->table));
  });
}

efda_status efda_table_write_trials_csv(const efda_table* t, const char* path) {
  return guarded([&] {
    require(t && path, "null argument");
    efda::write_text_file(path, efda::trials_csv(t->table));
  });
}

efda_status efda_table_csv(const efda_table* t, char* buf, size_t cap, size_t* needed) {
  std::string text;
  const auto st = guarded([&] {
    require(t, "null table");
    text = efda::table_csv(t->table);
  });
  return st == EFDA_OK ? copy_out(text, buf, cap, needed) : st;
}

void efda_table_free(efda_table* t) { delete t; }

efda_status efda_plot_svg(const char* csv_path, const char* preset, const char* svg_path) {
  return guarded([&] {
    require(csv_path && preset && svg_path, "null argument");
    const auto spec = efda::plot_preset(preset);
    const auto csv = efda::parse_csv(efda::read_text_file(csv_path));
    efda::write_text_file(svg_path, efda::render_svg(csv, spec));
  });
}

}  // extern "C"
