/* C interface to the efda library. All objects are opaque handles released
 * with the matching *_free function. Functions returning efda_status leave a
 * thread-local message for efda_last_error() when they fail. */
#ifndef EFDA_EFDA_H
#define EFDA_EFDA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EFDA_BUILDING_LIBRARY)
#    define EFDA_API __declspec(dllexport)
#  else
#    define EFDA_API __declspec(dllimport)
#  endif
#else
#  define EFDA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum efda_status {
  EFDA_OK = 0,
  EFDA_ERR_INVALID_ARGUMENT = 1,
  EFDA_ERR_DOMAIN = 2,
  EFDA_ERR_SUPPORT = 3,
  EFDA_ERR_DEGENERATE_DATA = 4,
  EFDA_ERR_EMPTY_CLASS = 5,
  EFDA_ERR_NO_CONVERGENCE = 6,
  EFDA_ERR_UNSUPPORTED_FAMILY = 7,
  EFDA_ERR_PARSE = 8,
  EFDA_ERR_IO = 9,
  EFDA_ERR_BUFFER_TOO_SMALL = 10,
  EFDA_ERR_INTERNAL = 100
} efda_status;

typedef struct efda_dataset efda_dataset;
typedef struct efda_model efda_model;
typedef struct efda_table efda_table;

EFDA_API const char* efda_version(void);
EFDA_API const char* efda_status_string(efda_status status);
/* Message of the last failure on the calling thread; "" if none. */
EFDA_API const char* efda_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

/* Reads a delimited text file. With labeled != 0 the last column holds the
 * integer class label. */
EFDA_API efda_status efda_dataset_load(const char* path, int labeled, efda_dataset** out);
/* Copies rows * dims features (row-major) and, if labels is non-NULL, rows labels. */
EFDA_API efda_status efda_dataset_from_arrays(const double* features, const int* labels,
                                              size_t rows, size_t dims, efda_dataset** out);
EFDA_API size_t efda_dataset_rows(const efda_dataset* data);
EFDA_API size_t efda_dataset_dims(const efda_dataset* data);
EFDA_API const double* efda_dataset_features(const efda_dataset* data);
/* NULL for unlabeled datasets. */
EFDA_API const int* efda_dataset_labels(const efda_dataset* data);
EFDA_API void efda_dataset_free(efda_dataset* data);

/* ---- models ------------------------------------------------------------ */

/* method: efda, efda_khat, efda_khat_pooled, lda, qda or lr.
 * families: one family ("weibull:3") or one per feature separated by ';'.
 * Baselines ignore families and may pass NULL. */
EFDA_API efda_status efda_model_fit(const char* method, const char* families,
                                    const efda_dataset* data, efda_model** out);
EFDA_API efda_status efda_model_load(const char* path, efda_model** out);
EFDA_API efda_status efda_model_parse(const char* text, efda_model** out);
EFDA_API efda_status efda_model_save(const efda_model* model, const char* path);
/* Writes the text form including the terminating NUL. *needed (if non-NULL)
 * receives the required size; EFDA_ERR_BUFFER_TOO_SMALL when cap is short. */
EFDA_API efda_status efda_model_serialize(const efda_model* model, char* buf, size_t cap,
                                          size_t* needed);
EFDA_API int efda_model_classes(const efda_model* model);
EFDA_API size_t efda_model_dims(const efda_model* model);
/* Writes efda_model_classes() probabilities for one feature row of length dims. */
EFDA_API efda_status efda_model_posteriors(const efda_model* model, const double* x,
                                           size_t dims, double* out, size_t out_len);
EFDA_API void efda_model_free(efda_model* model);

/* ---- experiments ------------------------------------------------------- */

typedef struct efda_run_options {
  int override_seed;   /* nonzero: use seed instead of the config value */
  uint64_t seed;
  int bins;            /* > 0 overrides the ECE bin count */
  int confidence;      /* 0 config value, 1 class-1 probability, 2 top label */
  unsigned threads;    /* 0 = hardware concurrency */
  int per_trial;       /* nonzero: keep per-trial rows */
} efda_run_options;

EFDA_API void efda_run_options_init(efda_run_options* options);

/* kind: bench-binary, bench-multiclass, efficiency, sweep-n, sweep-alpha or
 * ablate-shape. Every experiment section of the config file is run and the
 * rows are concatenated into one table named after the config. */
EFDA_API efda_status efda_experiment_run(const char* kind, const char* config_path,
                                         const efda_run_options* options, efda_table** out);
EFDA_API const char* efda_table_name(const efda_table* table);
EFDA_API size_t efda_table_rows(const efda_table* table);
EFDA_API size_t efda_table_trial_rows(const efda_table* table);
EFDA_API efda_status efda_table_write_csv(const efda_table* table, const char* path);
EFDA_API efda_status efda_table_write_trials_csv(const efda_table* table, const char* path);
EFDA_API efda_status efda_table_csv(const efda_table* table, char* buf, size_t cap,
                                    size_t* needed);
EFDA_API void efda_table_free(efda_table* table);

/* ---- plots ------------------------------------------------------------- */

/* Renders a CSV written by efda_table_write_csv using a named layout:
 * sweep_n, sweep_alpha, efficiency_variance, efficiency_mse, ablation,
 * bench_ece or bench_accuracy. */
EFDA_API efda_status efda_plot_svg(const char* csv_path, const char* preset,
                                   const char* svg_path);

#ifdef __cplusplus
}
#endif

#endif /* EFDA_EFDA_H */
