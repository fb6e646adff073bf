#include "efda/sim.hpp"
#include "efda/baselines.hpp"
#include "efda/classifier.hpp"
#include "efda/error.hpp"
#include "efda/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <variant>

namespace efda {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int draw_label(std::span<const double> priors, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < priors.size(); ++k) {
    acc += priors[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(priors.size()) - 1;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// A fitted classifier of any supported method.
class Fitted {
public:
  Fitted(Method method, const ExperimentConfig& cfg, const LabeledSample1D& train)
      : model_(fit(method, cfg, train)) {}

  std::vector<double> posteriors(double x) const {
    return std::visit(
        [x](const auto& m) -> std::vector<double> {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, BinaryModel>) {
            const double p1 = m.posterior(x);
            return {1.0 - p1, p1};
          } else if constexpr (std::is_same_v<M, MulticlassModel>) {
            return m.posteriors(x);
          } else if constexpr (std::is_same_v<M, GaussianClassModel>) {
            return gaussian_posteriors(m, x);
          } else {
            return logistic_posteriors(m, x);
          }
        },
        model_);
  }

  double log_odds(double x) const {
    return std::visit(
        [x](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, BinaryModel>) {
            return m.log_odds(x);
          } else if constexpr (std::is_same_v<M, MulticlassModel>) {
            const auto s = m.score(x);
            return s.at(1) - s.at(0);
          } else if constexpr (std::is_same_v<M, GaussianClassModel>) {
            return gaussian_log_odds(m, x);
          } else {
            return logistic_log_odds(m, x);
          }
        },
        model_);
  }

private:
  using Model = std::variant<BinaryModel, MulticlassModel, GaussianClassModel, LogisticModel>;

  static Model fit(Method method, const ExperimentConfig& cfg, const LabeledSample1D& train) {
    const int K = cfg.classes();
    switch (method) {
      case Method::Efda:
        return fit_efda(cfg.family, train, K);
      case Method::EfdaEstimatedShape:
        return fit_efda(FamilySpec::weibull(fit_weibull_shape(train.x, train.y).shape), train, K);
      case Method::EfdaPooledShape:
        return fit_efda(FamilySpec::weibull(fit_weibull_shape(train.x).shape), train, K);
      case Method::Lda:
        return fit_lda(train.x, train.y, K);
      case Method::Qda:
        return fit_qda(train.x, train.y, K);
      case Method::Lr:
        return fit_logistic(train.x, train.y, K);
    }
    fail(ErrorCode::InvalidArgument, "unknown method");
  }

  static Model fit_efda(const FamilySpec& spec, const LabeledSample1D& train, int K) {
    if (K == 2) return fit_binary(spec, train.x, train.y);
    return fit_multiclass(spec, train.x, train.y, K);
  }

  Model model_;
};

struct MethodOutcome {
  double a = kNaN;
  double b = kNaN;
};

struct TrialOutcome {
  bool failed = false;
  std::vector<MethodOutcome> methods;
};

struct Moments {
  double mean = kNaN;
  double sd = kNaN;
};

Moments mean_sd(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / static_cast<double>(v.size());
  if (v.size() < 2) return m;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return m;
}

double two_class_alpha(const ExperimentConfig& cfg) {
  return cfg.classes() == 2 ? cfg.alpha() : kNaN;
}

// Runs one classification design point and appends its rows to `table`.
void classification_point(const ExperimentConfig& cfg, const RunOptions& opts,
                          BenchmarkTable& table) {
  cfg.validate();
  const auto M = cfg.trials;
  const auto& methods = cfg.methods;
  std::vector<TrialOutcome> outcomes(M);

  parallel_for(M, opts.threads, [&](std::size_t t) {
    TrialOutcome out;
    out.methods.resize(methods.size());
    try {
      const TrainTest data = generate_split(cfg, t);
      const bool class1 = cfg.classes() == 2 && cfg.confidence == BinaryConfidence::ClassOne;
      const std::size_t n_test = data.test.x.size();
      std::vector<PredictionRecord> records(n_test), reliability(class1 ? n_test : 0);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const Fitted fitted(methods[m], cfg, data.train);
        for (std::size_t i = 0; i < n_test; ++i) {
          const auto probs = fitted.posteriors(data.test.x[i]);
          records[i] = make_record(probs, data.test.y[i]);
          if (class1) reliability[i] = make_class1_record(probs[1], data.test.y[i]);
        }
        out.methods[m] = {accuracy(records), ece(class1 ? reliability : records, cfg.ece_bins)};
      }
    } catch (const Error&) {
      out.failed = true;
      out.methods.assign(methods.size(), MethodOutcome{});
    }
    outcomes[t] = std::move(out);
  });

  std::size_t failed = 0;
  for (const auto& o : outcomes) failed += o.failed ? 1 : 0;
  const double alpha = two_class_alpha(cfg);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<double> acc, calib;
    for (const auto& o : outcomes) {
      if (o.failed) continue;
      acc.push_back(o.methods[m].a);
      calib.push_back(o.methods[m].b);
    }
    const auto a = mean_sd(acc);
    const auto e = mean_sd(calib);
    ClassificationRow row;
    row.experiment = cfg.name;
    row.family = cfg.family.name();
    row.classes = cfg.classes();
    row.n_train = cfg.n_train;
    row.n_test = cfg.n_test;
    row.alpha = alpha;
    row.method = std::string(method_name(methods[m]));
    row.trials = M;
    row.failed = failed;
    row.acc_mean = a.mean;
    row.acc_sd = a.sd;
    row.ece_mean = e.mean;
    row.ece_sd = e.sd;
    table.rows.push_back(std::move(row));
  }
  if (opts.per_trial) {
    for (std::size_t t = 0; t < M; ++t)
      for (std::size_t m = 0; m < methods.size(); ++m)
        table.trials.push_back({cfg.name, cfg.n_train, alpha, t,
                                std::string(method_name(methods[m])), outcomes[t].failed,
                                outcomes[t].methods[m].a, outcomes[t].methods[m].b});
  }
}

BenchmarkTable classification_table(const ExperimentConfig& cfg) {
  BenchmarkTable t;
  t.name = cfg.name;
  t.kind = TableKind::Classification;
  return t;
}

void require_two_classes(const ExperimentConfig& cfg, const char* what) {
  if (cfg.classes() != 2)
    fail(ErrorCode::InvalidArgument, std::string(what) + " needs exactly two classes");
}

}  // namespace

LabeledSample1D generate_iid(const ExperimentConfig& cfg, std::size_t n, Rng& rng) {
  LabeledSample1D s;
  s.x.reserve(n);
  s.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = draw_label(cfg.priors, rng);
    s.y.push_back(k);
    s.x.push_back(sample_one(cfg.family, cfg.class_etas[static_cast<std::size_t>(k)], rng));
  }
  return s;
}

LabeledSample1D generate_fixed(const ExperimentConfig& cfg, std::span<const std::size_t> counts,
                               Rng& rng) {
  if (counts.size() != cfg.class_etas.size())
    fail(ErrorCode::InvalidArgument, "need one count per class");
  LabeledSample1D s;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    auto xs = sample(cfg.family, cfg.class_etas[k], rng, counts[k]);
    s.x.insert(s.x.end(), xs.begin(), xs.end());
    s.y.insert(s.y.end(), counts[k], static_cast<int>(k));
  }
  return s;
}

TrainTest generate_split(const ExperimentConfig& cfg, std::size_t trial) {
  Rng train_rng(derive_seed(cfg.seed, kTrainStream, trial));
  Rng test_rng(derive_seed(cfg.seed, kTestStream, trial));
  TrainTest out;
  out.train = generate_iid(cfg, cfg.n_train, train_rng);
  out.test = generate_iid(cfg, cfg.n_test, test_rng);
  return out;
}

std::array<std::size_t, 2> fixed_counts(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha outside (0, 1)");
  // The small offset keeps products such as 1000 * 0.7 from rounding down.
  const auto n1 = static_cast<std::size_t>(std::floor(static_cast<double>(n) * alpha + 1e-9));
  return {n - n1, n1};
}

std::vector<double> efficiency_grid(const ExperimentConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, kGridStream, 0));
  const std::size_t half = cfg.grid_points / 2;
  std::vector<double> grid;
  grid.reserve(cfg.grid_points);
  for (std::size_t k = 0; k < 2; ++k) {
    auto xs = sample(cfg.family, cfg.class_etas[k], rng, half);
    grid.insert(grid.end(), xs.begin(), xs.end());
  }
  return grid;
}

BenchmarkTable run_binary_benchmark(const ExperimentConfig& cfg, const RunOptions& opts) {
  require_two_classes(cfg, "binary benchmark");
  auto table = classification_table(cfg);
  classification_point(cfg, opts, table);
  return table;
}

BenchmarkTable run_multiclass_benchmark(const ExperimentConfig& cfg, const RunOptions& opts) {
  auto table = classification_table(cfg);
  classification_point(cfg, opts, table);
  return table;
}

BenchmarkTable run_sample_size_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  auto table = classification_table(cfg);
  const std::vector<std::size_t> ns = cfg.n_values.empty() ? std::vector{cfg.n_train} : cfg.n_values;
  for (std::size_t n : ns) {
    ExperimentConfig point = cfg;
    point.n_train = n;
    classification_point(point, opts, table);
  }
  return table;
}

BenchmarkTable run_imbalance_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  require_two_classes(cfg, "imbalance sweep");
  auto table = classification_table(cfg);
  const std::vector<double> alphas =
      cfg.alpha_values.empty() ? std::vector{cfg.alpha()} : cfg.alpha_values;
  for (double a : alphas) {
    ExperimentConfig point = cfg;
    point.priors = {1.0 - a, a};
    classification_point(point, opts, table);
  }
  return table;
}

BenchmarkTable run_unknown_k_ablation(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.family.kind() != FamilyKind::WeibullKnownShape)
    fail(ErrorCode::InvalidArgument, "shape ablation needs a weibull family");
  return run_sample_size_sweep(cfg, opts);
}

BenchmarkTable run_efficiency(const ExperimentConfig& cfg, const RunOptions& opts) {
  require_two_classes(cfg, "efficiency run");
  cfg.validate();
  if (cfg.family.dim() != 1)
    fail(ErrorCode::UnsupportedFamily, "efficiency runs need a scalar sufficient statistic");
  BenchmarkTable table;
  table.name = cfg.name;
  table.kind = TableKind::Efficiency;

  const double alpha = cfg.alpha();
  const auto& eta0 = cfg.class_etas[0];
  const auto& eta1 = cfg.class_etas[1];
  const std::vector<double> grid = efficiency_grid(cfg);
  std::vector<double> truth(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    truth[g] = true_log_odds(cfg.family, eta0, eta1, alpha, grid[g]);

  const auto& methods = cfg.methods;
  const std::vector<std::size_t> ns = cfg.n_values.empty() ? std::vector{cfg.n_train} : cfg.n_values;
  const std::size_t M = cfg.trials;
  const std::size_t G = grid.size();

  for (std::size_t n : ns) {
    const auto counts = fixed_counts(n, alpha);
    if (counts[0] < 2 || counts[1] < 2)
      fail(ErrorCode::InvalidArgument, "n = " + std::to_string(n) + " leaves a class with < 2 samples");

    // estimates[(m * M + t) * G + g]
    std::vector<double> estimates(methods.size() * M * G, kNaN);
    std::vector<char> failed(M, 0);
    parallel_for(M, opts.threads, [&](std::size_t t) {
      try {
        Rng rng(derive_seed(cfg.seed, kTrainStream, t));
        const auto train = generate_fixed(cfg, counts, rng);
        std::vector<double> local(methods.size() * G);
        for (std::size_t m = 0; m < methods.size(); ++m) {
          const Fitted fitted(methods[m], cfg, train);
          for (std::size_t g = 0; g < G; ++g) local[m * G + g] = fitted.log_odds(grid[g]);
        }
        for (std::size_t m = 0; m < methods.size(); ++m)
          std::copy_n(local.begin() + static_cast<std::ptrdiff_t>(m * G), G,
                      estimates.begin() + static_cast<std::ptrdiff_t>((m * M + t) * G));
      } catch (const Error&) {
        failed[t] = 1;
      }
    });

    std::vector<std::size_t> ok;
    for (std::size_t t = 0; t < M; ++t)
      if (!failed[t]) ok.push_back(t);

    double cr = 0.0;
    for (double x0 : grid)
      cr += cr_bound_log_odds({cfg.family, eta0, eta1, static_cast<double>(counts[0]),
                               static_cast<double>(counts[1]), x0});
    cr /= static_cast<double>(G);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      EfficiencyRow row;
      row.experiment = cfg.name;
      row.n = n;
      row.n0 = counts[0];
      row.n1 = counts[1];
      row.method = std::string(method_name(methods[m]));
      row.trials = M;
      row.failed = M - ok.size();
      row.cr_bound = cr;
      if (ok.size() >= 2) {
        std::vector<double> column(ok.size());
        for (std::size_t g = 0; g < G; ++g) {
          for (std::size_t i = 0; i < ok.size(); ++i)
            column[i] = estimates[(m * M + ok[i]) * G + g];
          const auto s = estimator_stats(column, truth[g]);
          row.variance += s.variance;
          row.mse += s.mse;
          row.bias_sq += s.bias * s.bias;
        }
        row.variance /= static_cast<double>(G);
        row.mse /= static_cast<double>(G);
        row.bias_sq /= static_cast<double>(G);
      } else {
        row.variance = row.mse = row.bias_sq = kNaN;
      }
      table.efficiency.push_back(std::move(row));

      if (opts.per_trial) {
        for (std::size_t t = 0; t < M; ++t) {
          TrialRow tr{cfg.name, n, alpha, t, std::string(method_name(methods[m])),
                      failed[t] != 0, kNaN, kNaN};
          if (!failed[t]) {
            double sq = 0.0, signed_err = 0.0;
            for (std::size_t g = 0; g < G; ++g) {
              const double d = estimates[(m * M + t) * G + g] - truth[g];
              sq += d * d;
              signed_err += d;
            }
            tr.value_a = sq / static_cast<double>(G);
            tr.value_b = signed_err / static_cast<double>(G);
          }
          table.trials.push_back(std::move(tr));
        }
      }
    }
  }
  return table;
}

}  // namespace efda
