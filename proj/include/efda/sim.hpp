#pragma once

#include "efda/config.hpp"
#include "efda/rng.hpp"
#include "efda/table.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace efda {

struct RunOptions {
  unsigned threads = 1;    // 0 = one per hardware thread
  bool per_trial = false;  // also fill BenchmarkTable::trials
};

struct LabeledSample1D {
  std::vector<double> x;
  std::vector<int> y;
};

struct TrainTest {
  LabeledSample1D train;
  LabeledSample1D test;
};

// Stream identifiers for derive_seed. Training and test draws use separate
// streams so the test set of a trial does not depend on n_train.
inline constexpr std::uint64_t kTrainStream = 0x7472'6169'6eULL;
inline constexpr std::uint64_t kTestStream = 0x7465'7374ULL;
inline constexpr std::uint64_t kGridStream = 0x6772'6964ULL;

// Benchmark mode: i.i.d. labels from config.priors, features from the class
// conditionals. Depends only on (config, trial).
TrainTest generate_split(const ExperimentConfig& config, std::size_t trial);

// n draws with labels sampled from config.priors.
LabeledSample1D generate_iid(const ExperimentConfig& config, std::size_t n, Rng& rng);

// counts[k] draws from class k, labels in class order.
LabeledSample1D generate_fixed(const ExperimentConfig& config,
                               std::span<const std::size_t> counts, Rng& rng);

// Efficiency-mode class sizes: N1 = floor(n * alpha), N0 = n - N1.
std::array<std::size_t, 2> fixed_counts(std::size_t n, double alpha);

// The evaluation grid of an efficiency run: grid_points / 2 draws per class.
std::vector<double> efficiency_grid(const ExperimentConfig& config);

BenchmarkTable run_binary_benchmark(const ExperimentConfig& config, const RunOptions& opts = {});
BenchmarkTable run_multiclass_benchmark(const ExperimentConfig& config,
                                        const RunOptions& opts = {});
// One classification point per n in config.n_values (n_train when empty).
BenchmarkTable run_sample_size_sweep(const ExperimentConfig& config, const RunOptions& opts = {});
// One classification point per alpha in config.alpha_values; two classes only.
BenchmarkTable run_imbalance_sweep(const ExperimentConfig& config, const RunOptions& opts = {});
// Sample-size sweep on a Weibull family; efda_khat replaces the known shape
// with one pooled profile-MLE estimate per trial.
BenchmarkTable run_unknown_k_ablation(const ExperimentConfig& config,
                                      const RunOptions& opts = {});
BenchmarkTable run_efficiency(const ExperimentConfig& config, const RunOptions& opts = {});

}  // namespace efda
