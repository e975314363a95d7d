#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uu/config.hpp"
#include "uu/models.hpp"
#include "uu/optim.hpp"

namespace uu {

struct Summary {
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator); 0 for a single value.
  double std = 0.0;
};

Summary summarize(std::span<const double> values);

struct RunResult {
  std::uint64_t seed = 0;
  /// Zero-one error on the sampled (or loaded) test set.
  double test_error = 0.0;
  /// Exact zero-one risk, available for linear models on mixture data.
  std::optional<double> true_error;
  double final_train_risk = 0.0;
  TrainHistory history;
  DecisionModel model;
};

struct ExperimentResult {
  Method method = Method::uu;
  std::string config_json;
  std::vector<RunResult> runs;
  Summary test_error;
  std::optional<Summary> true_error;
  double wall_clock_seconds = 0.0;

  /// true_error when every run has it, test_error otherwise.
  std::vector<double> headline_errors() const;
  Summary headline() const;
};

/// Trains the configured method for one seed. Every method shares the data
/// draw, model initialisation and shuffling derived from `seed`, so methods
/// differ only in the objective they minimise.
RunResult run_method(const ExperimentConfig& config, std::uint64_t seed);

/// All configured seeds (run concurrently, aggregated in seed order).
ExperimentResult run_experiment(const ExperimentConfig& config);

/// One result per method in `config.sweep.methods` (all methods if empty).
std::vector<ExperimentResult> run_baselines(const ExperimentConfig& config);

struct SweepPoint {
  std::string parameter;
  std::vector<double> value;
  Method method = Method::uu;
  std::optional<ExperimentResult> result;
  /// Set instead of `result` when this grid point could not run.
  std::string error;
};

/// Moves theta' over `grid`; one point per (method, value), paired seeds.
std::vector<SweepPoint> sweep_closeness(const ExperimentConfig& base, std::span<const double> grid);

/// Trains with perturbed priors (eps theta, eps' theta') while the data keeps
/// the true ones.
std::vector<SweepPoint> sweep_robustness(const ExperimentConfig& base,
                                         std::span<const std::pair<double, double>> grid);

struct SizeSweep {
  std::vector<SweepPoint> points;
  /// Zero-one risk of the reference model trained on the enlarged sample.
  double reference_error = 0.0;
  std::optional<double> bayes_error;
  /// Mean over seeds of (error - reference_error), per point.
  std::vector<double> mean_excess;
  /// Least-squares slope of log(mean_excess) on log(n); NaN if any excess <= 0.
  double slope = 0.0;
};

/// Moves n over `grid` (and n' with it when sweep.tie_n_prime).
SizeSweep sweep_sizes(const ExperimentConfig& base, std::span<const std::size_t> grid);

/// Least-squares slope of log(y) on log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Ordered JSON document; `include_wall_clock` false gives the
/// reproducibility-comparable form.
std::string result_to_json(const ExperimentResult& result, bool include_wall_clock = true);

/// result.json plus seed_<s>/history.csv and seed_<s>/model.json.
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result);

/// parameter,value,method,mean_error,std_error,mean_test_error,std_test_error,error
std::string sweep_summary_csv(std::span<const SweepPoint> points);
void write_sweep(const std::filesystem::path& dir, std::span<const SweepPoint> points);

/// Runs `task(i)` for i in [0, count) on up to `threads` workers (0 = all
/// cores). The first exception, by index, is rethrown after all tasks finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task);

}  // namespace uu
