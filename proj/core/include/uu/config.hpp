#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uu/data.hpp"
#include "uu/models.hpp"
#include "uu/optim.hpp"

namespace uu {

enum class Method { uu, uu_biased, ber_fc, ccn, oracle_pn, small_pn, small_pn_prior_shift };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

enum class DataSource { mixture, csv };

struct DataConfig {
  DataSource source = DataSource::mixture;
  /// Component means and sigma; `mixture.pi` mirrors `pi`.
  GaussianMixtureSpec mixture = GaussianMixtureSpec::two_dimensional(0.3);
  double pi = 0.3;
  double theta = 0.9;
  double theta_prime = 0.4;
  std::size_t n = 2000;
  std::size_t n_prime = 1000;
  std::size_t n_test = 10000;
  /// Size of each unlabeled validation set; 0 disables validation tracking.
  std::size_t n_val = 0;
  /// Training-time prior perturbation (eps, eps'); data keeps the true priors.
  std::pair<double, double> prior_eps{1.0, 1.0};
  /// CSV source: labeled pool used to build the U sets and the L baselines.
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;
  /// CSV source: subsample the test file so its positive fraction is pi.
  bool subsample_test_to_pi = false;
};

struct ModelConfig {
  ModelKind kind = ModelKind::linear;
  std::vector<std::size_t> hidden{64, 64, 64};
};

struct SweepConfig {
  std::vector<double> theta_prime;
  std::vector<std::pair<double, double>> eps;
  std::vector<std::size_t> n;
  /// sweep-sizes sets n' = n at each grid point.
  bool tie_n_prime = true;
  /// Methods run at every grid point (defaults to the experiment method).
  std::vector<Method> methods;
  /// Reference model for excess risk is trained on this multiple of the
  /// largest grid size.
  double reference_scale = 100.0;
  /// Epochs for the reference model; 0 means use train.epochs.
  int reference_epochs = 0;
  /// sweep-sizes scales epochs so every grid point takes as many optimizer
  /// steps as the base config would; otherwise small n also means few steps.
  bool equal_steps = false;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DataConfig data;
  Method method = Method::uu;
  ModelConfig model;
  TrainConfig train;
  SweepConfig sweep;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::filesystem::path out_dir = "out";
  /// Fraction of the labeled pool used by the small_pn baselines.
  double small_pn_fraction = 0.1;
  /// Record per-epoch test error in the history.
  bool track_test_error = false;
  /// Worker threads for seeds/grid points; 0 = hardware concurrency.
  std::size_t threads = 0;

  /// Throws Error(config) describing the first invalid field.
  void validate() const;
};

/// Parses the JSON experiment schema (see README); missing fields keep their
/// defaults, unknown fields are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo of a configuration (stable key order).
std::string config_to_json(const ExperimentConfig& config);

}  // namespace uu
