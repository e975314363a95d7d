#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uu/data.hpp"
#include "uu/losses.hpp"
#include "uu/models.hpp"
#include "uu/rewrite.hpp"

namespace uu {

enum class OptimizerKind { sgd, adam };
/// uu: corrected-loss form; uu_sym: cost-sensitive form (symmetric losses).
enum class ObjectiveForm { uu, uu_sym };

std::string_view to_string(OptimizerKind k) noexcept;
std::string_view to_string(ObjectiveForm f) noexcept;
OptimizerKind parse_optimizer(std::string_view name);
ObjectiveForm parse_objective_form(std::string_view name);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::sgd;
  double initial_lr = 0.01;
  double decay = 0.0;
  std::size_t batch_size = 128;
  int epochs = 100;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  LossSpec loss = LossSpec::of(LossKind::sigmoid);
  ObjectiveForm estimator = ObjectiveForm::uu;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_risk = 0.0;
  std::optional<double> val_risk;
  std::optional<double> test_error;
  double lr = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  /// Epochs whose full training risk came out negative.
  int negative_risk_epochs = 0;
  std::size_t negative_batches = 0;
  std::size_t batches = 0;
};

/// Columns: epoch,train_risk,val_risk,test_error,lr (missing values empty).
std::string history_to_csv(const TrainHistory& history);
void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);

struct TrainResult {
  DecisionModel model;
  TrainHistory history;
};

/// Optional held-out data monitored once per epoch.
struct TrainMonitors {
  const Matrix* val_first = nullptr;
  const Matrix* val_second = nullptr;
  const LabeledSet* test = nullptr;
};

/// initial_lr / (1 + decay * epoch)
double lr_at_epoch(double initial_lr, double decay, int epoch);

/// Minibatch training of any two-set corrected objective (UU, PN, CCN, ...).
///
/// An epoch is one pass over the larger set; the smaller set is drawn in
/// equal-sized batches from its own shuffle, reshuffling when it wraps.
/// Weight decay adds `weight_decay * params` to every gradient. Non-finite
/// parameters or gradients abort with AbortedRun.
TrainResult train_corrected(DecisionModel model, const Matrix& first, const Matrix& second,
                            const CorrectionCoefficients& coeffs, const TrainConfig& cfg,
                            const TrainMonitors& monitors = {});

/// UU learning: `first` and `second` in the order their priors were given to
/// PriorTriple::make.
TrainResult train(DecisionModel model, const UnlabeledSet& first, const UnlabeledSet& second,
                  const PriorTriple& priors, const TrainConfig& cfg,
                  const UnlabeledSet* val_first = nullptr, const UnlabeledSet* val_second = nullptr,
                  const LabeledSet* test = nullptr);

struct Candidate {
  TrainConfig config;
  DecisionModel model;
};

/// Index of the candidate with the lowest UU risk on the validation pair
/// (lowest index on ties).
std::size_t select_model(std::span<const Candidate> candidates, const UnlabeledSet& val_first,
                         const UnlabeledSet& val_second, const PriorTriple& priors,
                         const LossSpec& loss);

}  // namespace uu
