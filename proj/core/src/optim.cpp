#include "uu/optim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "uu/error.hpp"
#include "uu/estimators.hpp"
#include "uu/rng.hpp"

namespace uu {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

class Objective {
 public:
  Objective(const CorrectionCoefficients& coeffs, const TrainConfig& cfg)
      : coeffs_(coeffs), weights_(cost_weights(coeffs)), cfg_(cfg) {
    if (cfg.estimator == ObjectiveForm::uu_sym && !cfg.loss.symmetric)
      throw Error(ErrorKind::precondition, "uu_sym objective needs a symmetric loss");
  }

  double value(const DecisionModel& m, const Matrix& a, const Matrix& b) const {
    return cfg_.estimator == ObjectiveForm::uu_sym ? cost_sensitive_risk(m, a, b, weights_, cfg_.loss)
                                                   : corrected_risk(m, a, b, coeffs_, cfg_.loss);
  }

  Vector gradient(const DecisionModel& m, const Matrix& a, const Matrix& b) const {
    return cfg_.estimator == ObjectiveForm::uu_sym ? risk_gradient_sym(m, a, b, weights_, cfg_.loss)
                                                   : risk_gradient(m, a, b, coeffs_, cfg_.loss);
  }

 private:
  CorrectionCoefficients coeffs_;
  CostWeights weights_;
  const TrainConfig& cfg_;
};

/// Cycles through a shuffled index set, reshuffling on every wrap.
class BatchStream {
 public:
  BatchStream(Eigen::Index n, Rng& rng) : order_(static_cast<std::size_t>(n)), rng_(rng) {
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  std::vector<Eigen::Index> next(std::size_t count) {
    std::vector<Eigen::Index> out;
    out.reserve(count);
    while (out.size() < count) {
      if (cursor_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        cursor_ = 0;
      }
      out.push_back(order_[cursor_++]);
    }
    return out;
  }

  void restart() {
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
  }

 private:
  std::vector<Eigen::Index> order_;
  std::size_t cursor_ = 0;
  Rng& rng_;
};

}  // namespace

std::string_view to_string(OptimizerKind k) noexcept { return k == OptimizerKind::sgd ? "sgd" : "adam"; }
std::string_view to_string(ObjectiveForm f) noexcept { return f == ObjectiveForm::uu ? "uu" : "uu_sym"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw Error(ErrorKind::config, "unknown optimizer '" + std::string(name) + "'");
}

ObjectiveForm parse_objective_form(std::string_view name) {
  if (name == "uu") return ObjectiveForm::uu;
  if (name == "uu_sym") return ObjectiveForm::uu_sym;
  throw Error(ErrorKind::config, "unknown estimator '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr))
    throw Error(ErrorKind::config, "initial_lr must be positive");
  if (!(decay >= 0.0) || !std::isfinite(decay)) throw Error(ErrorKind::config, "decay must be >= 0");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay))
    throw Error(ErrorKind::config, "weight_decay must be >= 0");
  if (batch_size == 0) throw Error(ErrorKind::config, "batch_size must be positive");
  if (epochs < 0) throw Error(ErrorKind::config, "epochs must be >= 0");
  if (!loss.trainable())
    throw Error(ErrorKind::unsupported_loss, "cannot train with the " + std::string(loss.name()) + " loss");
}

std::string history_to_csv(const TrainHistory& h) {
  std::string out = "epoch,train_risk,val_risk,test_error,lr\n";
  const auto num = [](double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
  };
  for (const auto& r : h.epochs) {
    out += std::to_string(r.epoch) + ',' + num(r.train_risk) + ',';
    if (r.val_risk) out += num(*r.val_risk);
    out += ',';
    if (r.test_error) out += num(*r.test_error);
    out += ',' + num(r.lr) + '\n';
  }
  return out;
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::config, "cannot open '" + path.string() + "' for writing");
  out << history_to_csv(history);
}

double lr_at_epoch(double initial_lr, double decay, int epoch) {
  return initial_lr / (1.0 + decay * static_cast<double>(epoch));
}

TrainResult train_corrected(DecisionModel model, const Matrix& first, const Matrix& second,
                            const CorrectionCoefficients& coeffs, const TrainConfig& cfg,
                            const TrainMonitors& monitors) {
  cfg.validate();
  if (first.rows() == 0 || second.rows() == 0)
    throw Error(ErrorKind::empty_sample, "training sets must be non-empty");
  if (static_cast<std::size_t>(first.cols()) != input_dim(model) ||
      static_cast<std::size_t>(second.cols()) != input_dim(model))
    throw Error(ErrorKind::shape, "training features do not match the model input dimension");

  const Objective objective(coeffs, cfg);
  TrainResult result{std::move(model), {}};
  if (cfg.epochs == 0) return result;

  Rng rng(derive_seed(cfg.seed, "shuffle"));
  const bool first_is_major = first.rows() >= second.rows();
  const Matrix& major = first_is_major ? first : second;
  const Matrix& minor = first_is_major ? second : first;
  BatchStream major_stream(major.rows(), rng);
  BatchStream minor_stream(minor.rows(), rng);

  const auto n_major = static_cast<std::size_t>(major.rows());
  const auto n_minor = static_cast<std::size_t>(minor.rows());
  const std::size_t batch = std::min(cfg.batch_size, n_major);
  const std::size_t steps = (n_major + batch - 1) / batch;

  Vector params = flat_params(result.model);
  Vector adam_m = Vector::Zero(params.size());
  Vector adam_v = Vector::Zero(params.size());
  long long t = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Overflowing scores surface as domain errors from the loss; they mean
    // the run diverged, not that the inputs were bad.
    try {
      const double lr = lr_at_epoch(cfg.initial_lr, cfg.decay, epoch);
      major_stream.restart();
      for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t m = std::min(batch, n_major - s * batch);
        const Matrix xb_major = major(major_stream.next(m), Eigen::all);
        const Matrix xb_minor = minor(minor_stream.next(std::min(m, n_minor)), Eigen::all);
        const Matrix& xa = first_is_major ? xb_major : xb_minor;
        const Matrix& xb = first_is_major ? xb_minor : xb_major;

        Vector grad = objective.gradient(result.model, xa, xb);
        if (cfg.weight_decay > 0.0) grad += cfg.weight_decay * params;
        if (!grad.allFinite()) throw AbortedRun(epoch, "non-finite gradient");

        ++result.history.batches;
        if (objective.value(result.model, xa, xb) < 0.0) ++result.history.negative_batches;

        if (cfg.optimizer == OptimizerKind::sgd) {
          params -= lr * grad;
        } else {
          ++t;
          adam_m = kAdamBeta1 * adam_m + (1.0 - kAdamBeta1) * grad;
          adam_v = kAdamBeta2 * adam_v + (1.0 - kAdamBeta2) * grad.cwiseAbs2();
          const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
          const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
          params.array() -= lr * (adam_m.array() / c1) / ((adam_v.array() / c2).sqrt() + kAdamEps);
        }
        if (!params.allFinite()) throw AbortedRun(epoch, "parameters diverged");
        set_flat_params(result.model, params);
      }

      EpochRecord rec;
      rec.epoch = epoch;
      rec.lr = lr;
      rec.train_risk = objective.value(result.model, first, second);
      if (!std::isfinite(rec.train_risk)) throw AbortedRun(epoch, "training risk is not finite");
      if (rec.train_risk < 0.0) ++result.history.negative_risk_epochs;
      if (monitors.val_first != nullptr && monitors.val_second != nullptr)
        rec.val_risk = objective.value(result.model, *monitors.val_first, *monitors.val_second);
      if (monitors.test != nullptr) rec.test_error = zero_one_test_error(result.model, *monitors.test).value;
      result.history.epochs.push_back(rec);
    } catch (const AbortedRun&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::domain) throw;
      throw AbortedRun(epoch, std::string("numerical failure: ") + e.what());
    }
  }
  return result;
}

TrainResult train(DecisionModel model, const UnlabeledSet& first, const UnlabeledSet& second,
                  const PriorTriple& priors, const TrainConfig& cfg, const UnlabeledSet* val_first,
                  const UnlabeledSet* val_second, const LabeledSet* test) {
  const bool swap = priors.swapped();
  const UnlabeledSet& hi = swap ? second : first;
  const UnlabeledSet& lo = swap ? first : second;
  TrainMonitors monitors;
  if (val_first != nullptr && val_second != nullptr) {
    monitors.val_first = swap ? &val_second->features : &val_first->features;
    monitors.val_second = swap ? &val_first->features : &val_second->features;
  }
  monitors.test = test;
  return train_corrected(std::move(model), hi.features, lo.features, correction_coefficients(priors),
                         cfg, monitors);
}

std::size_t select_model(std::span<const Candidate> candidates, const UnlabeledSet& val_first,
                         const UnlabeledSet& val_second, const PriorTriple& priors,
                         const LossSpec& loss) {
  if (candidates.empty()) throw Error(ErrorKind::config, "no candidates to select from");
  std::size_t best = 0;
  double best_risk = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double r = empirical_risk_uu(candidates[i].model, val_first, val_second, priors, loss).value;
    if (i == 0 || r < best_risk) {
      best = i;
      best_risk = r;
    }
  }
  return best;
}

}  // namespace uu
