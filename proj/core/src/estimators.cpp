#include "uu/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "uu/error.hpp"

namespace uu {
namespace {

void require_nonempty(const Matrix& m, std::string_view what) {
  if (m.rows() == 0) throw Error(ErrorKind::empty_sample, std::string(what) + " is empty");
}

/// mean over rows of (w_plus * l(g) + w_minus * l(-g))
double mean_mixed_loss(const Vector& scores, double w_plus, double w_minus, const LossSpec& loss) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (w_plus != 0.0) acc += w_plus * loss_value(loss, s);
    if (w_minus != 0.0) acc += w_minus * loss_value(loss, -s);
  }
  return acc / static_cast<double>(scores.size());
}

std::pair<const UnlabeledSet*, const UnlabeledSet*> oriented(const UnlabeledSet& first,
                                                             const UnlabeledSet& second,
                                                             const PriorTriple& priors) {
  if (priors.swapped()) return {&second, &first};
  return {&first, &second};
}

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::pn: return "pn";
    case EstimatorKind::uu: return "uu";
    case EstimatorKind::uu_sym: return "uu_sym";
    case EstimatorKind::pu: return "pu";
    case EstimatorKind::balanced: return "balanced";
    case EstimatorKind::zero_one_error: return "zero_one_error";
  }
  return "unknown";
}

std::string to_json(const RiskEstimate& e) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(e.kind);
  j["value"] = e.value;
  j["n"] = e.n;
  j["n_prime"] = e.n_prime;
  return j.dump();
}

double corrected_risk(const DecisionModel& model, const Matrix& first, const Matrix& second,
                      const CorrectionCoefficients& k, const LossSpec& loss) {
  require_nonempty(first, "first sample");
  require_nonempty(second, "second sample");
  return mean_mixed_loss(score_batch(model, first), k.a, k.b, loss) +
         mean_mixed_loss(score_batch(model, second), k.d, k.c, loss);
}

double cost_sensitive_risk(const DecisionModel& model, const Matrix& first, const Matrix& second,
                           const CostWeights& w, const LossSpec& loss) {
  require_nonempty(first, "first sample");
  require_nonempty(second, "second sample");
  return mean_mixed_loss(score_batch(model, first), w.alpha, 0.0, loss) +
         mean_mixed_loss(score_batch(model, second), 0.0, w.alpha_prime, loss) - w.offset;
}

RiskEstimate empirical_risk_pn(const DecisionModel& model, const Matrix& pos, const Matrix& neg,
                               double pi, const LossSpec& loss) {
  if (!(pi > 0.0 && pi < 1.0)) throw Error(ErrorKind::domain, "pi must lie in (0, 1)");
  require_nonempty(pos, "positive sample");
  require_nonempty(neg, "negative sample");
  const double value = mean_mixed_loss(score_batch(model, pos), pi, 0.0, loss) +
                       mean_mixed_loss(score_batch(model, neg), 0.0, 1.0 - pi, loss);
  return {value, EstimatorKind::pn, static_cast<std::size_t>(pos.rows()),
          static_cast<std::size_t>(neg.rows())};
}

RiskEstimate empirical_risk_uu(const DecisionModel& model, const UnlabeledSet& first,
                               const UnlabeledSet& second, const PriorTriple& priors,
                               const LossSpec& loss) {
  const auto [hi, lo] = oriented(first, second, priors);
  const double value =
      corrected_risk(model, hi->features, lo->features, correction_coefficients(priors), loss);
  return {value, EstimatorKind::uu, hi->size(), lo->size()};
}

RiskEstimate empirical_risk_uu_sym(const DecisionModel& model, const UnlabeledSet& first,
                                   const UnlabeledSet& second, const PriorTriple& priors,
                                   const LossSpec& loss) {
  if (!loss.symmetric)
    throw Error(ErrorKind::precondition,
                "simplified estimator needs a symmetric loss, got " + std::string(loss.name()));
  const auto [hi, lo] = oriented(first, second, priors);
  const double value =
      cost_sensitive_risk(model, hi->features, lo->features, cost_weights(priors), loss);
  return {value, EstimatorKind::uu_sym, hi->size(), lo->size()};
}

RiskEstimate empirical_risk_pu(const DecisionModel& model, const Matrix& pos, const Matrix& unl,
                               double pi, const LossSpec& loss) {
  if (!(pi > 0.0 && pi < 1.0)) throw Error(ErrorKind::domain, "pi must lie in (0, 1)");
  require_nonempty(pos, "positive sample");
  require_nonempty(unl, "unlabeled sample");
  const Vector sp = score_batch(model, pos);
  const Vector su = score_batch(model, unl);
  double pos_term = 0.0;
  double pos_neg_term = 0.0;
  for (Eigen::Index i = 0; i < sp.size(); ++i) {
    pos_term += pi * loss_value(loss, sp[i]);
    pos_neg_term += pi * loss_value(loss, -sp[i]);
  }
  double unl_term = 0.0;
  for (Eigen::Index j = 0; j < su.size(); ++j) unl_term += loss_value(loss, -su[j]);
  const double n = static_cast<double>(sp.size());
  const double value = pos_term / n - pos_neg_term / n + unl_term / static_cast<double>(su.size());
  return {value, EstimatorKind::pu, static_cast<std::size_t>(sp.size()),
          static_cast<std::size_t>(su.size())};
}

RiskEstimate empirical_balanced_risk(const DecisionModel& model, const Matrix& pos,
                                     const Matrix& neg, const LossSpec& loss) {
  require_nonempty(pos, "positive sample");
  require_nonempty(neg, "negative sample");
  const double value = mean_mixed_loss(score_batch(model, pos), 0.5, 0.0, loss) +
                       mean_mixed_loss(score_batch(model, neg), 0.0, 0.5, loss);
  return {value, EstimatorKind::balanced, static_cast<std::size_t>(pos.rows()),
          static_cast<std::size_t>(neg.rows())};
}

RiskEstimate zero_one_test_error(const DecisionModel& model, const LabeledSet& test) {
  if (test.size() == 0) throw Error(ErrorKind::empty_sample, "test set is empty");
  const Vector s = score_batch(model, test.features);
  double errors = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double margin = test.labels[i] * s[i];
    if (margin < 0.0) {
      errors += 1.0;
    } else if (margin == 0.0) {
      errors += 0.5;
    }
  }
  return {errors / static_cast<double>(s.size()), EstimatorKind::zero_one_error, test.size(), 0};
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double true_risk_gaussian(const DecisionModel& model, const GaussianMixtureSpec& spec,
                          const LossSpec& loss) {
  const auto* lin = std::get_if<LinearModel>(&model);
  if (lin == nullptr)
    throw Error(ErrorKind::unsupported_model, "exact Gaussian risk needs a linear scorer");
  spec.validate();
  if (static_cast<std::size_t>(lin->weights.size()) != spec.dim())
    throw Error(ErrorKind::shape, "model and mixture dimensions differ");

  // Zero-one risk only depends on the direction of (w, b); rescaling keeps
  // huge trained weights from overflowing below.
  double scale = 1.0;
  if (loss.kind == LossKind::zero_one) {
    scale = std::max(lin->weights.cwiseAbs().maxCoeff(), std::abs(lin->bias));
    if (scale == 0.0) scale = 1.0;
  }
  // g(X) | class is N(mean, sd^2) with mean = w'mu + b, sd = sigma ||w||.
  const Vector w = lin->weights / scale;
  const double b = lin->bias / scale;
  const double m_pos = w.dot(spec.mean_pos) + b;
  const double m_neg = w.dot(spec.mean_neg) + b;
  const double sd = spec.sigma * w.norm();

  if (sd == 0.0) {
    return spec.pi * loss_value(loss, m_pos) + (1.0 - spec.pi) * loss_value(loss, -m_neg);
  }

  if (loss.kind == LossKind::zero_one) {
    // P(g < 0 | +) and P(g > 0 | -); ties have probability zero.
    return spec.pi * normal_cdf(-m_pos / sd) + (1.0 - spec.pi) * normal_cdf(m_neg / sd);
  }

  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const auto expect = [&](double mean, double sign) {
    const auto f = [&](double t) {
      return loss_value(loss, sign * (mean + sd * t)) * inv_sqrt_2pi * std::exp(-0.5 * t * t);
    };
    double err = 0.0;
    return Quad::integrate(f, -10.0, 10.0, 20, 1e-13, &err);
  };
  return spec.pi * expect(m_pos, 1.0) + (1.0 - spec.pi) * expect(m_neg, -1.0);
}

LinearModel bayes_scorer(const GaussianMixtureSpec& spec) {
  spec.validate();
  const double var = spec.sigma * spec.sigma;
  LinearModel m;
  m.weights = (spec.mean_pos - spec.mean_neg) / var;
  m.bias = -(spec.mean_pos.squaredNorm() - spec.mean_neg.squaredNorm()) / (2.0 * var) +
           std::log(spec.pi / (1.0 - spec.pi));
  return m;
}

double bayes_error_gaussian(const GaussianMixtureSpec& spec) {
  return true_risk_gaussian(bayes_scorer(spec), spec, LossSpec::of(LossKind::zero_one));
}

}  // namespace uu
