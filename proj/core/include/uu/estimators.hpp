#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "uu/data.hpp"
#include "uu/losses.hpp"
#include "uu/models.hpp"
#include "uu/rewrite.hpp"

namespace uu {

enum class EstimatorKind { pn, uu, uu_sym, pu, balanced, zero_one_error };

std::string_view to_string(EstimatorKind kind) noexcept;

/// An empirical risk value. UU-type estimates are unbiased but not
/// nonnegative; negative values are reported as-is.
struct RiskEstimate {
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::uu;
  std::size_t n = 0;
  std::size_t n_prime = 0;
};

/// {"kind", "value", "n", "n_prime"}
std::string to_json(const RiskEstimate& estimate);

/// The generic corrected risk behind every two-set estimator:
///   (1/n) sum_i [a l(g(x_i)) + b l(-g(x_i))] + (1/n') sum_j [d l(g(x'_j)) + c l(-g(x'_j))].
double corrected_risk(const DecisionModel& model, const Matrix& first, const Matrix& second,
                      const CorrectionCoefficients& coeffs, const LossSpec& loss);

/// alpha mean l(g(x)) + alpha' mean l(-g(x')) - offset.
double cost_sensitive_risk(const DecisionModel& model, const Matrix& first, const Matrix& second,
                           const CostWeights& weights, const LossSpec& loss);

/// Supervised estimate (pi/n) sum l(g(x)) + ((1-pi)/n') sum l(-g(x')).
RiskEstimate empirical_risk_pn(const DecisionModel& model, const Matrix& pos, const Matrix& neg,
                               double pi, const LossSpec& loss);

/// Unbiased risk from two unlabeled sets. `first` and `second` are given in
/// the order their priors were passed to PriorTriple::make; the sets are
/// exchanged internally when the triple was re-oriented.
RiskEstimate empirical_risk_uu(const DecisionModel& model, const UnlabeledSet& first,
                               const UnlabeledSet& second, const PriorTriple& priors,
                               const LossSpec& loss);

/// Cost-sensitive simplification of `empirical_risk_uu`; requires a symmetric loss.
RiskEstimate empirical_risk_uu_sym(const DecisionModel& model, const UnlabeledSet& first,
                                   const UnlabeledSet& second, const PriorTriple& priors,
                                   const LossSpec& loss);

/// Positive-unlabeled estimate
///   (1/n) sum pi l(g(x)) - (1/n) sum pi l(-g(x)) + (1/n') sum l(-g(x'))
/// over positives `pos` and unlabeled `unl` drawn with prior pi.
RiskEstimate empirical_risk_pu(const DecisionModel& model, const Matrix& pos, const Matrix& unl,
                               double pi, const LossSpec& loss);

/// (1/2) mean l(g(x)) over P + (1/2) mean l(-g(x)) over N.
RiskEstimate empirical_balanced_risk(const DecisionModel& model, const Matrix& pos,
                                     const Matrix& neg, const LossSpec& loss);

/// Fraction of rows with y g(x) < 0; g(x) == 0 counts as half an error.
RiskEstimate zero_one_test_error(const DecisionModel& model, const LabeledSet& test);

/// Exact R(g) = pi E_P[l(g)] + (1 - pi) E_N[l(-g)] for a linear scorer on an
/// isotropic Gaussian mixture. Zero-one uses the normal CDF; smooth losses
/// use adaptive Gauss-Kronrod on the projected 1-D Gaussian (+-10 sd).
double true_risk_gaussian(const DecisionModel& model, const GaussianMixtureSpec& spec,
                          const LossSpec& loss);

/// Bayes-optimal linear scorer log p(+|x) - log p(-|x) for the mixture.
LinearModel bayes_scorer(const GaussianMixtureSpec& spec);

double bayes_error_gaussian(const GaussianMixtureSpec& spec);

double normal_cdf(double x) noexcept;

}  // namespace uu
