#pragma once

#include <optional>
#include <string_view>

#include "uu/losses.hpp"

namespace uu {

/// Class priors (pi, theta, theta') of the test distribution and the two
/// unlabeled marginals. Always stored with theta > theta'; `swapped()` reports
/// whether the caller's two sets must be exchanged to match.
class PriorTriple {
 public:
  /// Validates 0 < pi < 1, theta/theta' in [0, 1], theta != theta', and
  /// orients so that theta > theta'.
  static PriorTriple make(double pi, double theta, double theta_prime);

  double pi() const noexcept { return pi_; }
  double theta() const noexcept { return theta_; }
  double theta_prime() const noexcept { return theta_prime_; }
  bool swapped() const noexcept { return swapped_; }

  /// Same marginals, different test prior.
  PriorTriple with_pi(double pi) const;

 private:
  PriorTriple(double pi, double theta, double theta_prime, bool swapped)
      : pi_(pi), theta_(theta), theta_prime_(theta_prime), swapped_(swapped) {}

  double pi_;
  double theta_;
  double theta_prime_;
  bool swapped_;
};

/// Corrected losses l+(z) = a l(z) + b l(-z) on the first set and
/// l-(z) = c l(z) + d l(-z) on the second, the latter evaluated at -g(x').
struct CorrectionCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// Cost-sensitive form valid for symmetric losses:
/// alpha * mean l(g(x)) + alpha' * mean l(-g(x')) - offset.
struct CostWeights {
  double alpha = 0.0;
  double alpha_prime = 0.0;
  double offset = 0.0;
};

enum class Reduction { pn, pu, su, general };

std::string_view to_string(Reduction r) noexcept;

struct InfeasibilityWitness {
  double a = 0.0;  ///< = pi, forced by the all-positive probe classifier
  double b = 0.0;  ///< = 1 - pi, forced by the all-negative probe classifier
  /// pi / (2 pi - 1); empty when pi == 1/2.
  std::optional<double> theta_required;

  /// A single-set rewrite would need theta_required to be a valid prior.
  bool feasible() const noexcept {
    return theta_required && *theta_required >= 0.0 && *theta_required <= 1.0;
  }
};

CorrectionCoefficients correction_coefficients(const PriorTriple& priors);

CostWeights cost_weights(const PriorTriple& priors);

/// Collapses a generic coefficient set into cost weights using
/// l(z) + l(-z) = 1: alpha = a - b, alpha' = c - d, offset = -(b + d).
CostWeights cost_weights(const CorrectionCoefficients& coeffs) noexcept;

Reduction classify_reduction(const PriorTriple& priors);

InfeasibilityWitness single_set_witness(double pi);

/// Refuses losses outside the bounded family the impossibility argument
/// covers (currently: logistic).
InfeasibilityWitness single_set_witness(double pi, const LossSpec& loss);

/// Backward correction for class-conditional label noise, treating the first
/// set as noisy positives (flip rate 1 - theta) and the second as noisy
/// negatives (flip rate theta'). Uses the same (a, b, c, d) layout as
/// `correction_coefficients`.
CorrectionCoefficients ccn_backward_coefficients(const PriorTriple& priors);

}  // namespace uu
