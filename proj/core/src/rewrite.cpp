#include "uu/rewrite.hpp"

#include <cmath>

#include "uu/error.hpp"

namespace uu {
namespace {

constexpr double kSuTolerance = 1e-9;

void require_valid_pi(double pi) {
  if (!std::isfinite(pi) || pi < 0.0 || pi > 1.0)
    throw Error(ErrorKind::domain, "class prior pi must lie in (0, 1)");
  if (pi == 0.0 || pi == 1.0)
    throw Error(ErrorKind::single_class, "pi in {0, 1} leaves a single class");
}

}  // namespace

PriorTriple PriorTriple::make(double pi, double theta, double theta_prime) {
  require_valid_pi(pi);
  for (double t : {theta, theta_prime}) {
    if (!std::isfinite(t) || t < 0.0 || t > 1.0)
      throw Error(ErrorKind::domain, "marginal priors must lie in [0, 1]");
  }
  if (theta == theta_prime)
    throw Error(ErrorKind::degenerate_priors, "theta and theta' must differ");
  if (theta > theta_prime) return PriorTriple(pi, theta, theta_prime, false);
  return PriorTriple(pi, theta_prime, theta, true);
}

PriorTriple PriorTriple::with_pi(double pi) const {
  require_valid_pi(pi);
  return PriorTriple(pi, theta_, theta_prime_, swapped_);
}

std::string_view to_string(Reduction r) noexcept {
  switch (r) {
    case Reduction::pn: return "PN";
    case Reduction::pu: return "PU";
    case Reduction::su: return "SU";
    case Reduction::general: return "General";
  }
  return "General";
}

CorrectionCoefficients correction_coefficients(const PriorTriple& priors) {
  const double pi = priors.pi();
  const double t = priors.theta();
  const double tp = priors.theta_prime();
  const double gap = t - tp;
  return {
      (1.0 - tp) * pi / gap,
      -tp * (1.0 - pi) / gap,
      t * (1.0 - pi) / gap,
      -(1.0 - t) * pi / gap,
  };
}

CostWeights cost_weights(const PriorTriple& priors) {
  const double pi = priors.pi();
  const double t = priors.theta();
  const double tp = priors.theta_prime();
  const double gap = t - tp;
  return {
      (tp + pi - 2.0 * tp * pi) / gap,
      (t + pi - 2.0 * t * pi) / gap,
      (tp * (1.0 - pi) + (1.0 - t) * pi) / gap,
  };
}

CostWeights cost_weights(const CorrectionCoefficients& k) noexcept {
  return {k.a - k.b, k.c - k.d, -(k.b + k.d)};
}

Reduction classify_reduction(const PriorTriple& priors) {
  const double pi = priors.pi();
  const double t = priors.theta();
  const double tp = priors.theta_prime();
  if (t == 1.0 && tp == 0.0) return Reduction::pn;
  if (t == 1.0 && tp == pi) return Reduction::pu;

  // Similar-unlabeled: one marginal at pi, the other at pi^2 / (2pi^2 - 2pi + 1).
  const double su = pi * pi / (2.0 * pi * pi - 2.0 * pi + 1.0);
  const auto near = [](double x, double y) { return std::abs(x - y) <= kSuTolerance; };
  if ((near(t, pi) && near(tp, su)) || (near(t, su) && near(tp, pi))) return Reduction::su;
  return Reduction::general;
}

InfeasibilityWitness single_set_witness(double pi) {
  require_valid_pi(pi);
  InfeasibilityWitness w;
  w.a = pi;
  w.b = 1.0 - pi;
  // The perfect separator forces theta*b + (1 - theta)*a = 0.
  if (pi != 0.5) w.theta_required = pi / (2.0 * pi - 1.0);
  return w;
}

InfeasibilityWitness single_set_witness(double pi, const LossSpec& loss) {
  if (loss.kind == LossKind::logistic)
    throw Error(ErrorKind::unsupported_loss,
                "the single-set witness only covers bounded losses with l(+inf) < l(-inf)");
  return single_set_witness(pi);
}

CorrectionCoefficients ccn_backward_coefficients(const PriorTriple& priors) {
  const double rho_pos = 1.0 - priors.theta();
  const double rho_neg = priors.theta_prime();
  const double denom = 1.0 - rho_pos - rho_neg;
  if (!(denom > 0.0))
    throw Error(ErrorKind::degenerate_priors, "CCN correction needs theta > theta'");
  return {
      (1.0 - rho_neg) / denom,
      -rho_pos / denom,
      (1.0 - rho_pos) / denom,
      -rho_neg / denom,
  };
}

}  // namespace uu
