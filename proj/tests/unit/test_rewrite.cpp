#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uu/error.hpp"
#include "uu/losses.hpp"
#include "uu/rewrite.hpp"

using uu::PriorTriple;

namespace {

void expect_coeffs(const uu::CorrectionCoefficients& k, double a, double b, double c, double d) {
  EXPECT_NEAR(k.a, a, 1e-12);
  EXPECT_NEAR(k.b, b, 1e-12);
  EXPECT_NEAR(k.c, c, 1e-12);
  EXPECT_NEAR(k.d, d, 1e-12);
}

uu::ErrorKind kind_of_failure(auto&& fn) {
  try {
    fn();
  } catch (const uu::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return uu::ErrorKind::config;
}

}  // namespace

TEST(PriorTriple, Validation) {
  EXPECT_EQ(kind_of_failure([] { PriorTriple::make(0.3, 0.5, 0.5); }), uu::ErrorKind::degenerate_priors);
  EXPECT_EQ(kind_of_failure([] { PriorTriple::make(0.0, 0.9, 0.1); }), uu::ErrorKind::single_class);
  EXPECT_EQ(kind_of_failure([] { PriorTriple::make(1.0, 0.9, 0.1); }), uu::ErrorKind::single_class);
  EXPECT_EQ(kind_of_failure([] { PriorTriple::make(0.3, 1.1, 0.1); }), uu::ErrorKind::domain);
  EXPECT_EQ(kind_of_failure([] { PriorTriple::make(NAN, 0.9, 0.1); }), uu::ErrorKind::domain);
}

TEST(PriorTriple, SwapsIntoCanonicalOrder) {
  const auto p = PriorTriple::make(0.3, 0.4, 0.9);
  EXPECT_TRUE(p.swapped());
  EXPECT_DOUBLE_EQ(p.theta(), 0.9);
  EXPECT_DOUBLE_EQ(p.theta_prime(), 0.4);
  EXPECT_FALSE(PriorTriple::make(0.3, 0.9, 0.4).swapped());
}

TEST(CorrectionCoefficients, Examples) {
  for (double p : {0.1, 0.3, 0.5, 0.8}) expect_coeffs(uu::correction_coefficients(PriorTriple::make(p, 1, 0)), p, 0, 1 - p, 0);
  expect_coeffs(uu::correction_coefficients(PriorTriple::make(0.3, 0.9, 0.4)), 0.36, -0.56, 1.26, -0.06);
  for (double p : {0.2, 0.6}) expect_coeffs(uu::correction_coefficients(PriorTriple::make(p, 1, p)), p, -p, 1, 0);
}

TEST(CorrectionCoefficients, SolveLinearSystemAndSigns) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double pi = u(rng), t = u(rng), tp = u(rng);
    if (pi == 0.0 || t == tp) continue;
    const auto p = PriorTriple::make(pi, t, tp);
    const auto k = uu::correction_coefficients(p);
    const double th = p.theta(), thp = p.theta_prime();
    // Absolute residuals scale with the coefficient magnitude ~ 1/(theta - theta').
    const double tol = 1e-14 * (1.0 + std::abs(k.a) + std::abs(k.b) + std::abs(k.c) + std::abs(k.d));
    EXPECT_LE(std::abs(k.a * th + k.d * thp - pi), tol);
    EXPECT_LE(std::abs(k.b * th + k.c * thp), tol);
    EXPECT_LE(std::abs(k.a * (1 - th) + k.d * (1 - thp)), tol);
    EXPECT_LE(std::abs(k.b * (1 - th) + k.c * (1 - thp) - (1 - pi)), tol);
    if (thp > 0 && th < 1) {
      EXPECT_GT(k.a, 0);
      EXPECT_GT(k.c, 0);
      EXPECT_LE(k.b, 0);
      EXPECT_LE(k.d, 0);
    }
  }
}

TEST(CostWeights, Examples) {
  auto w = uu::cost_weights(PriorTriple::make(0.3, 0.9, 0.4));
  EXPECT_NEAR(w.alpha, 0.92, 1e-12);
  EXPECT_NEAR(w.alpha_prime, 1.32, 1e-12);
  EXPECT_NEAR(w.offset, 0.62, 1e-12);

  w = uu::cost_weights(PriorTriple::make(0.5, 1, 0));
  EXPECT_NEAR(w.alpha, 0.5, 1e-12);
  EXPECT_NEAR(w.alpha_prime, 0.5, 1e-12);
  EXPECT_NEAR(w.offset, 0.0, 1e-12);

  // (theta' + pi - 2 theta' pi)/(theta - theta') = 0.5/0.8.
  w = uu::cost_weights(PriorTriple::make(0.5, 0.9, 0.1));
  EXPECT_NEAR(w.alpha, 0.625, 1e-12);
  EXPECT_NEAR(w.alpha_prime, 0.625, 1e-12);
  EXPECT_NEAR(w.offset, 0.125, 1e-12);
}

TEST(CostWeights, ConsistentWithCoefficients) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const auto p = PriorTriple::make(u(rng), u(rng), u(rng));
    const auto k = uu::correction_coefficients(p);
    const auto w = uu::cost_weights(p);
    const auto w2 = uu::cost_weights(k);
    const double tol = 1e-12 * (1 + std::abs(w.alpha) + std::abs(w.alpha_prime));
    EXPECT_NEAR(w.alpha, k.a - k.b, tol);
    EXPECT_NEAR(w.alpha_prime, k.c - k.d, tol);
    EXPECT_NEAR(w.offset, -(k.b + k.d), tol);
    EXPECT_NEAR(w.alpha, w2.alpha, tol);
    const double th = p.theta(), thp = p.theta_prime(), pi = p.pi();
    EXPECT_NEAR(w.offset, (thp * (1 - pi) + (1 - th) * pi) / (th - thp), tol);
  }
}

TEST(CostWeights, InverselyProportionalToGap) {
  // With the midpoint fixed, alpha * (theta - theta') is affine in the gap.
  const double pi = 0.4, mid = 0.5;
  std::vector<double> gaps{0.1, 0.2, 0.4, 0.8};
  std::vector<double> scaled;
  for (double g : gaps) scaled.push_back(uu::cost_weights(PriorTriple::make(pi, mid + g / 2, mid - g / 2)).alpha * g);
  const double slope = (scaled[1] - scaled[0]) / (gaps[1] - gaps[0]);
  for (std::size_t i = 2; i < gaps.size(); ++i)
    EXPECT_NEAR(scaled[i], scaled[0] + slope * (gaps[i] - gaps[0]), 1e-12);
}

TEST(ClassifyReduction, Cases) {
  EXPECT_EQ(uu::classify_reduction(PriorTriple::make(0.3, 1, 0)), uu::Reduction::pn);
  EXPECT_EQ(uu::classify_reduction(PriorTriple::make(0.3, 1, 0.3)), uu::Reduction::pu);
  const double su = 0.16 / 0.52;  // pi^2/(2 pi^2 - 2 pi + 1) at pi = 0.4
  EXPECT_EQ(uu::classify_reduction(PriorTriple::make(0.4, 0.4, su)), uu::Reduction::su);
  EXPECT_EQ(uu::classify_reduction(PriorTriple::make(0.4, su, 0.4)), uu::Reduction::su);
  EXPECT_EQ(uu::classify_reduction(PriorTriple::make(0.4, 0.4, 0.32 / 0.52)), uu::Reduction::general);
  EXPECT_EQ(uu::classify_reduction(PriorTriple::make(0.3, 0.9, 0.4)), uu::Reduction::general);
  EXPECT_EQ(uu::to_string(uu::Reduction::su), "SU");
}

TEST(SingleSetWitness, Examples) {
  EXPECT_DOUBLE_EQ(*uu::single_set_witness(0.25).theta_required, -0.5);
  EXPECT_FALSE(uu::single_set_witness(0.5).theta_required.has_value());
  EXPECT_DOUBLE_EQ(*uu::single_set_witness(0.75).theta_required, 1.5);
  const auto w = uu::single_set_witness(0.3);
  EXPECT_DOUBLE_EQ(w.a, 0.3);
  EXPECT_DOUBLE_EQ(w.b, 0.7);
  EXPECT_THROW(uu::single_set_witness(0.0), uu::Error);
  EXPECT_THROW(uu::single_set_witness(1.0), uu::Error);
}

TEST(SingleSetWitness, NeverFeasibleOnGrid) {
  for (int k = 1; k <= 99; ++k) {
    const auto w = uu::single_set_witness(k / 100.0);
    EXPECT_FALSE(w.feasible());
    if (w.theta_required) EXPECT_TRUE(*w.theta_required < 0.0 || *w.theta_required > 1.0);
  }
}

TEST(SingleSetWitness, RefusesUnboundedLoss) {
  EXPECT_NO_THROW(uu::single_set_witness(0.3, uu::LossSpec::of(uu::LossKind::sigmoid)));
  EXPECT_THROW(uu::single_set_witness(0.3, uu::LossSpec::of(uu::LossKind::logistic)), uu::Error);
}

TEST(CcnCoefficients, Examples) {
  expect_coeffs(uu::ccn_backward_coefficients(PriorTriple::make(0.5, 1, 0)), 1, 0, 1, 0);
  expect_coeffs(uu::ccn_backward_coefficients(PriorTriple::make(0.3, 0.9, 0.4)), 1.2, -0.2, 1.8, -0.8);
  const auto k = uu::ccn_backward_coefficients(PriorTriple::make(0.3, 0.6, 0.4));
  EXPECT_NEAR(k.a, 3.0, 1e-12);
  EXPECT_NEAR(k.b, -2.0, 1e-12);
}

TEST(CcnCoefficients, UnbiasedUnderClassConditionalNoise) {
  // Noisy positive with flip rate r+ = 1 - theta, noisy negative with
  // r- = theta'. Expected corrected loss must equal the clean loss.
  const auto p = PriorTriple::make(0.3, 0.9, 0.4);
  const auto k = uu::ccn_backward_coefficients(p);
  const double rp = 1 - p.theta(), rm = p.theta_prime();
  for (double lpos : {0.1, 0.5, 0.9}) {
    for (double lneg : {0.2, 0.7}) {
      // Clean positive: observed + w.p. 1 - r+, observed - w.p. r+.
      const double pos = (1 - rp) * (k.a * lpos + k.b * lneg) + rp * (k.c * lneg + k.d * lpos);
      const double neg = (1 - rm) * (k.c * lneg + k.d * lpos) + rm * (k.a * lpos + k.b * lneg);
      EXPECT_NEAR(pos, lpos, 1e-12);
      EXPECT_NEAR(neg, lneg, 1e-12);
    }
  }
}
