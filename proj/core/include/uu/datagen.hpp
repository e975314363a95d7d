#pragma once

#include <cstddef>
#include <cstdint>

#include "uu/data.hpp"
#include "uu/rewrite.hpp"

namespace uu {

struct SamplePlan {
  std::size_t n = 0;
  std::size_t n_prime = 0;
  double theta = 0.0;
  double theta_prime = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct UPair {
  UnlabeledSet first;
  UnlabeledSet second;
  /// A pool ran dry and later draws were taken with replacement.
  bool with_replacement = false;
};

/// Labels with P(+1) = spec.pi, features from the matching Gaussian.
///
/// Every row consumes one uniform and `d` normals in a fixed order whatever
/// the prior, so two calls with the same seed and different priors produce
/// coupled samples (a row only changes when its label coin changes side).
LabeledSet sample_mixture(const GaussianMixtureSpec& spec, std::size_t n, std::uint64_t seed);

/// `n` unlabeled rows from theta p_P + (1 - theta) p_N; same coupling as
/// `sample_mixture`.
UnlabeledSet sample_unlabeled(const GaussianMixtureSpec& spec, double theta, std::size_t n,
                              std::uint64_t seed);

/// Both unlabeled sets drawn straight from the mixture components.
UPair sample_u_pair(const GaussianMixtureSpec& spec, const SamplePlan& plan);

/// Builds the two unlabeled sets from finite class pools with an i.i.d.
/// label coin per row. Rows are drawn without replacement (shared between
/// both sets) until a pool runs out, then with replacement.
UPair make_u_pair(const Matrix& pos_pool, const Matrix& neg_pool, const SamplePlan& plan);

/// Largest subset whose positive fraction rounds to pi: one class is kept
/// whole and the other is cut to round(pi/(1-pi) * q) (or its mirror).
/// Kept rows are the lowest-index rows of a seeded shuffle, returned in their
/// original order.
LabeledSet subsample_to_prior(const LabeledSet& data, double pi, std::uint64_t seed);

/// Seeded subset of round(fraction * n) rows (at least one), original order.
LabeledSet take_fraction(const LabeledSet& data, double fraction, std::uint64_t seed);

/// (pi, eps theta, eps' theta') for training while data keeps the true priors.
/// Refuses values outside [0, 1] and perturbations that collide or reorder.
PriorTriple perturb_priors(const PriorTriple& priors, double eps, double eps_prime);

}  // namespace uu
