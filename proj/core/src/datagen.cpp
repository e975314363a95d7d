#include "uu/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "uu/error.hpp"
#include "uu/rng.hpp"

namespace uu {
namespace {

/// Row i: one uniform label coin, then d standard normals.
LabeledSet draw_rows(const GaussianMixtureSpec& spec, double pos_prob, std::size_t n,
                     std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(spec.dim());
  const auto rows = static_cast<Eigen::Index>(n);
  Rng rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix x(rows, d);
  LabelVector y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const bool positive = coin(rng) < pos_prob;
    const Vector& mean = positive ? spec.mean_pos : spec.mean_neg;
    for (Eigen::Index k = 0; k < d; ++k) x(i, k) = mean[k] + spec.sigma * normal(rng);
    y[i] = positive ? 1 : -1;
  }
  return LabeledSet(std::move(x), std::move(y));
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

/// First `keep` entries of a seeded permutation, restored to ascending order.
std::vector<Eigen::Index> seeded_pick(const std::vector<Eigen::Index>& candidates, std::size_t keep,
                                      Rng& rng) {
  std::vector<Eigen::Index> pick = candidates;
  std::shuffle(pick.begin(), pick.end(), rng);
  pick.resize(keep);
  std::sort(pick.begin(), pick.end());
  return pick;
}

LabeledSet select_rows(const LabeledSet& data, std::vector<Eigen::Index> rows) {
  std::sort(rows.begin(), rows.end());
  return LabeledSet(data.features(rows, Eigen::all), data.labels(rows));
}

}  // namespace

void SamplePlan::validate() const {
  if (n == 0 || n_prime == 0) throw Error(ErrorKind::config, "sample sizes must be positive");
  for (double t : {theta, theta_prime})
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::domain, "priors must lie in [0, 1]");
  if (theta == theta_prime) throw Error(ErrorKind::degenerate_priors, "theta and theta' must differ");
}

LabeledSet sample_mixture(const GaussianMixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw Error(ErrorKind::config, "sample size must be positive");
  return draw_rows(spec, spec.pi, n, seed);
}

UnlabeledSet sample_unlabeled(const GaussianMixtureSpec& spec, double theta, std::size_t n,
                              std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw Error(ErrorKind::config, "sample size must be positive");
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorKind::domain, "theta must lie in [0, 1]");
  LabeledSet rows = draw_rows(spec, theta, n, seed);
  return UnlabeledSet(std::move(rows.features), theta, seed);
}

UPair sample_u_pair(const GaussianMixtureSpec& spec, const SamplePlan& plan) {
  plan.validate();
  return {sample_unlabeled(spec, plan.theta, plan.n, derive_seed(plan.seed, "first")),
          sample_unlabeled(spec, plan.theta_prime, plan.n_prime, derive_seed(plan.seed, "second")),
          false};
}

UPair make_u_pair(const Matrix& pos_pool, const Matrix& neg_pool, const SamplePlan& plan) {
  plan.validate();
  if (pos_pool.rows() > 0 && neg_pool.rows() > 0 && pos_pool.cols() != neg_pool.cols())
    throw Error(ErrorKind::shape, "pools have different feature counts");
  for (double t : {plan.theta, plan.theta_prime}) {
    if (t > 0.0 && pos_pool.rows() == 0)
      throw Error(ErrorKind::data_exhausted, "positive pool is empty but theta > 0");
    if (t < 1.0 && neg_pool.rows() == 0)
      throw Error(ErrorKind::data_exhausted, "negative pool is empty but theta < 1");
  }
  const Eigen::Index d = pos_pool.rows() > 0 ? pos_pool.cols() : neg_pool.cols();

  Rng rng(plan.seed);
  const auto pos_order = shuffled_indices(pos_pool.rows(), rng);
  const auto neg_order = shuffled_indices(neg_pool.rows(), rng);
  std::size_t pos_next = 0;
  std::size_t neg_next = 0;
  bool replaced = false;
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const auto draw = [&](const Matrix& pool, const std::vector<Eigen::Index>& order,
                        std::size_t& next) -> Eigen::Index {
    if (next < order.size()) return order[next++];
    replaced = true;
    std::uniform_int_distribution<Eigen::Index> any(0, pool.rows() - 1);
    return any(rng);
  };

  const auto build = [&](double theta, std::size_t n) {
    Matrix x(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (coin(rng) < theta) {
        x.row(i) = pos_pool.row(draw(pos_pool, pos_order, pos_next));
      } else {
        x.row(i) = neg_pool.row(draw(neg_pool, neg_order, neg_next));
      }
    }
    return UnlabeledSet(std::move(x), theta, plan.seed);
  };

  UnlabeledSet first = build(plan.theta, plan.n);
  UnlabeledSet second = build(plan.theta_prime, plan.n_prime);
  return {std::move(first), std::move(second), replaced};
}

LabeledSet subsample_to_prior(const LabeledSet& data, double pi, std::uint64_t seed) {
  if (!(pi > 0.0 && pi < 1.0)) throw Error(ErrorKind::domain, "pi must lie in (0, 1)");
  const std::size_t p_avail = data.count_positive();
  const std::size_t q_avail = data.count_negative();
  if (p_avail == 0 || q_avail == 0)
    throw Error(ErrorKind::single_class, "subsampling to a prior needs both classes");

  // Keep all negatives and cut positives, or the mirror; take the larger.
  const auto p_for_all_neg =
      static_cast<std::size_t>(std::llround(pi / (1.0 - pi) * static_cast<double>(q_avail)));
  const auto q_for_all_pos =
      static_cast<std::size_t>(std::llround((1.0 - pi) / pi * static_cast<double>(p_avail)));
  std::size_t keep_p = p_avail;
  std::size_t keep_q = q_avail;
  const bool a_ok = p_for_all_neg <= p_avail;
  const bool b_ok = q_for_all_pos <= q_avail;
  if (a_ok && (!b_ok || p_for_all_neg + q_avail >= p_avail + q_for_all_pos)) {
    keep_p = p_for_all_neg;
  } else {
    keep_q = q_for_all_pos;
  }

  std::vector<Eigen::Index> pos_rows;
  std::vector<Eigen::Index> neg_rows;
  for (Eigen::Index i = 0; i < data.labels.size(); ++i)
    (data.labels[i] == 1 ? pos_rows : neg_rows).push_back(i);

  Rng rng(seed);
  auto rows = seeded_pick(pos_rows, keep_p, rng);
  const auto neg_pick = seeded_pick(neg_rows, keep_q, rng);
  rows.insert(rows.end(), neg_pick.begin(), neg_pick.end());
  return select_rows(data, std::move(rows));
}

LabeledSet take_fraction(const LabeledSet& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw Error(ErrorKind::domain, "fraction must lie in (0, 1]");
  if (data.size() == 0) throw Error(ErrorKind::empty_sample, "cannot subsample an empty set");
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.size()))));
  std::vector<Eigen::Index> all(data.size());
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  Rng rng(seed);
  return select_rows(data, seeded_pick(all, keep, rng));
}

PriorTriple perturb_priors(const PriorTriple& priors, double eps, double eps_prime) {
  const double hi = eps * priors.theta();
  const double lo = eps_prime * priors.theta_prime();
  for (double v : {hi, lo}) {
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(ErrorKind::degenerate_priors,
                  "perturbed prior " + std::to_string(v) + " falls outside [0, 1]");
  }
  if (!(hi > lo))
    throw Error(ErrorKind::degenerate_priors, "perturbed priors collide or change order");
  return priors.swapped() ? PriorTriple::make(priors.pi(), lo, hi)
                          : PriorTriple::make(priors.pi(), hi, lo);
}

}  // namespace uu
