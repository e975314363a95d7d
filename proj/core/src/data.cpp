#include "uu/data.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "uu/error.hpp"

namespace uu {

UnlabeledSet::UnlabeledSet(Matrix x, double prior, std::optional<std::uint64_t> seed)
    : features(std::move(x)), declared_prior(prior), origin_seed(seed) {
  if (features.rows() < 1) throw Error(ErrorKind::empty_sample, "unlabeled set is empty");
  if (!features.allFinite()) throw Error(ErrorKind::domain, "unlabeled set has non-finite entries");
  if (!(prior >= 0.0 && prior <= 1.0))
    throw Error(ErrorKind::domain, "declared prior must lie in [0, 1]");
}

LabeledSet::LabeledSet(Matrix x, LabelVector y) : features(std::move(x)), labels(std::move(y)) {
  if (features.rows() != labels.size())
    throw Error(ErrorKind::shape, "feature and label row counts differ");
  if (!features.allFinite()) throw Error(ErrorKind::domain, "labeled set has non-finite entries");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      ++n_pos_;
    } else if (labels[i] != -1) {
      throw Error(ErrorKind::domain, "labels must be +1 or -1");
    }
  }
}

namespace {

Matrix rows_with_label(const LabeledSet& set, int label) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < set.labels.size(); ++i)
    if (set.labels[i] == label) idx.push_back(i);
  return set.features(idx, Eigen::all);
}

}  // namespace

Matrix LabeledSet::positives() const { return rows_with_label(*this, 1); }
Matrix LabeledSet::negatives() const { return rows_with_label(*this, -1); }

void GaussianMixtureSpec::validate() const {
  if (mean_pos.size() == 0 || mean_pos.size() != mean_neg.size())
    throw Error(ErrorKind::shape, "mixture means must be non-empty and of equal dimension");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorKind::domain, "mixture sigma must be positive");
  if (!(pi > 0.0 && pi < 1.0)) throw Error(ErrorKind::domain, "mixture pi must lie in (0, 1)");
}

GaussianMixtureSpec GaussianMixtureSpec::two_dimensional(double pi) {
  GaussianMixtureSpec spec;
  spec.mean_pos = Vector::Constant(2, 1.0);
  spec.mean_neg = Vector::Constant(2, -1.0);
  spec.sigma = 1.0;
  spec.pi = pi;
  return spec;
}

}  // namespace uu
