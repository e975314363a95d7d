#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace uu {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using LabelVector = Eigen::VectorXi;

/// Feature matrix drawn from p_tr(x) = theta p_P(x) + (1 - theta) p_N(x).
struct UnlabeledSet {
  Matrix features;
  double declared_prior = 0.0;
  std::optional<std::uint64_t> origin_seed;

  UnlabeledSet() = default;
  UnlabeledSet(Matrix x, double prior, std::optional<std::uint64_t> seed = std::nullopt);

  std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
};

/// Rows with labels in {+1, -1}. One class may be absent.
struct LabeledSet {
  Matrix features;
  LabelVector labels;

  LabeledSet() = default;
  LabeledSet(Matrix x, LabelVector y);

  std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  std::size_t count_positive() const noexcept { return n_pos_; }
  std::size_t count_negative() const noexcept { return size() - n_pos_; }

  Matrix positives() const;
  Matrix negatives() const;

 private:
  std::size_t n_pos_ = 0;
};

/// Two isotropic Gaussians N(mean_pos, sigma^2 I) and N(mean_neg, sigma^2 I)
/// mixed with positive weight pi.
struct GaussianMixtureSpec {
  Vector mean_pos;
  Vector mean_neg;
  double sigma = 1.0;
  double pi = 0.5;

  void validate() const;
  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_pos.size()); }

  /// Means (+1, +1) and (-1, -1), identity covariance.
  static GaussianMixtureSpec two_dimensional(double pi);
};

}  // namespace uu
