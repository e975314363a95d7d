#include "uu/bounds.hpp"

#include <cmath>

#include <json.hpp>

#include "uu/error.hpp"
#include "uu/rng.hpp"

namespace uu {
namespace {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

BoundDecomposition combine(const BoundInputs& in, double scale) {
  in.validate();
  BoundDecomposition b;
  b.complexity = 2.0 * scale * in.l_ell * in.alpha * in.rad_n;
  b.complexity_prime = 2.0 * scale * in.l_ell * in.alpha_prime * in.rad_n_prime;
  b.deviation = scale * in.c_ell * c_delta(in.delta) * chi(in.n, in.n_prime, in.alpha, in.alpha_prime);
  b.total = b.complexity + b.complexity_prime + b.deviation;
  return b;
}

}  // namespace

void BoundInputs::validate() const {
  if (n == 0 || n_prime == 0) throw Error(ErrorKind::domain, "bound needs n, n' >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::domain, "delta must lie in (0, 1)");
  for (double v : {l_ell, c_ell, alpha, alpha_prime, rad_n, rad_n_prime}) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::domain, "bound inputs must be finite and nonnegative");
  }
}

std::string to_json(const BoundDecomposition& b) {
  nlohmann::ordered_json j;
  j["complexity"] = b.complexity;
  j["complexity_prime"] = b.complexity_prime;
  j["deviation"] = b.deviation;
  j["total"] = b.total;
  return j.dump();
}

double chi(std::size_t n, std::size_t n_prime, double alpha, double alpha_prime) {
  if (n == 0 || n_prime == 0) throw Error(ErrorKind::domain, "chi needs n, n' >= 1");
  return alpha / std::sqrt(static_cast<double>(n)) +
         alpha_prime / std::sqrt(static_cast<double>(n_prime));
}

double c_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::domain, "delta must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / delta) / 2.0);
}

MonteCarloEstimate empirical_rademacher_linear(const Matrix& features, double c_w,
                                               std::size_t mc_rounds, std::uint64_t seed) {
  if (features.rows() == 0) throw Error(ErrorKind::empty_sample, "feature matrix is empty");
  if (!(c_w > 0.0)) throw Error(ErrorKind::domain, "norm cap c_w must be positive");
  if (mc_rounds == 0) throw Error(ErrorKind::domain, "mc_rounds must be >= 1");

  const double scale = c_w / static_cast<double>(features.rows());
  CompensatedSum sum;
  CompensatedSum sum_sq;
  Vector acc(features.cols());
  for (std::size_t r = 0; r < mc_rounds; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    acc.setZero();
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      if (rng() & 1U) {
        acc += features.row(i).transpose();
      } else {
        acc -= features.row(i).transpose();
      }
    }
    const double v = scale * acc.norm();
    sum.add(v);
    sum_sq.add(v * v);
  }
  const double m = static_cast<double>(mc_rounds);
  MonteCarloEstimate out;
  out.rounds = mc_rounds;
  out.value = sum.value() / m;
  if (mc_rounds > 1) {
    const double var = std::max(0.0, (sum_sq.value() - m * out.value * out.value) / (m - 1.0));
    out.std_error = std::sqrt(var / m);
  }
  return out;
}

BoundDecomposition estimation_error_bound(const BoundInputs& in) { return combine(in, 2.0); }

BoundDecomposition uniform_deviation_bound(const BoundInputs& in) { return combine(in, 1.0); }

}  // namespace uu
