#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "uu/data.hpp"

namespace uu {

/// Ingredients of the estimation-error bound for UU learning.
struct BoundInputs {
  double l_ell = 0.0;  ///< Lipschitz constant of the loss on [-C_g, C_g]
  double c_ell = 0.0;  ///< sup of the loss on [-C_g, C_g]
  double alpha = 0.0;
  double alpha_prime = 0.0;
  std::size_t n = 0;
  std::size_t n_prime = 0;
  double delta = 0.05;
  double rad_n = 0.0;        ///< Rademacher complexity over the first marginal
  double rad_n_prime = 0.0;  ///< ... and over the second

  void validate() const;
};

/// total = complexity + complexity_prime + deviation
struct BoundDecomposition {
  double complexity = 0.0;
  double complexity_prime = 0.0;
  double deviation = 0.0;
  double total = 0.0;
};

std::string to_json(const BoundDecomposition& b);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t rounds = 0;
};

/// alpha / sqrt(n) + alpha' / sqrt(n').
double chi(std::size_t n, std::size_t n_prime, double alpha, double alpha_prime);

/// sqrt(ln(2 / delta) / 2).
double c_delta(double delta);

/// Empirical Rademacher complexity of {x -> w'x : ||w|| <= c_w} on the rows
/// of `features`, i.e. (c_w / n) E_sigma || sum_i sigma_i x_i ||, averaged
/// over `mc_rounds` sign vectors (each seeded from `seed` and its index).
MonteCarloEstimate empirical_rademacher_linear(const Matrix& features, double c_w,
                                               std::size_t mc_rounds = 2000,
                                               std::uint64_t seed = 0);

/// 4 L alpha R_n + 4 L alpha' R'_n' + 2 C_ell C_delta chi: bounds
/// R(g_hat) - R(g*) with probability at least 1 - delta.
BoundDecomposition estimation_error_bound(const BoundInputs& in);

/// 2 L alpha R_n + 2 L alpha' R'_n' + C_ell C_delta chi: bounds
/// sup_g |R_hat_UU(g) - R(g)| with probability at least 1 - delta.
BoundDecomposition uniform_deviation_bound(const BoundInputs& in);

}  // namespace uu
