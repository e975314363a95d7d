#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uu {

enum class LossKind { zero_one, sigmoid, logistic, ramp };

/// A margin loss l(z) together with the two structural properties the
/// estimators care about. Build instances through `LossSpec::of`, which keeps
/// the flags consistent with the kind.
struct LossSpec {
  LossKind kind = LossKind::sigmoid;
  bool differentiable = true;
  /// l(z) + l(-z) == 1 for every z.
  bool symmetric = true;

  static LossSpec of(LossKind kind) noexcept;

  /// Accepts "zero-one", "sigmoid", "logistic", "ramp".
  static LossSpec parse(std::string_view name);

  std::string_view name() const noexcept;

  /// Gradient training is possible (subgradients at ramp kinks included).
  bool trainable() const noexcept { return kind != LossKind::zero_one; }

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

struct LossConstants {
  double c_g = 0.0;   ///< |score| bound defining the interval [-c_g, c_g]
  double c_ell = 0.0; ///< sup of l on the interval
  double l_ell = 0.0; ///< Lipschitz constant of l on the interval (+inf for zero-one)
  /// False when the loss has no finite Lipschitz constant (zero-one).
  bool bounds_supported = true;
};

double loss_value(const LossSpec& spec, double z);

/// l'(z). The ramp loss returns the flat-side value 0 at its kinks z = +-1.
double loss_derivative(const LossSpec& spec, double z);

/// True iff |l(z) + l(-z) - 1| <= 1e-12 on every grid point.
bool check_symmetry(const LossSpec& spec, std::span<const double> grid);

/// [-10, 10] stepped by 0.01 (2001 points).
std::vector<double> canonical_symmetry_grid();

LossConstants loss_constants(const LossSpec& spec, double c_g);

}  // namespace uu
