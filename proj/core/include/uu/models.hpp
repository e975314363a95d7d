#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uu/data.hpp"
#include "uu/losses.hpp"
#include "uu/rewrite.hpp"

namespace uu {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// g(x) = w'x + b. Flattened as [w..., b].
struct LinearModel {
  Vector weights;
  double bias = 0.0;
};

/// Fully connected ReLU network with a scalar output.
///
/// Layer l maps dims[l] -> dims[l + 1]; hidden layers apply ReLU after the
/// affine map, the output layer is affine only. Parameters flatten
/// layer-major, each layer contributing its weight matrix (row-major,
/// out x in) followed by its bias vector.
struct MlpModel {
  std::vector<std::size_t> dims;
  std::vector<RowMajorMatrix> weights;
  std::vector<Vector> biases;

  /// Zero-initialised network with the given layer widths (last must be 1).
  static MlpModel zeros(std::vector<std::size_t> dims);

  void validate() const;
};

using DecisionModel = std::variant<LinearModel, MlpModel>;

enum class ModelKind { linear, mlp };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view name);

ModelKind kind_of(const DecisionModel& model) noexcept;
std::size_t input_dim(const DecisionModel& model) noexcept;
std::size_t num_params(const DecisionModel& model) noexcept;
/// Layer widths: {d, 1} for linear models.
std::vector<std::size_t> layer_dims(const DecisionModel& model);

Vector flat_params(const DecisionModel& model);
void set_flat_params(DecisionModel& model, std::span<const double> params);
void set_flat_params(DecisionModel& model, const Vector& params);

double forward(const DecisionModel& model, const Vector& x);
/// Scores every row of `x`.
Vector score_batch(const DecisionModel& model, const Matrix& x);

/// d g(x) / d params in flattening order.
Vector parameter_gradient(const DecisionModel& model, const Vector& x);

/// sum_i upstream[i] * d g(x_i) / d params: one batched backward pass.
Vector weighted_parameter_gradient(const DecisionModel& model, const Matrix& x,
                                   const Vector& upstream);

/// Exact gradient of the corrected two-set risk
///   (1/n) sum_i [a l(g(x_i)) + b l(-g(x_i))] + (1/n') sum_j [d l(g(x'_j)) + c l(-g(x'_j))]
/// with respect to the model parameters.
Vector risk_gradient(const DecisionModel& model, const Matrix& first, const Matrix& second,
                     const CorrectionCoefficients& coeffs, const LossSpec& loss);

/// Gradient of alpha mean l(g(x)) + alpha' mean l(-g(x')) - offset.
Vector risk_gradient_sym(const DecisionModel& model, const Matrix& first, const Matrix& second,
                         const CostWeights& weights, const LossSpec& loss);

/// Deterministic Glorot-uniform weights, zero biases.
/// `dims` is {d} (or {d, 1}) for linear, {d, h1, ..., 1} for mlp.
DecisionModel init_model(ModelKind kind, std::span<const std::size_t> dims, std::uint64_t seed);

/// {kind, dims, activation, params, flattening, seed}
std::string model_to_json(const DecisionModel& model, std::uint64_t seed);
DecisionModel model_from_json(std::string_view text);

}  // namespace uu
