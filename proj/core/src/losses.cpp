#include "uu/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uu/error.hpp"

namespace uu {
namespace {

void require_finite(double z) {
  if (!std::isfinite(z)) throw Error(ErrorKind::domain, "loss margin must be finite");
}

double sigmoid_loss(double z) {
  // 1 / (1 + e^z), evaluated without overflow on either tail.
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

LossSpec LossSpec::of(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::zero_one: return {kind, false, true};
    case LossKind::sigmoid: return {kind, true, true};
    case LossKind::logistic: return {kind, true, false};
    case LossKind::ramp: return {kind, false, true};
  }
  return {};
}

LossSpec LossSpec::parse(std::string_view name) {
  if (name == "zero-one") return of(LossKind::zero_one);
  if (name == "sigmoid") return of(LossKind::sigmoid);
  if (name == "logistic") return of(LossKind::logistic);
  if (name == "ramp") return of(LossKind::ramp);
  throw Error(ErrorKind::config, "unknown loss '" + std::string(name) + "'");
}

std::string_view LossSpec::name() const noexcept {
  switch (kind) {
    case LossKind::zero_one: return "zero-one";
    case LossKind::sigmoid: return "sigmoid";
    case LossKind::logistic: return "logistic";
    case LossKind::ramp: return "ramp";
  }
  return "unknown";
}

double loss_value(const LossSpec& spec, double z) {
  require_finite(z);
  switch (spec.kind) {
    case LossKind::zero_one:
      // (1 - sign(z)) / 2 with sign(0) = 0.
      return z > 0.0 ? 0.0 : (z < 0.0 ? 1.0 : 0.5);
    case LossKind::sigmoid:
      return sigmoid_loss(z);
    case LossKind::logistic:
      // ln(1 + e^{-z}) = max(-z, 0) + ln(1 + e^{-|z|})
      return std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    case LossKind::ramp:
      return std::clamp((1.0 - z) / 2.0, 0.0, 1.0);
  }
  return 0.0;
}

double loss_derivative(const LossSpec& spec, double z) {
  require_finite(z);
  switch (spec.kind) {
    case LossKind::zero_one:
      throw Error(ErrorKind::unsupported_loss, "zero-one loss has no usable derivative");
    case LossKind::sigmoid: {
      // -e^z / (1 + e^z)^2 = -s(1 - s) with s = l_sig(z)
      const double s = sigmoid_loss(z);
      return -s * (1.0 - s);
    }
    case LossKind::logistic:
      // -1 / (1 + e^z)
      return -sigmoid_loss(z);
    case LossKind::ramp:
      return (z > -1.0 && z < 1.0) ? -0.5 : 0.0;
  }
  return 0.0;
}

bool check_symmetry(const LossSpec& spec, std::span<const double> grid) {
  return std::all_of(grid.begin(), grid.end(), [&](double z) {
    return std::abs(loss_value(spec, z) + loss_value(spec, -z) - 1.0) <= 1e-12;
  });
}

std::vector<double> canonical_symmetry_grid() {
  std::vector<double> grid;
  grid.reserve(2001);
  for (int i = -1000; i <= 1000; ++i) grid.push_back(i * 0.01);
  return grid;
}

LossConstants loss_constants(const LossSpec& spec, double c_g) {
  if (!(c_g > 0.0) || !std::isfinite(c_g))
    throw Error(ErrorKind::domain, "score bound c_g must be positive and finite");

  // Every supported loss is nonincreasing, so the sup sits at the left end.
  LossConstants out;
  out.c_g = c_g;
  out.c_ell = loss_value(spec, -c_g);
  switch (spec.kind) {
    case LossKind::zero_one:
      out.l_ell = std::numeric_limits<double>::infinity();
      out.bounds_supported = false;
      break;
    case LossKind::sigmoid:
      // |l'| peaks at z = 0, which always lies inside the interval.
      out.l_ell = 0.25;
      break;
    case LossKind::logistic:
      out.l_ell = -loss_derivative(spec, -c_g);
      break;
    case LossKind::ramp:
      out.l_ell = 0.5;
      break;
  }
  return out;
}

}  // namespace uu
