#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uu/error.hpp"
#include "uu/estimators.hpp"
#include "uu/models.hpp"
#include "uu/rewrite.hpp"

namespace {

uu::Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> z;
  uu::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = z(rng);
  return m;
}

uu::Vector central_difference(const uu::DecisionModel& model, auto&& f, double h = 1e-6) {
  const uu::Vector theta = uu::flat_params(model);
  uu::Vector out(theta.size());
  uu::DecisionModel probe = model;
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    uu::Vector t = theta;
    t[p] += h;
    uu::set_flat_params(probe, t);
    const double up = f(probe);
    t[p] -= 2 * h;
    uu::set_flat_params(probe, t);
    out[p] = (up - f(probe)) / (2 * h);
  }
  return out;
}

double rel(const uu::Vector& a, const uu::Vector& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

}  // namespace

TEST(Forward, BayesScorerAtOrigin) {
  uu::LinearModel m{uu::Vector::Constant(2, 2.0), std::log(3.0 / 7.0)};
  EXPECT_NEAR(uu::forward(m, uu::Vector::Zero(2)), -0.8473, 1e-4);
}

TEST(Forward, ZeroModelsScoreZero) {
  const uu::Vector x = uu::Vector::LinSpaced(4, -1, 2);
  EXPECT_EQ(uu::forward(uu::LinearModel{uu::Vector::Zero(4), 0.0}, x), 0.0);
  EXPECT_EQ(uu::forward(uu::MlpModel::zeros({4, 5, 3, 1}), x), 0.0);
}

TEST(Forward, ShapeMismatch) {
  const uu::DecisionModel m = uu::LinearModel{uu::Vector::Zero(3), 0.0};
  try {
    uu::forward(m, uu::Vector::Zero(2));
    FAIL();
  } catch (const uu::Error& e) {
    EXPECT_EQ(e.kind(), uu::ErrorKind::shape);
  }
  EXPECT_THROW(uu::score_batch(m, uu::Matrix::Zero(4, 2)), uu::Error);
}

TEST(Forward, LinearIsPositivelyHomogeneous) {
  std::mt19937_64 rng(1);
  auto m = uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{3}, 9);
  std::get<uu::LinearModel>(m).bias = 0.7;
  const uu::Vector x = gaussian(rng, 3, 1).col(0);
  auto scaled = m;
  uu::set_flat_params(scaled, uu::Vector(2.5 * uu::flat_params(m)));
  EXPECT_NEAR(uu::forward(scaled, x), 2.5 * uu::forward(m, x), 1e-12);
}

TEST(Forward, BatchMatchesPointwise) {
  std::mt19937_64 rng(2);
  const auto m = uu::init_model(uu::ModelKind::mlp, std::vector<std::size_t>{3, 7, 5, 1}, 3);
  const uu::Matrix x = gaussian(rng, 11, 3);
  const uu::Vector s = uu::score_batch(m, x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) EXPECT_NEAR(s[i], uu::forward(m, x.row(i).transpose()), 1e-12);
}

TEST(ParameterGradient, LinearIsInputThenOne) {
  const uu::DecisionModel m = uu::LinearModel{uu::Vector::Constant(3, 0.3), -1.0};
  uu::Vector x(3);
  x << 1.5, -2.0, 0.25;
  const uu::Vector g = uu::parameter_gradient(m, x);
  ASSERT_EQ(g.size(), 4);
  EXPECT_EQ(g.head(3), x);
  EXPECT_EQ(g[3], 1.0);
}

TEST(ParameterGradient, MlpMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto m = uu::init_model(uu::ModelKind::mlp, std::vector<std::size_t>{4, 9, 6, 1}, rng());
    const uu::Vector x = gaussian(rng, 4, 1).col(0);
    const uu::Vector fd = central_difference(m, [&](const uu::DecisionModel& p) { return uu::forward(p, x); });
    EXPECT_LE(rel(uu::parameter_gradient(m, x), fd), 1e-5);
  }
}

TEST(ParameterGradient, DeadUnitHasZeroIncomingGradient) {
  auto mlp = uu::MlpModel::zeros({2, 3, 1});
  mlp.weights[0] << 1, 1, -1, -1, 0.5, 0.5;  // unit 1 dead for positive inputs
  mlp.weights[1] << 1, 1, 1;
  const uu::DecisionModel m = mlp;
  const uu::Vector g = uu::parameter_gradient(m, uu::Vector::Constant(2, 1.0));
  // Layer 0 weights are row-major: unit 1 owns entries 2 and 3; its bias is entry 7.
  EXPECT_EQ(g[2], 0.0);
  EXPECT_EQ(g[3], 0.0);
  EXPECT_EQ(g[7], 0.0);
  EXPECT_NE(g[0], 0.0);
}

TEST(RiskGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (auto kind : {uu::LossKind::sigmoid, uu::LossKind::logistic}) {
    const auto loss = uu::LossSpec::of(kind);
    for (int i = 0; i < 10; ++i) {
      const auto k = uu::correction_coefficients(uu::PriorTriple::make(0.3, 0.85, 0.2));
      const auto m = uu::init_model(i % 2 ? uu::ModelKind::mlp : uu::ModelKind::linear,
                                    i % 2 ? std::vector<std::size_t>{3, 8, 1} : std::vector<std::size_t>{3}, rng());
      const uu::Matrix b1 = gaussian(rng, 13, 3), b2 = gaussian(rng, 7, 3);
      const uu::Vector fd = central_difference(
          m, [&](const uu::DecisionModel& p) { return uu::corrected_risk(p, b1, b2, k, loss); });
      EXPECT_LE(rel(uu::risk_gradient(m, b1, b2, k, loss), fd), 1e-5);
    }
  }
}

TEST(RiskGradient, SymmetricFormHasSameGradient) {
  std::mt19937_64 rng(5);
  const auto p = uu::PriorTriple::make(0.4, 0.7, 0.2);
  for (auto kind : {uu::LossKind::sigmoid, uu::LossKind::ramp}) {
    const auto loss = uu::LossSpec::of(kind);
    const auto m = uu::init_model(uu::ModelKind::mlp, std::vector<std::size_t>{2, 6, 1}, 11);
    const uu::Matrix b1 = gaussian(rng, 20, 2), b2 = gaussian(rng, 15, 2);
    const uu::Vector g = uu::risk_gradient(m, b1, b2, uu::correction_coefficients(p), loss);
    const uu::Vector gs = uu::risk_gradient_sym(m, b1, b2, uu::cost_weights(p), loss);
    EXPECT_LE((g - gs).norm(), 1e-9 * std::max(1.0, g.norm()));
  }
}

TEST(RiskGradient, PnCoefficientsGiveSupervisedGradient) {
  std::mt19937_64 rng(6);
  const auto loss = uu::LossSpec::of(uu::LossKind::sigmoid);
  const auto m = uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{2}, 1);
  const uu::Matrix xp = gaussian(rng, 10, 2), xn = gaussian(rng, 6, 2);
  const double pi = 0.35;
  const uu::Vector g = uu::risk_gradient(m, xp, xn, uu::correction_coefficients(uu::PriorTriple::make(pi, 1, 0)), loss);
  uu::Vector expected = uu::Vector::Zero(3);
  for (Eigen::Index i = 0; i < xp.rows(); ++i) {
    const uu::Vector x = xp.row(i).transpose();
    expected += pi / 10 * uu::loss_derivative(loss, uu::forward(m, x)) * uu::parameter_gradient(m, x);
  }
  for (Eigen::Index i = 0; i < xn.rows(); ++i) {
    const uu::Vector x = xn.row(i).transpose();
    expected -= (1 - pi) / 6 * uu::loss_derivative(loss, -uu::forward(m, x)) * uu::parameter_gradient(m, x);
  }
  EXPECT_LE((g - expected).norm(), 1e-14);
}

TEST(RiskGradient, AntisymmetricBatchesCancel) {
  std::mt19937_64 rng(7);
  // Each batch holds x and -x; at the zero scorer the weight gradient is
  // l'(0) (alpha + alpha') mean(x), which vanishes for such batches.
  const uu::Matrix x = gaussian(rng, 9, 3);
  uu::Matrix sym(18, 3);
  sym << x, -x;
  const uu::DecisionModel m = uu::LinearModel{uu::Vector::Zero(3), 0.0};
  const auto k = uu::correction_coefficients(uu::PriorTriple::make(0.3, 0.9, 0.4));
  const uu::Vector g = uu::risk_gradient(m, sym, sym, k, uu::LossSpec::of(uu::LossKind::sigmoid));
  EXPECT_LE(g.head(3).norm(), 1e-15);
}

TEST(RiskGradient, ZeroOneUnsupported) {
  const uu::DecisionModel m = uu::LinearModel{uu::Vector::Zero(2), 0.0};
  const uu::Matrix x = uu::Matrix::Ones(3, 2);
  EXPECT_THROW(uu::risk_gradient(m, x, x, {1, 0, 1, 0}, uu::LossSpec::of(uu::LossKind::zero_one)), uu::Error);
}

TEST(InitModel, DeterministicAndBounded) {
  const std::vector<std::size_t> dims{5, 8, 1};
  const auto a = uu::init_model(uu::ModelKind::mlp, dims, 42);
  const auto b = uu::init_model(uu::ModelKind::mlp, dims, 42);
  const auto c = uu::init_model(uu::ModelKind::mlp, dims, 43);
  EXPECT_EQ(uu::flat_params(a), uu::flat_params(b));
  EXPECT_NE(uu::flat_params(a), uu::flat_params(c));

  const auto& mlp = std::get<uu::MlpModel>(a);
  EXPECT_TRUE(mlp.biases[0].isZero());
  EXPECT_LE(mlp.weights[0].cwiseAbs().maxCoeff(), std::sqrt(6.0 / 13.0));

  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto lin = uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{4}, s);
    EXPECT_LE(std::get<uu::LinearModel>(lin).weights.norm(), 2.0 * std::sqrt(6.0 / 5.0));
    EXPECT_EQ(std::get<uu::LinearModel>(lin).bias, 0.0);
  }
  EXPECT_THROW(uu::init_model(uu::ModelKind::mlp, std::vector<std::size_t>{}, 1), uu::Error);
}

TEST(MlpModel, ValidateRejectsBadOutput) {
  EXPECT_THROW(uu::MlpModel::zeros({3, 4, 2}), uu::Error);
}

TEST(ModelJson, RoundTrip) {
  const auto m = uu::init_model(uu::ModelKind::mlp, std::vector<std::size_t>{3, 4, 1}, 8);
  const std::string text = uu::model_to_json(m, 8);
  const auto back = uu::model_from_json(text);
  EXPECT_EQ(uu::layer_dims(back), uu::layer_dims(m));
  EXPECT_EQ(uu::flat_params(back), uu::flat_params(m));
  EXPECT_NE(text.find("layer-major"), std::string::npos);

  const uu::DecisionModel lin = uu::LinearModel{uu::Vector::Constant(2, 0.1), 1.0 / 3.0};
  EXPECT_EQ(uu::flat_params(uu::model_from_json(uu::model_to_json(lin, 0))), uu::flat_params(lin));
  EXPECT_THROW(uu::model_from_json("{\"kind\": \"tree\"}"), uu::Error);
}
