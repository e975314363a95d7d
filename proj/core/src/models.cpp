#include "uu/models.hpp"

#include <cmath>
#include <random>
#include <utility>

#include <json.hpp>

#include "uu/error.hpp"
#include "uu/rng.hpp"

namespace uu {
namespace {

constexpr std::string_view kFlatteningTag = "layer-major/weights-row-major-then-bias";

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const DecisionModel& model, Eigen::Index got) {
  if (static_cast<std::size_t>(got) != input_dim(model))
    throw Error(ErrorKind::shape, "input has " + std::to_string(got) +
                                      " features, model expects " +
                                      std::to_string(input_dim(model)));
}

/// Forward pass that keeps every pre-activation for backprop.
struct MlpTrace {
  std::vector<Matrix> inputs;  // input to each layer (batch x fan_in)
  std::vector<Matrix> pre;     // pre-activation of each hidden layer
  Vector out;
};

MlpTrace mlp_forward(const MlpModel& m, const Matrix& x) {
  MlpTrace t;
  const std::size_t layers = m.weights.size();
  t.inputs.reserve(layers);
  t.pre.reserve(layers - 1);
  Matrix h = x;
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    Matrix z = h * m.weights[l].transpose();
    z.rowwise() += m.biases[l].transpose();
    t.inputs.push_back(std::move(h));
    h = z.cwiseMax(0.0);
    t.pre.push_back(std::move(z));
  }
  Matrix out = h * m.weights.back().transpose();
  t.out = out.col(0).array() + m.biases.back()[0];
  t.inputs.push_back(std::move(h));
  return t;
}

}  // namespace

MlpModel MlpModel::zeros(std::vector<std::size_t> dims) {
  MlpModel m;
  m.dims = std::move(dims);
  if (m.dims.size() < 2) throw Error(ErrorKind::config, "mlp needs at least input and output dims");
  for (std::size_t l = 0; l + 1 < m.dims.size(); ++l) {
    m.weights.push_back(RowMajorMatrix::Zero(static_cast<Eigen::Index>(m.dims[l + 1]),
                                             static_cast<Eigen::Index>(m.dims[l])));
    m.biases.push_back(Vector::Zero(static_cast<Eigen::Index>(m.dims[l + 1])));
  }
  m.validate();
  return m;
}

void MlpModel::validate() const {
  if (dims.size() < 2) throw Error(ErrorKind::config, "mlp needs at least input and output dims");
  if (dims.back() != 1) throw Error(ErrorKind::shape, "mlp output dimension must be 1");
  if (weights.size() + 1 != dims.size() || biases.size() + 1 != dims.size())
    throw Error(ErrorKind::shape, "mlp layer count does not match dims");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (dims[l] == 0) throw Error(ErrorKind::config, "mlp layer widths must be positive");
    if (weights[l].rows() != static_cast<Eigen::Index>(dims[l + 1]) ||
        weights[l].cols() != static_cast<Eigen::Index>(dims[l]) ||
        biases[l].size() != static_cast<Eigen::Index>(dims[l + 1]))
      throw Error(ErrorKind::shape, "mlp layer " + std::to_string(l) + " has incompatible shape");
  }
}

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::linear ? "linear" : "mlp";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear") return ModelKind::linear;
  if (name == "mlp") return ModelKind::mlp;
  throw Error(ErrorKind::config, "unknown model kind '" + std::string(name) + "'");
}

ModelKind kind_of(const DecisionModel& model) noexcept {
  return std::holds_alternative<LinearModel>(model) ? ModelKind::linear : ModelKind::mlp;
}

std::size_t input_dim(const DecisionModel& model) noexcept {
  return std::visit(Overloaded{
                        [](const LinearModel& m) { return static_cast<std::size_t>(m.weights.size()); },
                        [](const MlpModel& m) { return m.dims.front(); },
                    },
                    model);
}

std::size_t num_params(const DecisionModel& model) noexcept {
  return std::visit(Overloaded{
                        [](const LinearModel& m) { return static_cast<std::size_t>(m.weights.size()) + 1; },
                        [](const MlpModel& m) {
                          std::size_t n = 0;
                          for (std::size_t l = 0; l + 1 < m.dims.size(); ++l)
                            n += m.dims[l] * m.dims[l + 1] + m.dims[l + 1];
                          return n;
                        },
                    },
                    model);
}

std::vector<std::size_t> layer_dims(const DecisionModel& model) {
  if (const auto* lin = std::get_if<LinearModel>(&model))
    return {static_cast<std::size_t>(lin->weights.size()), 1};
  return std::get<MlpModel>(model).dims;
}

Vector flat_params(const DecisionModel& model) {
  Vector out(static_cast<Eigen::Index>(num_params(model)));
  std::visit(Overloaded{
                 [&](const LinearModel& m) {
                   out.head(m.weights.size()) = m.weights;
                   out[m.weights.size()] = m.bias;
                 },
                 [&](const MlpModel& m) {
                   Eigen::Index pos = 0;
                   for (std::size_t l = 0; l < m.weights.size(); ++l) {
                     const auto& w = m.weights[l];
                     out.segment(pos, w.size()) = Eigen::Map<const Vector>(w.data(), w.size());
                     pos += w.size();
                     out.segment(pos, m.biases[l].size()) = m.biases[l];
                     pos += m.biases[l].size();
                   }
                 },
             },
             model);
  return out;
}

void set_flat_params(DecisionModel& model, std::span<const double> params) {
  if (params.size() != num_params(model))
    throw Error(ErrorKind::shape, "parameter vector has wrong length");
  std::visit(Overloaded{
                 [&](LinearModel& m) {
                   for (Eigen::Index i = 0; i < m.weights.size(); ++i)
                     m.weights[i] = params[static_cast<std::size_t>(i)];
                   m.bias = params.back();
                 },
                 [&](MlpModel& m) {
                   std::size_t pos = 0;
                   for (std::size_t l = 0; l < m.weights.size(); ++l) {
                     auto& w = m.weights[l];
                     std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), w.size(), w.data());
                     pos += static_cast<std::size_t>(w.size());
                     auto& b = m.biases[l];
                     std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), b.size(), b.data());
                     pos += static_cast<std::size_t>(b.size());
                   }
                 },
             },
             model);
}

void set_flat_params(DecisionModel& model, const Vector& params) {
  set_flat_params(model, std::span<const double>(params.data(), static_cast<std::size_t>(params.size())));
}

double forward(const DecisionModel& model, const Vector& x) {
  require_dim(model, x.size());
  if (const auto* lin = std::get_if<LinearModel>(&model)) return lin->weights.dot(x) + lin->bias;
  return mlp_forward(std::get<MlpModel>(model), x.transpose()).out[0];
}

Vector score_batch(const DecisionModel& model, const Matrix& x) {
  require_dim(model, x.cols());
  if (const auto* lin = std::get_if<LinearModel>(&model))
    return (x * lin->weights).array() + lin->bias;
  return mlp_forward(std::get<MlpModel>(model), x).out;
}

Vector parameter_gradient(const DecisionModel& model, const Vector& x) {
  return weighted_parameter_gradient(model, x.transpose(), Vector::Ones(1));
}

Vector weighted_parameter_gradient(const DecisionModel& model, const Matrix& x,
                                   const Vector& upstream) {
  require_dim(model, x.cols());
  if (upstream.size() != x.rows()) throw Error(ErrorKind::shape, "upstream length != batch size");

  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    Vector g(lin->weights.size() + 1);
    g.head(lin->weights.size()) = x.transpose() * upstream;
    g[lin->weights.size()] = upstream.sum();
    return g;
  }

  const auto& m = std::get<MlpModel>(model);
  const MlpTrace t = mlp_forward(m, x);
  const std::size_t layers = m.weights.size();
  std::vector<RowMajorMatrix> dw(layers);
  std::vector<Vector> db(layers);

  Matrix delta = upstream;  // d(objective)/d(pre-activation), batch x width
  for (std::size_t l = layers; l-- > 0;) {
    dw[l] = delta.transpose() * t.inputs[l];
    db[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix back = delta * m.weights[l];
    delta = back.cwiseProduct((t.pre[l - 1].array() > 0.0).cast<double>().matrix());
  }

  Vector g(static_cast<Eigen::Index>(num_params(model)));
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    g.segment(pos, dw[l].size()) = Eigen::Map<const Vector>(dw[l].data(), dw[l].size());
    pos += dw[l].size();
    g.segment(pos, db[l].size()) = db[l];
    pos += db[l].size();
  }
  return g;
}

namespace {

void require_nonempty(const Matrix& first, const Matrix& second) {
  if (first.rows() == 0 || second.rows() == 0)
    throw Error(ErrorKind::empty_sample, "risk gradient needs non-empty batches");
}

void require_trainable(const LossSpec& loss) {
  if (!loss.trainable())
    throw Error(ErrorKind::unsupported_loss, "zero-one loss cannot drive gradient training");
}

}  // namespace

Vector risk_gradient(const DecisionModel& model, const Matrix& first, const Matrix& second,
                     const CorrectionCoefficients& k, const LossSpec& loss) {
  require_trainable(loss);
  require_nonempty(first, second);
  const Vector s1 = score_batch(model, first);
  const Vector s2 = score_batch(model, second);
  const double inv_n = 1.0 / static_cast<double>(first.rows());
  const double inv_np = 1.0 / static_cast<double>(second.rows());

  Vector u1(s1.size());
  for (Eigen::Index i = 0; i < s1.size(); ++i)
    u1[i] = inv_n * (k.a * loss_derivative(loss, s1[i]) - k.b * loss_derivative(loss, -s1[i]));
  Vector u2(s2.size());
  for (Eigen::Index j = 0; j < s2.size(); ++j)
    u2[j] = inv_np * (k.d * loss_derivative(loss, s2[j]) - k.c * loss_derivative(loss, -s2[j]));

  return weighted_parameter_gradient(model, first, u1) +
         weighted_parameter_gradient(model, second, u2);
}

Vector risk_gradient_sym(const DecisionModel& model, const Matrix& first, const Matrix& second,
                         const CostWeights& w, const LossSpec& loss) {
  require_trainable(loss);
  require_nonempty(first, second);
  const Vector s1 = score_batch(model, first);
  const Vector s2 = score_batch(model, second);
  const double inv_n = 1.0 / static_cast<double>(first.rows());
  const double inv_np = 1.0 / static_cast<double>(second.rows());

  Vector u1(s1.size());
  for (Eigen::Index i = 0; i < s1.size(); ++i) u1[i] = inv_n * w.alpha * loss_derivative(loss, s1[i]);
  Vector u2(s2.size());
  for (Eigen::Index j = 0; j < s2.size(); ++j)
    u2[j] = -inv_np * w.alpha_prime * loss_derivative(loss, -s2[j]);

  return weighted_parameter_gradient(model, first, u1) +
         weighted_parameter_gradient(model, second, u2);
}

DecisionModel init_model(ModelKind kind, std::span<const std::size_t> dims, std::uint64_t seed) {
  if (dims.empty()) throw Error(ErrorKind::config, "model dims are empty");
  for (auto d : dims)
    if (d == 0) throw Error(ErrorKind::config, "model dims must be positive");

  Rng rng(seed);
  const auto glorot = [&](auto& w, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
  };

  if (kind == ModelKind::linear) {
    if (dims.size() > 2 || (dims.size() == 2 && dims[1] != 1))
      throw Error(ErrorKind::config, "linear model dims must be {d} or {d, 1}");
    LinearModel m;
    m.weights = Vector::Zero(static_cast<Eigen::Index>(dims[0]));
    glorot(m.weights, dims[0], 1);
    return m;
  }

  if (dims.size() < 2) throw Error(ErrorKind::config, "mlp dims need input and output widths");
  MlpModel m = MlpModel::zeros(std::vector<std::size_t>(dims.begin(), dims.end()));
  for (std::size_t l = 0; l < m.weights.size(); ++l) glorot(m.weights[l], dims[l], dims[l + 1]);
  return m;
}

std::string model_to_json(const DecisionModel& model, std::uint64_t seed) {
  const Vector p = flat_params(model);
  nlohmann::json j;
  j["kind"] = to_string(kind_of(model));
  j["dims"] = layer_dims(model);
  j["activation"] = kind_of(model) == ModelKind::mlp ? "relu" : "none";
  j["params"] = std::vector<double>(p.data(), p.data() + p.size());
  j["flattening"] = kFlatteningTag;
  j["seed"] = seed;
  return j.dump(2);
}

DecisionModel model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("model json: ") + e.what());
  }
  try {
    if (j.at("flattening").get<std::string>() != kFlatteningTag)
      throw Error(ErrorKind::config, "unsupported parameter flattening order");
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    const auto params = j.at("params").get<std::vector<double>>();
    DecisionModel model = init_model(kind, dims, 0);
    set_flat_params(model, params);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("model json: ") + e.what());
  }
}

}  // namespace uu
