#include "uu/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uu/error.hpp"

namespace uu {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown(const json& obj, std::string_view where, std::set<std::string> known) {
  if (!obj.is_object()) throw Error(ErrorKind::config, std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key))
      throw Error(ErrorKind::config, "unknown field '" + std::string(where) + "." + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void parse_data(const json& j, DataConfig& d) {
  reject_unknown(j, "data",
                 {"source", "mixture", "pi", "theta", "theta_prime", "n", "n_prime", "n_test", "n_val",
                  "prior_eps", "train_csv", "test_csv", "subsample_test_to_pi"});
  if (j.contains("source")) {
    const auto s = j.at("source").get<std::string>();
    if (s == "mixture") {
      d.source = DataSource::mixture;
    } else if (s == "csv") {
      d.source = DataSource::csv;
    } else {
      throw Error(ErrorKind::config, "data.source must be 'mixture' or 'csv'");
    }
  }
  if (j.contains("mixture")) {
    const auto& m = j.at("mixture");
    reject_unknown(m, "data.mixture", {"mean_pos", "mean_neg", "sigma"});
    if (m.contains("mean_pos")) d.mixture.mean_pos = to_vector(m.at("mean_pos").get<std::vector<double>>());
    if (m.contains("mean_neg")) d.mixture.mean_neg = to_vector(m.at("mean_neg").get<std::vector<double>>());
    read(m, "sigma", d.mixture.sigma);
  }
  read(j, "pi", d.pi);
  read(j, "theta", d.theta);
  read(j, "theta_prime", d.theta_prime);
  read(j, "n", d.n);
  read(j, "n_prime", d.n_prime);
  read(j, "n_test", d.n_test);
  read(j, "n_val", d.n_val);
  if (j.contains("prior_eps")) {
    const auto v = j.at("prior_eps").get<std::vector<double>>();
    if (v.size() != 2) throw Error(ErrorKind::config, "data.prior_eps must be [eps, eps']");
    d.prior_eps = {v[0], v[1]};
  }
  if (j.contains("train_csv")) d.train_csv = j.at("train_csv").get<std::string>();
  if (j.contains("test_csv")) d.test_csv = j.at("test_csv").get<std::string>();
  read(j, "subsample_test_to_pi", d.subsample_test_to_pi);
  d.mixture.pi = d.pi;
}

void parse_model(const json& j, ModelConfig& m) {
  reject_unknown(j, "model", {"kind", "hidden"});
  if (j.contains("kind")) m.kind = parse_model_kind(j.at("kind").get<std::string>());
  read(j, "hidden", m.hidden);
}

void parse_train(const json& j, TrainConfig& t) {
  reject_unknown(j, "train",
                 {"optimizer", "lr", "decay", "batch_size", "epochs", "weight_decay", "loss", "estimator"});
  if (j.contains("optimizer")) t.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  read(j, "lr", t.initial_lr);
  read(j, "decay", t.decay);
  read(j, "batch_size", t.batch_size);
  read(j, "epochs", t.epochs);
  read(j, "weight_decay", t.weight_decay);
  if (j.contains("loss")) t.loss = LossSpec::parse(j.at("loss").get<std::string>());
  if (j.contains("estimator")) t.estimator = parse_objective_form(j.at("estimator").get<std::string>());
}

void parse_sweep(const json& j, SweepConfig& s) {
  reject_unknown(j, "sweep",
                 {"theta_prime", "eps", "n", "tie_n_prime", "methods", "reference_scale", "reference_epochs",
                  "equal_steps"});
  read(j, "theta_prime", s.theta_prime);
  if (j.contains("eps")) {
    s.eps.clear();
    for (const auto& pair : j.at("eps")) {
      const auto v = pair.get<std::vector<double>>();
      if (v.size() != 2) throw Error(ErrorKind::config, "sweep.eps entries must be [eps, eps']");
      s.eps.emplace_back(v[0], v[1]);
    }
  }
  read(j, "n", s.n);
  read(j, "tie_n_prime", s.tie_n_prime);
  if (j.contains("methods")) {
    s.methods.clear();
    for (const auto& m : j.at("methods")) s.methods.push_back(parse_method(m.get<std::string>()));
  }
  read(j, "reference_scale", s.reference_scale);
  read(j, "reference_epochs", s.reference_epochs);
  read(j, "equal_steps", s.equal_steps);
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::uu: return "uu";
    case Method::uu_biased: return "uu_biased";
    case Method::ber_fc: return "ber_fc";
    case Method::ccn: return "ccn";
    case Method::oracle_pn: return "oracle_pn";
    case Method::small_pn: return "small_pn";
    case Method::small_pn_prior_shift: return "small_pn_prior_shift";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods())
    if (to_string(m) == name) return m;
  throw Error(ErrorKind::config, "unknown method '" + std::string(name) + "'");
}

std::vector<Method> all_methods() {
  return {Method::uu,        Method::uu_biased, Method::ber_fc, Method::ccn,
          Method::oracle_pn, Method::small_pn,  Method::small_pn_prior_shift};
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::config, what); };
  if (!(data.pi > 0.0 && data.pi < 1.0)) fail("data.pi must lie in (0, 1)");
  for (double t : {data.theta, data.theta_prime})
    if (!(t >= 0.0 && t <= 1.0)) fail("data.theta and data.theta_prime must lie in [0, 1]");
  if (data.theta == data.theta_prime) fail("data.theta and data.theta_prime must differ");
  if (data.n == 0 || data.n_prime == 0) fail("data.n and data.n_prime must be positive");
  if (data.n_test == 0) fail("data.n_test must be positive");
  if (data.source == DataSource::mixture) {
    data.mixture.validate();
  } else if (data.train_csv.empty() || data.test_csv.empty()) {
    fail("csv source needs data.train_csv and data.test_csv");
  }
  if (model.kind == ModelKind::mlp) {
    for (auto h : model.hidden)
      if (h == 0) fail("model.hidden widths must be positive");
  }
  train.validate();
  if (seeds.empty()) fail("seeds must not be empty");
  if (!(small_pn_fraction > 0.0 && small_pn_fraction <= 1.0)) fail("small_pn_fraction must lie in (0, 1]");
  for (auto n : sweep.n)
    if (n == 0) fail("sweep.n values must be positive");
  if (!(sweep.reference_scale >= 1.0)) fail("sweep.reference_scale must be >= 1");
  if (sweep.reference_epochs < 0) fail("sweep.reference_epochs must be >= 0");
}

ExperimentConfig parse_config(std::string_view json_text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(json_text);
    reject_unknown(j, "config",
                   {"name", "data", "method", "model", "train", "sweep", "seeds", "output",
                    "small_pn_fraction", "track_test_error", "threads"});
    read(j, "name", c.name);
    if (j.contains("data")) parse_data(j.at("data"), c.data);
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("model")) parse_model(j.at("model"), c.model);
    if (j.contains("train")) parse_train(j.at("train"), c.train);
    if (j.contains("sweep")) parse_sweep(j.at("sweep"), c.sweep);
    read(j, "seeds", c.seeds);
    if (j.contains("output")) {
      const auto& o = j.at("output");
      reject_unknown(o, "output", {"dir"});
      if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
    }
    read(j, "small_pn_fraction", c.small_pn_fraction);
    read(j, "track_test_error", c.track_test_error);
    read(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["name"] = c.name;
  auto& d = j["data"];
  d["source"] = c.data.source == DataSource::mixture ? "mixture" : "csv";
  d["mixture"] = {{"mean_pos", from_vector(c.data.mixture.mean_pos)},
                  {"mean_neg", from_vector(c.data.mixture.mean_neg)},
                  {"sigma", c.data.mixture.sigma}};
  d["pi"] = c.data.pi;
  d["theta"] = c.data.theta;
  d["theta_prime"] = c.data.theta_prime;
  d["n"] = c.data.n;
  d["n_prime"] = c.data.n_prime;
  d["n_test"] = c.data.n_test;
  d["n_val"] = c.data.n_val;
  d["prior_eps"] = {c.data.prior_eps.first, c.data.prior_eps.second};
  d["train_csv"] = c.data.train_csv.string();
  d["test_csv"] = c.data.test_csv.string();
  d["subsample_test_to_pi"] = c.data.subsample_test_to_pi;
  j["method"] = to_string(c.method);
  j["model"] = {{"kind", to_string(c.model.kind)}, {"hidden", c.model.hidden}};
  j["train"] = {{"optimizer", to_string(c.train.optimizer)},
                {"lr", c.train.initial_lr},
                {"decay", c.train.decay},
                {"batch_size", c.train.batch_size},
                {"epochs", c.train.epochs},
                {"weight_decay", c.train.weight_decay},
                {"loss", c.train.loss.name()},
                {"estimator", to_string(c.train.estimator)}};
  auto& s = j["sweep"];
  s["theta_prime"] = c.sweep.theta_prime;
  s["eps"] = ordered_json::array();
  for (const auto& [e, ep] : c.sweep.eps) s["eps"].push_back({e, ep});
  s["n"] = c.sweep.n;
  s["tie_n_prime"] = c.sweep.tie_n_prime;
  s["methods"] = ordered_json::array();
  for (auto m : c.sweep.methods) s["methods"].push_back(to_string(m));
  s["reference_scale"] = c.sweep.reference_scale;
  s["reference_epochs"] = c.sweep.reference_epochs;
  s["equal_steps"] = c.sweep.equal_steps;
  j["seeds"] = c.seeds;
  j["output"] = {{"dir", c.out_dir.string()}};
  j["small_pn_fraction"] = c.small_pn_fraction;
  j["track_test_error"] = c.track_test_error;
  j["threads"] = c.threads;
  return j.dump(2);
}

}  // namespace uu
