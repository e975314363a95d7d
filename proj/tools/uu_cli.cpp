// Command-line driver for data generation, training and sweeps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uu/bounds.hpp"
#include "uu/config.hpp"
#include "uu/csv.hpp"
#include "uu/datagen.hpp"
#include "uu/error.hpp"
#include "uu/estimators.hpp"
#include "uu/harness.hpp"
#include "uu/losses.hpp"
#include "uu/rewrite.hpp"
#include "uu/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAborted = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> pi, theta, theta_prime;
  std::optional<std::size_t> n, n_prime, threads;
  std::optional<int> epochs;
  std::string method;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "run a single seed instead of the configured list");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--pi", o.pi, "test class prior");
  cmd->add_option("--theta", o.theta, "class prior of the first unlabeled set");
  cmd->add_option("--theta-prime", o.theta_prime, "class prior of the second unlabeled set");
  cmd->add_option("--n", o.n, "size of the first unlabeled set");
  cmd->add_option("--n-prime", o.n_prime, "size of the second unlabeled set");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--method", o.method, "method override");
}

uu::ExperimentConfig resolve(const CommonOptions& o) {
  uu::ExperimentConfig c = o.config.empty() ? uu::ExperimentConfig{} : uu::load_config(o.config);
  if (o.seed) c.seeds = {*o.seed};
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.pi) c.data.pi = *o.pi;
  if (o.theta) c.data.theta = *o.theta;
  if (o.theta_prime) c.data.theta_prime = *o.theta_prime;
  if (o.n) c.data.n = *o.n;
  if (o.n_prime) c.data.n_prime = *o.n_prime;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.threads) c.threads = *o.threads;
  if (!o.method.empty()) c.method = uu::parse_method(o.method);
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw uu::Error(uu::ErrorKind::config, "cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw uu::Error(uu::ErrorKind::config, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_result(const uu::ExperimentResult& r) {
  const uu::Summary h = r.headline();
  std::cout << uu::to_string(r.method) << ": error " << h.mean << " +- " << h.std << " over "
            << r.runs.size() << " seed(s)";
  if (r.true_error) std::cout << " (exact; sampled test " << r.test_error.mean << ")";
  std::cout << '\n';
}

int cmd_gen(const CommonOptions& o) {
  const uu::ExperimentConfig c = resolve(o);
  if (c.data.source != uu::DataSource::mixture)
    throw uu::Error(uu::ErrorKind::config, "gen needs a mixture data source");
  const std::uint64_t seed = c.seeds.front();
  const fs::path dir = c.out_dir;
  fs::create_directories(dir);

  const uu::SamplePlan plan{c.data.n, c.data.n_prime, c.data.theta, c.data.theta_prime,
                            uu::derive_seed(seed, "data")};
  const uu::UPair pair = uu::sample_u_pair(c.data.mixture, plan);
  uu::save_csv(dir / "first.csv", pair.first);
  uu::save_csv(dir / "second.csv", pair.second);

  // Balanced labeled pool large enough to rebuild the pair from CSV.
  uu::GaussianMixtureSpec pool_mix = c.data.mixture;
  pool_mix.pi = 0.5;
  uu::save_csv(dir / "train.csv",
               uu::sample_mixture(pool_mix, 2 * (c.data.n + c.data.n_prime), uu::derive_seed(seed, "pool")));

  uu::GaussianMixtureSpec test_mix = c.data.mixture;
  test_mix.pi = c.data.pi;
  uu::save_csv(dir / "test.csv", uu::sample_mixture(test_mix, c.data.n_test, uu::derive_seed(seed, "test")));
  std::cout << "wrote first.csv, second.csv, train.csv, test.csv to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_train(const CommonOptions& o) {
  const uu::ExperimentConfig c = resolve(o);
  const uu::ExperimentResult r = uu::run_experiment(c);
  uu::write_experiment(c.out_dir, r);
  print_result(r);
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& data_path) {
  const uu::DecisionModel model = uu::model_from_json(read_text(model_path));
  const uu::LabeledSet data = uu::load_csv(data_path);
  std::cout << uu::to_json(uu::zero_one_test_error(model, data)) << '\n';
  return kExitOk;
}

int cmd_rewrite_check(double pi, double theta, double theta_prime) {
  const uu::PriorTriple p = uu::PriorTriple::make(pi, theta, theta_prime);
  const uu::CorrectionCoefficients k = uu::correction_coefficients(p);
  const uu::CostWeights w = uu::cost_weights(p);
  const uu::InfeasibilityWitness wit = uu::single_set_witness(pi);
  ordered_json j;
  j["pi"] = p.pi();
  j["theta"] = p.theta();
  j["theta_prime"] = p.theta_prime();
  j["swapped"] = p.swapped();
  j["coefficients"] = {{"a", k.a}, {"b", k.b}, {"c", k.c}, {"d", k.d}};
  j["cost_weights"] = {{"alpha", w.alpha}, {"alpha_prime", w.alpha_prime}, {"offset", w.offset}};
  j["reduction"] = uu::to_string(uu::classify_reduction(p));
  j["single_set_theta_required"] =
      wit.theta_required ? ordered_json(*wit.theta_required) : ordered_json(nullptr);
  j["single_set_feasible"] = wit.feasible();
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

struct BoundOptions {
  double delta = 0.05;
  double c_w = 1.0;
  double c_g = 0.0;
  std::size_t mc_rounds = 2000;
  std::string loss = "sigmoid";
};

int cmd_bound(const CommonOptions& o, const BoundOptions& b) {
  const uu::ExperimentConfig c = resolve(o);
  const uu::PriorTriple p = uu::PriorTriple::make(c.data.pi, c.data.theta, c.data.theta_prime);
  const uu::CostWeights w = uu::cost_weights(p);
  const uu::LossSpec loss = uu::LossSpec::parse(b.loss);
  const std::uint64_t seed = c.seeds.front();

  const uu::SamplePlan plan{c.data.n, c.data.n_prime, c.data.theta, c.data.theta_prime,
                            uu::derive_seed(seed, "data")};
  const uu::UPair pair = uu::sample_u_pair(c.data.mixture, plan);
  const auto rad = uu::empirical_rademacher_linear(pair.first.features, b.c_w, b.mc_rounds,
                                                   uu::derive_seed(seed, "rademacher"));
  const auto rad_prime = uu::empirical_rademacher_linear(pair.second.features, b.c_w, b.mc_rounds,
                                                         uu::derive_seed(seed, "rademacher-prime"));
  // Default score bound: |w.x| <= C_w * max ||x||.
  double c_g = b.c_g;
  if (c_g <= 0.0) {
    const double r1 = pair.first.features.rowwise().norm().maxCoeff();
    const double r2 = pair.second.features.rowwise().norm().maxCoeff();
    c_g = b.c_w * std::max(r1, r2);
  }
  const uu::LossConstants lc = uu::loss_constants(loss, c_g);
  if (!lc.bounds_supported) throw uu::Error(uu::ErrorKind::unsupported_loss, "loss has no Lipschitz constant");

  uu::BoundInputs in;
  in.l_ell = lc.l_ell;
  in.c_ell = lc.c_ell;
  in.alpha = w.alpha;
  in.alpha_prime = w.alpha_prime;
  in.n = c.data.n;
  in.n_prime = c.data.n_prime;
  in.delta = b.delta;
  in.rad_n = rad.value;
  in.rad_n_prime = rad_prime.value;

  ordered_json j;
  j["alpha"] = w.alpha;
  j["alpha_prime"] = w.alpha_prime;
  j["c_g"] = c_g;
  j["c_ell"] = lc.c_ell;
  j["l_ell"] = lc.l_ell;
  j["rademacher"] = {{"first", rad.value}, {"first_se", rad.std_error},
                     {"second", rad_prime.value}, {"second_se", rad_prime.std_error}};
  j["chi"] = uu::chi(in.n, in.n_prime, in.alpha, in.alpha_prime);
  j["uniform_deviation"] = ordered_json::parse(uu::to_json(uu::uniform_deviation_bound(in)));
  j["estimation_error"] = ordered_json::parse(uu::to_json(uu::estimation_error_bound(in)));
  const std::string text = j.dump(2);
  if (!o.out.empty()) write_text(fs::path(o.out) / "bound.json", text + "\n");
  std::cout << text << '\n';
  return kExitOk;
}

int cmd_sweep_closeness(const CommonOptions& o, std::vector<double> grid) {
  const uu::ExperimentConfig c = resolve(o);
  if (grid.empty()) grid = c.sweep.theta_prime;
  if (grid.empty()) throw uu::Error(uu::ErrorKind::config, "no theta_prime grid given");
  const auto points = uu::sweep_closeness(c, grid);
  uu::write_sweep(c.out_dir, points);
  std::cout << uu::sweep_summary_csv(points);
  return kExitOk;
}

int cmd_sweep_robustness(const CommonOptions& o) {
  const uu::ExperimentConfig c = resolve(o);
  if (c.sweep.eps.empty()) throw uu::Error(uu::ErrorKind::config, "no eps grid in config");
  const auto points = uu::sweep_robustness(c, c.sweep.eps);
  uu::write_sweep(c.out_dir, points);
  std::cout << uu::sweep_summary_csv(points);
  return kExitOk;
}

int cmd_sweep_sizes(const CommonOptions& o, std::vector<std::size_t> grid) {
  const uu::ExperimentConfig c = resolve(o);
  if (grid.empty()) grid = c.sweep.n;
  if (grid.empty()) throw uu::Error(uu::ErrorKind::config, "no n grid given");
  const uu::SizeSweep s = uu::sweep_sizes(c, grid);
  uu::write_sweep(c.out_dir, s.points);

  std::string csv = "n,mean_error,reference_error,excess\n";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    std::ostringstream line;
    line.precision(17);
    line << p.value.front() << ',' << (p.result ? p.result->headline().mean : std::nan("")) << ','
         << s.reference_error << ',' << s.mean_excess[i] << '\n';
    csv += line.str();
  }
  write_text(fs::path(c.out_dir) / "excess.csv", csv);
  ordered_json meta;
  meta["reference_error"] = s.reference_error;
  meta["reference_note"] = "approximate optimum: same model class trained on a larger sample";
  meta["bayes_error"] = s.bayes_error ? ordered_json(*s.bayes_error) : ordered_json(nullptr);
  meta["slope"] = std::isfinite(s.slope) ? ordered_json(s.slope) : ordered_json(nullptr);
  write_text(fs::path(c.out_dir) / "decay.json", meta.dump(2) + "\n");
  std::cout << csv << "slope " << s.slope << '\n';
  return kExitOk;
}

int cmd_baselines(const CommonOptions& o) {
  const uu::ExperimentConfig c = resolve(o);
  const auto results = uu::run_baselines(c);
  std::string csv = "method,mean_error,std_error,mean_test_error,std_test_error\n";
  for (const auto& r : results) {
    uu::write_experiment(fs::path(c.out_dir) / std::string(uu::to_string(r.method)), r);
    const uu::Summary h = r.headline();
    std::ostringstream line;
    line.precision(17);
    line << uu::to_string(r.method) << ',' << h.mean << ',' << h.std << ',' << r.test_error.mean << ','
         << r.test_error.std << '\n';
    csv += line.str();
    print_result(r);
  }
  write_text(fs::path(c.out_dir) / "summary.csv", csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning binary classifiers from two unlabeled sets"};
  app.require_subcommand(1);

  CommonOptions common;
  BoundOptions bound;
  std::vector<double> tp_grid;
  std::vector<std::size_t> n_grid;
  std::string model_path, data_path;
  double rc_pi = 0.0, rc_theta = 0.0, rc_theta_prime = 0.0;

  auto* gen = app.add_subcommand("gen", "write mixture samples as CSV");
  auto* train = app.add_subcommand("train", "train one method over the configured seeds");
  auto* eval = app.add_subcommand("eval", "zero-one error of a saved model on a labeled CSV");
  auto* rewrite = app.add_subcommand("rewrite-check", "print correction coefficients for a prior triple");
  auto* bnd = app.add_subcommand("bound", "estimation-error bound on sampled mixture data");
  auto* sc = app.add_subcommand("sweep-closeness", "sweep the second set's class prior");
  auto* sr = app.add_subcommand("sweep-robustness", "sweep multiplicative prior misspecification");
  auto* ss = app.add_subcommand("sweep-sizes", "sweep the sample size");
  auto* bl = app.add_subcommand("baselines", "run every method on one config");

  for (auto* cmd : {gen, train, bnd, sc, sr, ss, bl}) add_common(cmd, common);
  eval->add_option("--model", model_path, "model.json")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", data_path, "labeled CSV")->required()->check(CLI::ExistingFile);
  rewrite->add_option("--pi", rc_pi)->required();
  rewrite->add_option("--theta", rc_theta)->required();
  rewrite->add_option("--theta-prime", rc_theta_prime)->required();
  bnd->add_option("--delta", bound.delta, "confidence parameter");
  bnd->add_option("--c-w", bound.c_w, "weight-norm bound of the linear class");
  bnd->add_option("--c-g", bound.c_g, "score bound (default: C_w times the largest feature norm)");
  bnd->add_option("--mc-rounds", bound.mc_rounds, "Monte-Carlo rounds for the Rademacher estimate");
  bnd->add_option("--loss", bound.loss, "sigmoid, ramp or logistic");
  sc->add_option("--grid", tp_grid, "theta_prime values")->delimiter(',');
  ss->add_option("--grid", n_grid, "sample sizes")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_gen(common);
    if (*train) return cmd_train(common);
    if (*eval) return cmd_eval(model_path, data_path);
    if (*rewrite) return cmd_rewrite_check(rc_pi, rc_theta, rc_theta_prime);
    if (*bnd) return cmd_bound(common, bound);
    if (*sc) return cmd_sweep_closeness(common, tp_grid);
    if (*sr) return cmd_sweep_robustness(common);
    if (*ss) return cmd_sweep_sizes(common, n_grid);
    if (*bl) return cmd_baselines(common);
  } catch (const uu::AbortedRun& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return kExitAborted;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
