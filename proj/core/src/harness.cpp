#include "uu/harness.hpp"

#include <algorithm>
#include <charconv>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "uu/csv.hpp"
#include "uu/datagen.hpp"
#include "uu/error.hpp"
#include "uu/estimators.hpp"
#include "uu/rng.hpp"

namespace uu {
namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Everything one seed of one configuration trains and evaluates on.
struct Trial {
  UnlabeledSet first;   // drawn with data.theta
  UnlabeledSet second;  // drawn with data.theta_prime
  std::optional<UnlabeledSet> val_first;
  std::optional<UnlabeledSet> val_second;
  LabeledSet test;
  std::optional<LabeledSet> labeled_pool;  // only built for methods that need labels
};

bool needs_labels(Method m) {
  return m == Method::oracle_pn || m == Method::small_pn || m == Method::small_pn_prior_shift;
}

Trial prepare_trial(const ExperimentConfig& c, std::uint64_t seed) {
  const auto& d = c.data;
  const SamplePlan plan{d.n, d.n_prime, d.theta, d.theta_prime, derive_seed(seed, "data")};
  const std::size_t n_labeled = d.n + d.n_prime;

  if (d.source == DataSource::mixture) {
    GaussianMixtureSpec test_mix = d.mixture;
    test_mix.pi = d.pi;
    UPair pair = sample_u_pair(d.mixture, plan);
    Trial t{std::move(pair.first), std::move(pair.second), std::nullopt, std::nullopt,
            sample_mixture(test_mix, d.n_test, derive_seed(seed, "test")), std::nullopt};
    if (d.n_val > 0) {
      SamplePlan vplan = plan;
      vplan.n = vplan.n_prime = d.n_val;
      vplan.seed = derive_seed(seed, "validation");
      UPair val = sample_u_pair(d.mixture, vplan);
      t.val_first = std::move(val.first);
      t.val_second = std::move(val.second);
    }
    if (needs_labels(c.method))
      t.labeled_pool = sample_mixture(test_mix, n_labeled, derive_seed(seed, "labeled"));
    return t;
  }

  const LabeledSet pool = load_csv(d.train_csv);
  if (static_cast<std::size_t>(pool.features.cols()) == 0)
    throw Error(ErrorKind::config, "training CSV has no feature columns");
  LabeledSet test = load_csv(d.test_csv);
  if (d.subsample_test_to_pi) test = subsample_to_prior(test, d.pi, derive_seed(seed, "test"));
  UPair pair = make_u_pair(pool.positives(), pool.negatives(), plan);
  Trial t{std::move(pair.first), std::move(pair.second), std::nullopt, std::nullopt, std::move(test),
          std::nullopt};
  if (d.n_val > 0) {
    SamplePlan vplan = plan;
    vplan.n = vplan.n_prime = d.n_val;
    vplan.seed = derive_seed(seed, "validation");
    UPair val = make_u_pair(pool.positives(), pool.negatives(), vplan);
    t.val_first = std::move(val.first);
    t.val_second = std::move(val.second);
  }
  if (needs_labels(c.method)) {
    LabeledSet at_pi = subsample_to_prior(pool, d.pi, derive_seed(seed, "labeled"));
    const double frac =
        std::min(1.0, static_cast<double>(n_labeled) / static_cast<double>(at_pi.size()));
    t.labeled_pool = take_fraction(at_pi, frac, derive_seed(seed, "labeled-size"));
  }
  return t;
}

std::vector<std::size_t> model_dims(const ExperimentConfig& c, std::size_t d) {
  if (c.model.kind == ModelKind::linear) return {d};
  std::vector<std::size_t> dims{d};
  dims.insert(dims.end(), c.model.hidden.begin(), c.model.hidden.end());
  dims.push_back(1);
  return dims;
}

CorrectionCoefficients pn_coefficients(double pi) { return {pi, 0.0, 1.0 - pi, 0.0}; }

TrainResult train_supervised(DecisionModel model, const LabeledSet& data, double pi,
                             const TrainConfig& cfg, const TrainMonitors& mon) {
  if (data.count_positive() == 0 || data.count_negative() == 0)
    throw Error(ErrorKind::single_class, "supervised baseline needs both classes in its labeled data");
  return train_corrected(std::move(model), data.positives(), data.negatives(), pn_coefficients(pi), cfg,
                         mon);
}

ExperimentResult aggregate(const ExperimentConfig& c, std::vector<RunResult> runs, double wall) {
  ExperimentResult r;
  r.method = c.method;
  r.config_json = config_to_json(c);
  r.runs = std::move(runs);
  std::vector<double> test;
  std::vector<double> exact;
  for (const auto& run : r.runs) {
    test.push_back(run.test_error);
    if (run.true_error) exact.push_back(*run.true_error);
  }
  r.test_error = summarize(test);
  if (!exact.empty() && exact.size() == r.runs.size()) r.true_error = summarize(exact);
  r.wall_clock_seconds = wall;
  return r;
}

std::vector<Method> sweep_methods(const ExperimentConfig& c) {
  return c.sweep.methods.empty() ? std::vector<Method>{c.method} : c.sweep.methods;
}

/// Runs every (point, seed) pair as one task and folds them back per point.
void run_points(std::vector<SweepPoint>& points, std::vector<std::optional<ExperimentConfig>>& configs,
                std::size_t threads) {
  struct Task {
    std::size_t point;
    std::size_t seed_index;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (!configs[p]) continue;
    for (std::size_t s = 0; s < configs[p]->seeds.size(); ++s) tasks.push_back({p, s});
  }
  std::vector<std::optional<RunResult>> out(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::vector<double> wall(tasks.size(), 0.0);
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const auto& cfg = *configs[tasks[i].point];
    const auto start = Clock::now();
    try {
      out[i] = run_method(cfg, cfg.seeds[tasks[i].seed_index]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    wall[i] = seconds_since(start);
  });

  std::size_t i = 0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (!configs[p]) continue;
    std::vector<RunResult> runs;
    double total = 0.0;
    for (std::size_t s = 0; s < configs[p]->seeds.size(); ++s, ++i) {
      total += wall[i];
      if (!out[i]) {
        if (points[p].error.empty()) points[p].error = errors[i];
        continue;
      }
      runs.push_back(std::move(*out[i]));
    }
    if (points[p].error.empty()) points[p].result = aggregate(*configs[p], std::move(runs), total);
  }
}

// Mirrors the training loop: one pass over the larger set in batches.
double steps_per_epoch(std::size_t n, std::size_t n_prime, std::size_t batch) {
  const std::size_t major = std::max(n, n_prime);
  const std::size_t b = std::min(batch, major);
  return static_cast<double>((major + b - 1) / b);
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<double> ExperimentResult::headline_errors() const {
  std::vector<double> out;
  const bool exact = true_error.has_value();
  for (const auto& r : runs) out.push_back(exact ? *r.true_error : r.test_error);
  return out;
}

Summary ExperimentResult::headline() const { return true_error ? *true_error : test_error; }

RunResult run_method(const ExperimentConfig& c, std::uint64_t seed) {
  c.validate();
  Trial trial = prepare_trial(c, seed);
  const std::size_t dim = trial.first.dim();

  TrainConfig cfg = c.train;
  cfg.seed = derive_seed(seed, "train");
  DecisionModel model = init_model(c.model.kind, model_dims(c, dim), derive_seed(seed, "init"));

  TrainMonitors mon;
  if (c.track_test_error) mon.test = &trial.test;

  const PriorTriple true_priors = PriorTriple::make(c.data.pi, c.data.theta, c.data.theta_prime);
  // Sets ordered by their true priors: `hi` has the larger one.
  const UnlabeledSet& hi = true_priors.swapped() ? trial.second : trial.first;
  const UnlabeledSet& lo = true_priors.swapped() ? trial.first : trial.second;
  if (trial.val_first && trial.val_second) {
    mon.val_first = true_priors.swapped() ? &trial.val_second->features : &trial.val_first->features;
    mon.val_second = true_priors.swapped() ? &trial.val_first->features : &trial.val_second->features;
  }

  TrainResult trained;
  switch (c.method) {
    case Method::uu: {
      PriorTriple priors = true_priors;
      if (c.data.prior_eps != std::pair{1.0, 1.0})
        priors = perturb_priors(true_priors, c.data.prior_eps.first, c.data.prior_eps.second);
      trained = train_corrected(std::move(model), hi.features, lo.features, correction_coefficients(priors),
                                cfg, mon);
      break;
    }
    case Method::ber_fc:
      trained = train_corrected(std::move(model), hi.features, lo.features,
                                correction_coefficients(true_priors.with_pi(0.5)), cfg, mon);
      break;
    case Method::uu_biased:
      trained = train_corrected(std::move(model), hi.features, lo.features, pn_coefficients(c.data.pi), cfg,
                                mon);
      break;
    case Method::ccn: {
      // Noisy-label risk is the plain average over the pooled sample.
      CorrectionCoefficients k = ccn_backward_coefficients(true_priors);
      const double total = static_cast<double>(hi.size() + lo.size());
      const double w_hi = static_cast<double>(hi.size()) / total;
      const double w_lo = static_cast<double>(lo.size()) / total;
      k = {k.a * w_hi, k.b * w_hi, k.c * w_lo, k.d * w_lo};
      trained = train_corrected(std::move(model), hi.features, lo.features, k, cfg, mon);
      break;
    }
    case Method::oracle_pn:
      trained = train_supervised(std::move(model), *trial.labeled_pool, c.data.pi, cfg, mon);
      break;
    case Method::small_pn: {
      const LabeledSet small = take_fraction(*trial.labeled_pool, c.small_pn_fraction, derive_seed(seed, "small"));
      trained = train_supervised(std::move(model), small, c.data.pi, cfg, mon);
      break;
    }
    case Method::small_pn_prior_shift: {
      // Labeled data drawn at the larger training prior, learned as if that
      // prior held at test time.
      const double shifted = true_priors.theta();
      const LabeledSet at_theta =
          subsample_to_prior(*trial.labeled_pool, shifted, derive_seed(seed, "shift"));
      const LabeledSet small = take_fraction(at_theta, c.small_pn_fraction, derive_seed(seed, "small"));
      trained = train_supervised(std::move(model), small, shifted, cfg, mon);
      break;
    }
  }

  RunResult r;
  r.seed = seed;
  r.test_error = zero_one_test_error(trained.model, trial.test).value;
  if (c.data.source == DataSource::mixture && kind_of(trained.model) == ModelKind::linear) {
    GaussianMixtureSpec test_mix = c.data.mixture;
    test_mix.pi = c.data.pi;
    r.true_error = true_risk_gaussian(trained.model, test_mix, LossSpec::of(LossKind::zero_one));
  }
  r.final_train_risk = trained.history.epochs.empty() ? 0.0 : trained.history.epochs.back().train_risk;
  r.history = std::move(trained.history);
  r.model = std::move(trained.model);
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  c.validate();
  const auto start = Clock::now();
  std::vector<std::optional<RunResult>> runs(c.seeds.size());
  parallel_for(c.seeds.size(), c.threads, [&](std::size_t i) { runs[i] = run_method(c, c.seeds[i]); });
  std::vector<RunResult> done;
  for (auto& r : runs) done.push_back(std::move(*r));
  return aggregate(c, std::move(done), seconds_since(start));
}

std::vector<ExperimentResult> run_baselines(const ExperimentConfig& c) {
  const std::vector<Method> methods = c.sweep.methods.empty() ? all_methods() : c.sweep.methods;
  std::vector<ExperimentResult> out;
  for (Method m : methods) {
    ExperimentConfig mc = c;
    mc.method = m;
    out.push_back(run_experiment(mc));
  }
  return out;
}

std::vector<SweepPoint> sweep_closeness(const ExperimentConfig& base, std::span<const double> grid) {
  std::vector<SweepPoint> points;
  std::vector<std::optional<ExperimentConfig>> configs;
  for (Method m : sweep_methods(base)) {
    for (double v : grid) {
      SweepPoint p{"theta_prime", {v}, m, std::nullopt, {}};
      ExperimentConfig c = base;
      c.method = m;
      c.data.theta_prime = v;
      try {
        c.validate();
        PriorTriple::make(c.data.pi, c.data.theta, c.data.theta_prime);
        configs.emplace_back(std::move(c));
      } catch (const Error& e) {
        p.error = e.what();
        configs.emplace_back(std::nullopt);
      }
      points.push_back(std::move(p));
    }
  }
  run_points(points, configs, base.threads);
  return points;
}

std::vector<SweepPoint> sweep_robustness(const ExperimentConfig& base,
                                         std::span<const std::pair<double, double>> grid) {
  std::vector<SweepPoint> points;
  std::vector<std::optional<ExperimentConfig>> configs;
  for (Method m : sweep_methods(base)) {
    for (const auto& [eps, eps_prime] : grid) {
      SweepPoint p{"eps", {eps, eps_prime}, m, std::nullopt, {}};
      ExperimentConfig c = base;
      c.method = m;
      c.data.prior_eps = {eps, eps_prime};
      try {
        c.validate();
        perturb_priors(PriorTriple::make(c.data.pi, c.data.theta, c.data.theta_prime), eps, eps_prime);
        configs.emplace_back(std::move(c));
      } catch (const Error& e) {
        p.error = e.what();
        configs.emplace_back(std::nullopt);
      }
      points.push_back(std::move(p));
    }
  }
  run_points(points, configs, base.threads);
  return points;
}

SizeSweep sweep_sizes(const ExperimentConfig& base, std::span<const std::size_t> grid) {
  base.validate();
  if (grid.empty()) throw Error(ErrorKind::config, "size grid is empty");
  for (auto n : grid)
    if (n == 0) throw Error(ErrorKind::config, "sample sizes must be positive");

  SizeSweep out;
  std::vector<std::optional<ExperimentConfig>> configs;
  for (Method m : sweep_methods(base)) {
    for (std::size_t n : grid) {
      ExperimentConfig c = base;
      c.method = m;
      c.data.n = n;
      if (base.sweep.tie_n_prime) c.data.n_prime = n;
      if (base.sweep.equal_steps) {
        const double base_steps = steps_per_epoch(base.data.n, base.data.n_prime, base.train.batch_size);
        const double here = steps_per_epoch(c.data.n, c.data.n_prime, c.train.batch_size);
        c.train.epochs = std::max(1, static_cast<int>(std::llround(base.train.epochs * base_steps / here)));
      }
      out.points.push_back({"n", {static_cast<double>(n)}, m, std::nullopt, {}});
      configs.emplace_back(std::move(c));
    }
  }

  // Reference model: same method and model class on a much larger sample.
  ExperimentConfig ref = base;
  const std::size_t n_max = *std::max_element(grid.begin(), grid.end());
  ref.data.n = static_cast<std::size_t>(std::llround(base.sweep.reference_scale * static_cast<double>(n_max)));
  ref.data.n_prime = base.sweep.tie_n_prime
                         ? ref.data.n
                         : static_cast<std::size_t>(std::llround(base.sweep.reference_scale *
                                                                 static_cast<double>(base.data.n_prime)));
  if (base.sweep.reference_epochs > 0) ref.train.epochs = base.sweep.reference_epochs;
  ref.track_test_error = false;
  const RunResult ref_run = run_method(ref, derive_seed(base.seeds.front(), "reference"));
  out.reference_error = ref_run.true_error ? *ref_run.true_error : ref_run.test_error;
  if (base.data.source == DataSource::mixture) {
    GaussianMixtureSpec mix = base.data.mixture;
    mix.pi = base.data.pi;
    out.bayes_error = bayes_error_gaussian(mix);
  }

  run_points(out.points, configs, base.threads);

  std::vector<double> xs;
  bool all_positive = true;
  for (const auto& p : out.points) {
    double excess = std::numeric_limits<double>::quiet_NaN();
    if (p.result) excess = p.result->headline().mean - out.reference_error;
    if (!(excess > 0.0)) all_positive = false;
    out.mean_excess.push_back(excess);
    xs.push_back(p.value.front());
  }
  out.slope = all_positive && sweep_methods(base).size() == 1 ? log_log_slope(xs, out.mean_excess)
                                                               : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

std::string result_to_json(const ExperimentResult& r, bool include_wall_clock) {
  ordered_json j;
  j["method"] = to_string(r.method);
  // Where results go and how many workers ran them do not change the results.
  ordered_json cfg = ordered_json::parse(r.config_json);
  cfg.erase("output");
  cfg.erase("threads");
  j["config"] = std::move(cfg);
  ordered_json per_seed = ordered_json::array();
  for (const auto& run : r.runs) {
    ordered_json s;
    s["seed"] = run.seed;
    s["test_error"] = run.test_error;
    s["true_error"] = optional_number(run.true_error);
    s["final_train_risk"] = run.final_train_risk;
    s["epochs"] = run.history.epochs.size();
    s["negative_risk_epochs"] = run.history.negative_risk_epochs;
    s["negative_batches"] = run.history.negative_batches;
    s["batches"] = run.history.batches;
    per_seed.push_back(std::move(s));
  }
  j["runs"] = std::move(per_seed);
  j["test_error"] = {{"mean", r.test_error.mean}, {"std", r.test_error.std}};
  if (r.true_error) {
    j["true_error"] = {{"mean", r.true_error->mean}, {"std", r.true_error->std}};
  } else {
    j["true_error"] = nullptr;
  }
  if (include_wall_clock) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j.dump(2);
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "result.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::config, "cannot write " + (dir / "result.json").string());
    out << result_to_json(r) << '\n';
  }
  for (const auto& run : r.runs) {
    const auto sub = dir / ("seed_" + std::to_string(run.seed));
    std::filesystem::create_directories(sub);
    write_history_csv(sub / "history.csv", run.history);
    std::ofstream model(sub / "model.json", std::ios::binary | std::ios::trunc);
    model << model_to_json(run.model, run.seed) << '\n';
  }
}

std::string sweep_summary_csv(std::span<const SweepPoint> points) {
  std::string out = "parameter,value,method,mean_error,std_error,mean_test_error,std_test_error,error\n";
  for (const auto& p : points) {
    std::string value;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      if (i > 0) value += ' ';
      value += number(p.value[i]);
    }
    out += p.parameter + ',' + value + ',' + std::string(to_string(p.method)) + ',';
    if (p.result) {
      const Summary h = p.result->headline();
      out += number(h.mean) + ',' + number(h.std) + ',' + number(p.result->test_error.mean) + ',' +
             number(p.result->test_error.std) + ',';
    } else {
      out += ",,,,";
    }
    std::string err = p.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out += err + '\n';
  }
  return out;
}

void write_sweep(const std::filesystem::path& dir, std::span<const SweepPoint> points) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "summary.csv", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::config, "cannot write " + (dir / "summary.csv").string());
  out << sweep_summary_csv(points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].result) continue;
    write_experiment(dir / ("point_" + std::to_string(i)), *points[i].result);
  }
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::vector<std::exception_ptr> errors(count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace uu
