#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uu/datagen.hpp"
#include "uu/error.hpp"
#include "uu/estimators.hpp"
#include "uu/optim.hpp"

namespace {

const auto kMix = uu::GaussianMixtureSpec::two_dimensional(0.3);

uu::TrainConfig small_config(int epochs = 5) {
  uu::TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 32;
  c.initial_lr = 0.05;
  c.seed = 17;
  return c;
}

}  // namespace

TEST(LrSchedule, Examples) {
  EXPECT_DOUBLE_EQ(uu::lr_at_epoch(1e-3, 0.0, 37), 1e-3);
  EXPECT_NEAR(uu::lr_at_epoch(1e-3, 1e-4, 100), 9.90099e-4, 1e-9);
  EXPECT_DOUBLE_EQ(uu::lr_at_epoch(1e-3, 5e-4, 0), 1e-3);
}

TEST(TrainConfig, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.loss = uu::LossSpec::of(uu::LossKind::zero_one);
  EXPECT_THROW(c.validate(), uu::Error);
  c = small_config();
  c.initial_lr = 0.0;
  EXPECT_THROW(c.validate(), uu::Error);
  c = small_config();
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), uu::Error);
  c = small_config();
  c.epochs = -1;
  EXPECT_THROW(c.validate(), uu::Error);
  EXPECT_EQ(uu::parse_optimizer("adam"), uu::OptimizerKind::adam);
  EXPECT_EQ(uu::parse_objective_form("uu_sym"), uu::ObjectiveForm::uu_sym);
}

TEST(Train, ZeroEpochsReturnsInitialModel) {
  const auto pair = uu::sample_u_pair(kMix, {100, 80, 0.9, 0.4, 1});
  const auto m = uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{2}, 3);
  const auto r = uu::train(m, pair.first, pair.second, uu::PriorTriple::make(0.3, 0.9, 0.4), small_config(0));
  EXPECT_EQ(uu::flat_params(r.model), uu::flat_params(m));
  EXPECT_TRUE(r.history.epochs.empty());
}

TEST(Train, DeterministicHistoryAndParameters) {
  const auto pair = uu::sample_u_pair(kMix, {300, 200, 0.9, 0.4, 2});
  const auto m = uu::init_model(uu::ModelKind::mlp, std::vector<std::size_t>{2, 8, 1}, 4);
  const auto p = uu::PriorTriple::make(0.3, 0.9, 0.4);
  for (auto opt : {uu::OptimizerKind::sgd, uu::OptimizerKind::adam}) {
    auto cfg = small_config();
    cfg.optimizer = opt;
    cfg.initial_lr = 0.01;
    const auto a = uu::train(m, pair.first, pair.second, p, cfg);
    const auto b = uu::train(m, pair.first, pair.second, p, cfg);
    EXPECT_EQ(uu::flat_params(a.model), uu::flat_params(b.model));
    EXPECT_EQ(uu::history_to_csv(a.history), uu::history_to_csv(b.history));
    cfg.seed += 1;
    const auto c = uu::train(m, pair.first, pair.second, p, cfg);
    EXPECT_NE(uu::flat_params(a.model), uu::flat_params(c.model));
  }
}

TEST(Train, EpochIsOnePassOverLargerSet) {
  const auto pair = uu::sample_u_pair(kMix, {100, 250, 0.9, 0.4, 3});
  auto cfg = small_config(3);
  const auto r = uu::train(uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{2}, 1), pair.first,
                           pair.second, uu::PriorTriple::make(0.3, 0.9, 0.4), cfg);
  EXPECT_EQ(r.history.epochs.size(), 3u);
  EXPECT_EQ(r.history.batches, 3u * 8u);  // ceil(250 / 32)
  EXPECT_DOUBLE_EQ(r.history.epochs[2].lr, cfg.initial_lr);
}

TEST(Train, HistoryTracksValidationAndTest) {
  const auto pair = uu::sample_u_pair(kMix, {200, 200, 0.9, 0.4, 4});
  const auto val = uu::sample_u_pair(kMix, {100, 100, 0.9, 0.4, 5});
  auto test_mix = kMix;
  const auto test = uu::sample_mixture(test_mix, 500, 6);
  auto cfg = small_config(4);
  cfg.decay = 0.5;
  const auto r = uu::train(uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{2}, 1), pair.first,
                           pair.second, uu::PriorTriple::make(0.3, 0.9, 0.4), cfg, &val.first, &val.second, &test);
  for (const auto& e : r.history.epochs) {
    EXPECT_TRUE(e.val_risk.has_value());
    EXPECT_TRUE(e.test_error.has_value());
    EXPECT_DOUBLE_EQ(e.lr, uu::lr_at_epoch(cfg.initial_lr, cfg.decay, e.epoch));
  }
  const std::string csv = uu::history_to_csv(r.history);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,train_risk,val_risk,test_error,lr");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Train, LearnsOnMixture) {
  const auto pair = uu::sample_u_pair(kMix, {2000, 1000, 0.9, 0.4, 7});
  auto cfg = small_config(100);
  cfg.batch_size = 128;
  cfg.initial_lr = 0.01;
  const auto r = uu::train(uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{2}, 1), pair.first,
                           pair.second, uu::PriorTriple::make(0.3, 0.9, 0.4), cfg);
  EXPECT_LT(uu::true_risk_gaussian(r.model, kMix, uu::LossSpec::of(uu::LossKind::zero_one)), 0.09);
}

TEST(Train, OneFullBatchStepDescends) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  int decreased = 0;
  for (int t = 0; t < 100; ++t) {
    const double th = u(rng), thp = u(rng);
    if (std::abs(th - thp) < 0.1) {
      --t;
      continue;
    }
    const auto p = uu::PriorTriple::make(u(rng), th, thp);
    const auto pair = uu::sample_u_pair(kMix, {60, 40, th, thp, rng()});
    const auto m = uu::init_model(t % 2 ? uu::ModelKind::mlp : uu::ModelKind::linear,
                                  t % 2 ? std::vector<std::size_t>{2, 6, 1} : std::vector<std::size_t>{2}, rng());
    uu::TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 1000;
    cfg.initial_lr = 1e-3;
    const auto loss = cfg.loss;
    const auto before = uu::empirical_risk_uu(m, pair.first, pair.second, p, loss).value;
    const auto r = uu::train(m, pair.first, pair.second, p, cfg);
    if (uu::empirical_risk_uu(r.model, pair.first, pair.second, p, loss).value < before) ++decreased;
  }
  EXPECT_GE(decreased, 95);
}

TEST(Train, SymmetricObjectiveGivesSameTrajectory) {
  const auto pair = uu::sample_u_pair(kMix, {320, 320, 0.8, 0.3, 9});
  const auto p = uu::PriorTriple::make(0.3, 0.8, 0.3);
  const auto m = uu::init_model(uu::ModelKind::mlp, std::vector<std::size_t>{2, 8, 1}, 10);
  auto cfg = small_config(1);  // 10 steps of 32
  const auto a = uu::train(m, pair.first, pair.second, p, cfg);
  cfg.estimator = uu::ObjectiveForm::uu_sym;
  const auto b = uu::train(m, pair.first, pair.second, p, cfg);
  EXPECT_EQ(a.history.batches, 10u);
  const uu::Vector pa = uu::flat_params(a.model), pb = uu::flat_params(b.model);
  EXPECT_LE((pa - pb).norm(), 1e-7 * pa.norm());

  cfg.loss = uu::LossSpec::of(uu::LossKind::logistic);
  EXPECT_THROW(uu::train(m, pair.first, pair.second, p, cfg), uu::Error);
}

TEST(Train, DivergenceAbortsWithEpoch) {
  const auto pair = uu::sample_u_pair(kMix, {100, 100, 0.55, 0.45, 11});
  auto cfg = small_config(5);
  cfg.loss = uu::LossSpec::of(uu::LossKind::logistic);
  cfg.initial_lr = 1.7e308;
  try {
    uu::train(uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{2}, 1), pair.first, pair.second,
              uu::PriorTriple::make(0.3, 0.55, 0.45), cfg);
    FAIL();
  } catch (const uu::AbortedRun& e) {
    EXPECT_EQ(e.kind(), uu::ErrorKind::aborted_run);
    EXPECT_EQ(e.epoch(), 0);
  }
}

TEST(Train, DimensionMismatch) {
  const auto pair = uu::sample_u_pair(kMix, {50, 50, 0.9, 0.4, 12});
  EXPECT_THROW(uu::train(uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{3}, 1), pair.first,
                         pair.second, uu::PriorTriple::make(0.3, 0.9, 0.4), small_config()),
               uu::Error);
}

TEST(SelectModel, Cases) {
  const auto p = uu::PriorTriple::make(0.3, 0.9, 0.4);
  const auto loss = uu::LossSpec::of(uu::LossKind::sigmoid);
  const auto val = uu::sample_u_pair(kMix, {10000, 10000, 0.9, 0.4, 13});

  std::vector<uu::Candidate> one{{small_config(), uu::LinearModel{uu::Vector::Zero(2), 0.0}}};
  EXPECT_EQ(uu::select_model(one, val.first, val.second, p, loss), 0u);

  std::vector<uu::Candidate> two{{small_config(), uu::LinearModel{uu::Vector::Zero(2), 0.0}},
                                 {small_config(), uu::bayes_scorer(kMix)}};
  EXPECT_EQ(uu::select_model(two, val.first, val.second, p, loss), 1u);

  // Ties go to the lowest index.
  std::vector<uu::Candidate> tie{two[1], two[1]};
  EXPECT_EQ(uu::select_model(tie, val.first, val.second, p, loss), 0u);

  EXPECT_THROW(uu::select_model(std::vector<uu::Candidate>{}, val.first, val.second, p, loss), uu::Error);
}

TEST(SelectModel, DecayGrid) {
  const auto p = uu::PriorTriple::make(0.3, 0.9, 0.4);
  const auto train = uu::sample_u_pair(kMix, {400, 400, 0.9, 0.4, 14});
  const auto val = uu::sample_u_pair(kMix, {400, 400, 0.9, 0.4, 15});
  const auto init = uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{2}, 16);
  std::vector<uu::Candidate> candidates;
  for (double decay : {0.0, 1e-6, 1e-5, 5e-5, 1e-4, 5e-4}) {
    auto cfg = small_config(5);
    cfg.decay = decay;
    candidates.push_back({cfg, uu::train(init, train.first, train.second, p, cfg).model});
  }
  const auto best = uu::select_model(candidates, val.first, val.second, p, uu::LossSpec::of(uu::LossKind::sigmoid));
  EXPECT_LT(best, candidates.size());
}
