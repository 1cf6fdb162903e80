#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "it2pf/errors.hpp"
#include "it2pf/metrics.hpp"
#include "it2pf/rng.hpp"

using namespace it2pf;

namespace {

std::vector<VectorXd> series(std::initializer_list<double> v) {
  std::vector<VectorXd> out;
  for (double x : v) out.push_back(VectorXd::Constant(1, x));
  return out;
}

Dataset trials(int count, int per_trial, std::uint64_t seed = 1) {
  Rng rng(seed);
  Dataset d;
  d.dt = 0.01;
  d.n = 1;
  d.m = 1;
  for (int t = 0; t < count; ++t)
    for (int k = 0; k < per_trial; ++k) {
      Sample s;
      s.x = VectorXd::Constant(1, rng.uniform(-1, 1));
      s.v = VectorXd::Constant(1, rng.uniform(-1, 1));
      s.v_next = VectorXd::Constant(1, s.v[0] + rng.uniform(-0.01, 0.01));
      s.y = VectorXd::Constant(1, 2.0 * s.x[0] - 0.7 * s.v[0]);
      d.samples.push_back(s);
      d.trial_ids.push_back(100 + t);
    }
  return d;
}

}  // namespace

TEST(Error, IdenticalSeriesIsZero) {
  const auto a = series({1, 2, 3});
  EXPECT_EQ(rmse(a, a), 0.0);
  EXPECT_EQ(mae(a, a), 0.0);
}

TEST(Error, ConstantOffset) {
  EXPECT_DOUBLE_EQ(rmse(series({1, 2, 3}), series({2, 3, 4})), 1.0);
  EXPECT_DOUBLE_EQ(mae(series({1, 2, 3}), series({2, 3, 4})), 1.0);
}

TEST(Error, HandArithmetic) {
  EXPECT_NEAR(rmse(series({3, 4}), series({0, 0})), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(mae(series({3, 4}), series({0, 0})), 3.5, 1e-15);
}

TEST(Error, EuclideanNormPerTick) {
  std::vector<VectorXd> p{VectorXd::Zero(2)};
  std::vector<VectorXd> t{(VectorXd(2) << 3, 4).finished()};
  EXPECT_DOUBLE_EQ(rmse(p, t), 5.0);
  EXPECT_DOUBLE_EQ(mae(p, t), 5.0);
}

TEST(Error, LengthMismatch) {
  EXPECT_THROW(rmse(series({1}), series({1, 2})), Error);
  EXPECT_THROW(mae(series({}), series({})), Error);
}

TEST(Split, TenNinetyOf150) {
  const SplitResult s = split_trials(trials(150, 3), Split{});
  EXPECT_EQ(s.train_ids.size(), 15u);
  EXPECT_EQ(s.test_ids.size(), 135u);
  std::set<int> all(s.train_ids.begin(), s.train_ids.end());
  for (int id : s.test_ids) EXPECT_TRUE(all.insert(id).second);
  EXPECT_EQ(all.size(), 150u);
  EXPECT_EQ(s.train.size() + s.test.size(), 450u);
}

TEST(Split, TwoTrialsFloorRule) {
  const SplitResult s = split_trials(trials(2, 3), Split{});
  EXPECT_EQ(s.train_ids.size(), 1u);
  EXPECT_EQ(s.test_ids.size(), 1u);
}

TEST(Split, SameSeedSamePartition) {
  const Dataset d = trials(40, 2);
  Split sp;
  sp.seed = 9;
  EXPECT_EQ(split_trials(d, sp).train_ids, split_trials(d, sp).train_ids);
  sp.seed = 10;
  const auto other = split_trials(d, sp).train_ids;
  sp.seed = 9;
  EXPECT_NE(split_trials(d, sp).train_ids, other);
}

TEST(Split, InvalidInputs) {
  EXPECT_THROW(split_trials(trials(1, 3), Split{}), Error);
  Split sp;
  sp.train_fraction = 1.0;
  EXPECT_THROW(sp.validate(), Error);
}

TEST(Quantile, Interpolates) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
}

TEST(Benchmark, SrmseIsSumOfTrialRmse) {
  const Dataset d = trials(10, 20);
  TrainConfig cfg;
  cfg.degree = 0;
  cfg.rule_count = 1;
  const std::vector<std::uint64_t> seeds{1, 2};
  const BenchmarkReport r = run_benchmark(d, {ModelKind::TSFMB, ModelKind::LKV}, cfg, 0.3, seeds);
  ASSERT_EQ(r.aggregates.size(), 4u);
  for (const BenchmarkAggregate& a : r.aggregates) {
    double s = 0.0;
    double m = 0.0;
    for (const BenchmarkRow& row : r.rows)
      if (row.model == a.model && row.seed == a.seed) {
        s += row.rmse;
        m += row.mae;
        EXPECT_GE(row.rmse, 0.0);
      }
    EXPECT_NEAR(a.srmse, s, 1e-12);
    EXPECT_NEAR(a.smae, m, 1e-12);
  }
}

TEST(Benchmark, SingleTestTrial) {
  const Dataset d = trials(2, 30);
  TrainConfig cfg;
  const std::vector<std::uint64_t> seeds{1};
  const BenchmarkReport r = run_benchmark(d, {ModelKind::LKV}, cfg, 0.5, seeds);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(r.aggregates[0].srmse, r.rows[0].rmse);
}

TEST(Benchmark, DuplicateModelsMatch) {
  const Dataset d = trials(8, 20);
  TrainConfig cfg;
  cfg.degree = 1;
  cfg.rule_count = 2;
  const std::vector<std::uint64_t> seeds{3};
  const BenchmarkReport r = run_benchmark(d, {ModelKind::PFMB, ModelKind::PFMB}, cfg, 0.5, seeds);
  ASSERT_EQ(r.aggregates.size(), 2u);
  EXPECT_EQ(r.aggregates[0].srmse, r.aggregates[1].srmse);
  EXPECT_EQ(r.aggregates[0].smae, r.aggregates[1].smae);
}

TEST(Curve, NoiselessLinearIsFlatZero) {
  const Dataset d = trials(20, 30);
  TrainConfig cfg;
  cfg.degree = 0;
  cfg.rule_count = 1;
  const std::vector<double> fractions{0.1, 0.25, 0.5};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const LearningCurve lc = learning_curve(
      d, [&cfg](const Dataset& t) { return train_model(ModelKind::IT2PFML, t, cfg); }, fractions, seeds);
  ASSERT_EQ(lc.rows.size(), 3u);
  for (const CurveRow& r : lc.rows) {
    ASSERT_TRUE(r.median.has_value());
    EXPECT_LT(*r.median, 1e-6);
  }
}

TEST(Curve, SingleFractionMatchesBenchmark) {
  const Dataset d = trials(10, 20);
  TrainConfig cfg;
  cfg.degree = 0;
  cfg.rule_count = 2;
  const std::vector<double> fractions{0.3};
  const std::vector<std::uint64_t> seeds{5};
  const LearningCurve lc = learning_curve(
      d, [&cfg](const Dataset& t) { return train_model(ModelKind::TSFMB, t, cfg); }, fractions, seeds);
  const BenchmarkReport b = run_benchmark(d, {ModelKind::TSFMB}, cfg, 0.3, seeds);
  EXPECT_DOUBLE_EQ(*lc.points[0].rmse, b.aggregates[0].pooled_rmse);
}

TEST(Curve, TrainingFailureIsMissing) {
  const Dataset d = trials(10, 20);
  const std::vector<double> fractions{0.3};
  const std::vector<std::uint64_t> seeds{1, 2};
  const LearningCurve lc = learning_curve(
      d, [](const Dataset&) -> TrainedModel { fail(ErrorCategory::Training, "no"); }, fractions, seeds);
  EXPECT_EQ(lc.rows[0].missing, 2u);
  EXPECT_FALSE(lc.rows[0].median.has_value());
}

TEST(Report, CsvIsDeterministic) {
  const Dataset d = trials(6, 10);
  const std::vector<std::uint64_t> seeds{1};
  const BenchmarkReport r = run_benchmark(d, {ModelKind::LKV}, TrainConfig{}, 0.5, seeds);
  std::ostringstream a;
  std::ostringstream b;
  write_benchmark_csv(r, a);
  write_benchmark_csv(run_benchmark(d, {ModelKind::LKV}, TrainConfig{}, 0.5, seeds), b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("lkv"), std::string::npos);
}
