#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "it2pf/baselines.hpp"
#include "it2pf/fuzzy_core.hpp"
#include "it2pf/identification.hpp"

namespace it2pf {

/// Root mean square of the per-tick Euclidean error.
double rmse(std::span<const VectorXd> predicted, std::span<const VectorXd> truth);
/// Mean of the per-tick Euclidean error.
double mae(std::span<const VectorXd> predicted, std::span<const VectorXd> truth);

struct Split {
  double train_fraction = 0.10;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SplitResult {
  std::vector<int> train_ids;
  std::vector<int> test_ids;
  Dataset train;
  Dataset test;
};

/// Whole-trial partition: train count = round(fraction * trials), at least 1, at most trials - 1.
SplitResult split_trials(const Dataset& dataset, const Split& split);

enum class ModelKind { IT2PFML, PFMB, TSFMB, LKV };

std::string_view model_name(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view name);
std::vector<ModelKind> default_model_list();

/// Any of the benchmarked interaction models behind one predict call.
class TrainedModel {
 public:
  explicit TrainedModel(IT2PFModel model) : model_(std::move(model)) {}
  explicit TrainedModel(LKVModel model) : model_(std::move(model)) {}

  VectorXd predict(const Sample& s) const;
  const IT2PFModel* fuzzy() const { return std::get_if<IT2PFModel>(&model_); }

 private:
  std::variant<IT2PFModel, LKVModel> model_;
};

/// Trains `kind`. `rule_base`, when given, replaces clustering for the fuzzy models.
TrainedModel train_model(ModelKind kind, const Dataset& dataset, const TrainConfig& config,
                         const RuleBase* rule_base = nullptr);

struct TrialMetrics {
  int trial_id = 0;
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t ticks = 0;
};

struct Evaluation {
  std::vector<TrialMetrics> trials;
  double srmse = 0.0;
  double smae = 0.0;
  double pooled_rmse = 0.0;
  double pooled_mae = 0.0;
};

Evaluation evaluate(const TrainedModel& model, const Dataset& test);

struct BenchmarkRow {
  std::string model;
  std::uint64_t seed = 0;
  double fraction = 0.0;
  int trial_id = 0;
  double rmse = 0.0;
  double mae = 0.0;
};

struct BenchmarkAggregate {
  std::string model;
  std::uint64_t seed = 0;
  double fraction = 0.0;
  double srmse = 0.0;
  double smae = 0.0;
  double pooled_rmse = 0.0;
  std::size_t rules = 0;
  std::string status = "ok";
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkAggregate> aggregates;

  const BenchmarkAggregate* find(std::string_view model, std::uint64_t seed) const;
};

/// Every model is trained on the same whole-trial split per seed and scored on its test trials.
BenchmarkReport run_benchmark(const Dataset& dataset, const std::vector<ModelKind>& models,
                              const TrainConfig& config, double train_fraction,
                              std::span<const std::uint64_t> seeds);

using ModelFactory = std::function<TrainedModel(const Dataset&)>;

struct CurvePoint {
  double fraction = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> rmse;  // pooled test RMSE; empty when training failed
  std::string status = "ok";
};

struct CurveRow {
  double fraction = 0.0;
  std::optional<double> median;
  std::optional<double> q25;
  std::optional<double> q75;
  std::size_t ok = 0;
  std::size_t missing = 0;
};

struct LearningCurve {
  std::vector<CurvePoint> points;
  std::vector<CurveRow> rows;
};

LearningCurve learning_curve(const Dataset& dataset, const ModelFactory& factory,
                             std::span<const double> fractions, std::span<const std::uint64_t> seeds);

/// Linear-interpolated quantile of a non-empty sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out);
void write_learning_curve_csv(const LearningCurve& curve, std::ostream& out);

}  // namespace it2pf
