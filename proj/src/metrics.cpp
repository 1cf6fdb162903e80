#include "it2pf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "it2pf/errors.hpp"
#include "it2pf/rng.hpp"

namespace it2pf {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_series(std::span<const VectorXd> predicted, std::span<const VectorXd> truth) {
  require(predicted.size() == truth.size(), ErrorCategory::Shape, "metric: series length mismatch");
  require(!truth.empty(), ErrorCategory::EmptyInput, "metric: empty series");
}

}  // namespace

double rmse(std::span<const VectorXd> predicted, std::span<const VectorXd> truth) {
  check_series(predicted, truth);
  double se = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) se += (predicted[k] - truth[k]).squaredNorm();
  return std::sqrt(se / static_cast<double>(truth.size()));
}

double mae(std::span<const VectorXd> predicted, std::span<const VectorXd> truth) {
  check_series(predicted, truth);
  double ae = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) ae += (predicted[k] - truth[k]).norm();
  return ae / static_cast<double>(truth.size());
}

void Split::validate() const {
  require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCategory::Parameter,
          "split: train fraction must lie in (0, 1)");
}

SplitResult split_trials(const Dataset& dataset, const Split& split) {
  split.validate();
  std::vector<int> ids = dataset.trials();
  require(ids.size() >= 2, ErrorCategory::Parameter, "split needs at least two trials");
  std::sort(ids.begin(), ids.end());
  Rng rng(split.seed);
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(ids[i], ids[j]);
  }
  const auto total = static_cast<long long>(ids.size());
  long long count = std::llround(split.train_fraction * static_cast<double>(total));
  count = std::clamp(count, 1LL, total - 1);

  SplitResult out;
  out.train_ids.assign(ids.begin(), ids.begin() + count);
  out.test_ids.assign(ids.begin() + count, ids.end());
  std::sort(out.train_ids.begin(), out.train_ids.end());
  std::sort(out.test_ids.begin(), out.test_ids.end());
  out.train = dataset.subset(out.train_ids);
  out.test = dataset.subset(out.test_ids);
  return out;
}

std::string_view model_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::IT2PFML: return "it2pfml";
    case ModelKind::PFMB: return "pfmb";
    case ModelKind::TSFMB: return "tsfmb";
    case ModelKind::LKV: return "lkv";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : default_model_list())
    if (model_name(k) == name) return k;
  fail(ErrorCategory::Config, "unknown model '" + std::string(name) + "'");
}

std::vector<ModelKind> default_model_list() {
  return {ModelKind::IT2PFML, ModelKind::PFMB, ModelKind::TSFMB, ModelKind::LKV};
}

VectorXd TrainedModel::predict(const Sample& s) const {
  if (const auto* fuzzy_model = std::get_if<IT2PFModel>(&model_)) return fuzzy_model->predict(s).y;
  return std::get<LKVModel>(model_).predict(s.x, s.v);
}

TrainedModel train_model(ModelKind kind, const Dataset& dataset, const TrainConfig& config,
                         const RuleBase* rule_base) {
  switch (kind) {
    case ModelKind::LKV:
      return TrainedModel(fit_lkv(dataset));
    case ModelKind::IT2PFML:
      return TrainedModel(rule_base ? fit_consequents(dataset, config, *rule_base).model
                                    : train(dataset, config).model);
    case ModelKind::PFMB:
      return TrainedModel(rule_base ? fit_pfmb(dataset, config, *rule_base).model
                                    : fit_pfmb(dataset, config).model);
    case ModelKind::TSFMB:
      return TrainedModel(rule_base ? fit_tsfmb(dataset, config, *rule_base).model
                                    : fit_tsfmb(dataset, config).model);
  }
  fail(ErrorCategory::Parameter, "unknown model kind");
}

Evaluation evaluate(const TrainedModel& model, const Dataset& test) {
  require(!test.samples.empty(), ErrorCategory::EmptyInput, "evaluate: empty test set");
  std::map<int, std::pair<std::vector<VectorXd>, std::vector<VectorXd>>> by_trial;
  double se = 0.0;
  double ae = 0.0;
  for (std::size_t k = 0; k < test.size(); ++k) {
    const Sample& s = test.samples[k];
    VectorXd y = model.predict(s);
    const double e = (y - s.y).norm();
    se += e * e;
    ae += e;
    auto& slot = by_trial[test.trial_ids[k]];
    slot.first.push_back(std::move(y));
    slot.second.push_back(s.y);
  }
  Evaluation ev;
  for (const auto& [id, series] : by_trial) {
    TrialMetrics tm;
    tm.trial_id = id;
    tm.rmse = rmse(series.first, series.second);
    tm.mae = mae(series.first, series.second);
    tm.ticks = series.first.size();
    ev.srmse += tm.rmse;
    ev.smae += tm.mae;
    ev.trials.push_back(tm);
  }
  ev.pooled_rmse = std::sqrt(se / static_cast<double>(test.size()));
  ev.pooled_mae = ae / static_cast<double>(test.size());
  return ev;
}

const BenchmarkAggregate* BenchmarkReport::find(std::string_view model, std::uint64_t seed) const {
  for (const BenchmarkAggregate& a : aggregates)
    if (a.model == model && a.seed == seed) return &a;
  return nullptr;
}

BenchmarkReport run_benchmark(const Dataset& dataset, const std::vector<ModelKind>& models,
                              const TrainConfig& config, double train_fraction,
                              std::span<const std::uint64_t> seeds) {
  require(!models.empty(), ErrorCategory::Parameter, "benchmark needs at least one model");
  require(!seeds.empty(), ErrorCategory::Parameter, "benchmark needs at least one seed");
  BenchmarkReport report;
  for (std::uint64_t seed : seeds) {
    const SplitResult split = split_trials(dataset, Split{train_fraction, seed});
    std::optional<RuleBase> rule_base;
    std::string rule_base_error;
    for (ModelKind kind : models) {
      BenchmarkAggregate agg;
      agg.model = std::string(model_name(kind));
      agg.seed = seed;
      agg.fraction = train_fraction;
      try {
        if (kind != ModelKind::LKV && !rule_base) {
          if (!rule_base_error.empty()) fail(ErrorCategory::Training, rule_base_error);
          try {
            rule_base = identify_rule_base(split.train, config);
          } catch (const Error& e) {
            rule_base_error = std::string("clustering: ") + e.what();
            throw;
          }
        }
        const TrainedModel model =
            train_model(kind, split.train, config, rule_base ? &*rule_base : nullptr);
        const Evaluation ev = evaluate(model, split.test);
        for (const TrialMetrics& tm : ev.trials)
          report.rows.push_back({agg.model, seed, train_fraction, tm.trial_id, tm.rmse, tm.mae});
        agg.srmse = ev.srmse;
        agg.smae = ev.smae;
        agg.pooled_rmse = ev.pooled_rmse;
        agg.rules = model.fuzzy() ? model.fuzzy()->rule_count() : 0;
      } catch (const Error& e) {
        agg.status = std::string("failed:") + category_name(e.category());
      }
      report.aggregates.push_back(agg);
    }
  }
  return report;
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorCategory::EmptyInput, "quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

LearningCurve learning_curve(const Dataset& dataset, const ModelFactory& factory,
                             std::span<const double> fractions, std::span<const std::uint64_t> seeds) {
  require(std::is_sorted(fractions.begin(), fractions.end()), ErrorCategory::Parameter,
          "learning curve fractions must be sorted ascending");
  LearningCurve curve;
  for (double fraction : fractions) {
    CurveRow row;
    row.fraction = fraction;
    std::vector<double> values;
    for (std::uint64_t seed : seeds) {
      CurvePoint point;
      point.fraction = fraction;
      point.seed = seed;
      try {
        const SplitResult split = split_trials(dataset, Split{fraction, seed});
        const TrainedModel model = factory(split.train);
        point.rmse = evaluate(model, split.test).pooled_rmse;
        values.push_back(*point.rmse);
        ++row.ok;
      } catch (const Error& e) {
        point.status = std::string("missing:") + category_name(e.category());
        ++row.missing;
      }
      curve.points.push_back(point);
    }
    if (!values.empty()) {
      row.median = quantile(values, 0.5);
      row.q25 = quantile(values, 0.25);
      row.q75 = quantile(values, 0.75);
    }
    curve.rows.push_back(row);
  }
  return curve;
}

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out) {
  out << "# it2pf-benchmark v1\n";
  out << "model,seed,fraction,trial_id,rmse,mae\n";
  for (const BenchmarkRow& r : report.rows) {
    out << r.model << ',' << r.seed << ',' << fmt(r.fraction) << ',' << r.trial_id << ',' << fmt(r.rmse)
        << ',' << fmt(r.mae) << '\n';
  }
  out << "# aggregate\n";
  out << "model,seed,fraction,srmse,smae,pooled_rmse,rules,status\n";
  for (const BenchmarkAggregate& a : report.aggregates) {
    out << a.model << ',' << a.seed << ',' << fmt(a.fraction) << ',' << fmt(a.srmse) << ',' << fmt(a.smae)
        << ',' << fmt(a.pooled_rmse) << ',' << a.rules << ',' << a.status << '\n';
  }
}

void write_learning_curve_csv(const LearningCurve& curve, std::ostream& out) {
  const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  out << "# it2pf-learning-curve v1\n";
  out << "fraction,seed,rmse,status\n";
  for (const CurvePoint& p : curve.points)
    out << fmt(p.fraction) << ',' << p.seed << ',' << opt(p.rmse) << ',' << p.status << '\n';
  out << "# summary\n";
  out << "fraction,median_rmse,q25_rmse,q75_rmse,ok,missing\n";
  for (const CurveRow& r : curve.rows)
    out << fmt(r.fraction) << ',' << opt(r.median) << ',' << opt(r.q25) << ',' << opt(r.q75) << ',' << r.ok
        << ',' << r.missing << '\n';
}

}  // namespace it2pf
