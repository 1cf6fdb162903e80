#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "it2pf/baselines.hpp"
#include "it2pf/cli.hpp"
#include "it2pf/config.hpp"
#include "it2pf/dataset_io.hpp"
#include "it2pf/env_sim.hpp"
#include "it2pf/errors.hpp"
#include "it2pf/identification.hpp"
#include "it2pf/metrics.hpp"
#include "it2pf/model_io.hpp"
#include "it2pf/peg_sim.hpp"
#include "it2pf/rng.hpp"

using namespace it2pf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

Outcome baseline_ranking() {
  const ExperimentConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset ds = generate_benchmark(cfg.env, cfg.protocol).recording.to_dataset();
  const BenchmarkReport r =
      run_benchmark(ds, cfg.benchmark_models, cfg.train, cfg.split.train_fraction, cfg.benchmark_seeds);
  const double runtime = seconds_since(t0);
  const char* order[] = {"it2pfml", "pfmb", "tsfmb", "lkv"};
  int good = 0;
  std::string per_seed;
  for (std::uint64_t seed : cfg.benchmark_seeds) {
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      const BenchmarkAggregate* a = r.find(order[i], seed);
      const BenchmarkAggregate* b = r.find(order[i + 1], seed);
      ok = ok && a && b && a->status == "ok" && b->status == "ok" && a->srmse < b->srmse && a->smae < b->smae;
    }
    good += ok ? 1 : 0;
    per_seed += " s" + std::to_string(seed) + "=" + (ok ? "ok" : "x");
  }
  Outcome o;
  o.pass = good >= 4 && runtime < 300.0;
  o.detail = "strict SRMSE and SMAE ordering on " + std::to_string(good) + "/" +
             std::to_string(cfg.benchmark_seeds.size()) + " seeds (need 4)," + per_seed + ", runtime " +
             num(runtime, 3) + " s (limit 300)";
  return o;
}

Outcome few_shot_trend() {
  const ExperimentConfig cfg;
  const Dataset ds = generate_benchmark(cfg.env, cfg.protocol).recording.to_dataset();
  const TrainConfig tc = curve_train_config(cfg);
  const ModelKind kind = cfg.curve_model;
  const LearningCurve lc = learning_curve(
      ds, [&](const Dataset& d) { return train_model(kind, d, tc); }, cfg.curve_fractions, cfg.curve_seeds);
  bool monotone = true;
  std::string medians;
  std::optional<double> at10, at50;
  for (std::size_t i = 0; i < lc.rows.size(); ++i) {
    const CurveRow& row = lc.rows[i];
    if (!row.median) {
      monotone = false;
      medians += " " + num(row.fraction, 2) + ":missing";
      continue;
    }
    medians += " " + num(row.fraction, 2) + ":" + num(*row.median, 4);
    if (i > 0 && lc.rows[i - 1].median && *row.median > 1.05 * *lc.rows[i - 1].median) monotone = false;
    if (std::abs(row.fraction - 0.10) < 1e-12) at10 = row.median;
    if (std::abs(row.fraction - 0.50) < 1e-12) at50 = row.median;
  }
  const bool ratio = at10 && at50 && *at10 <= 1.25 * *at50;
  Outcome o;
  o.pass = monotone && ratio;
  o.detail = "median RMSE" + medians + "; non-increasing within 5%: " + (monotone ? "yes" : "no") +
             "; RMSE(0.10)/RMSE(0.50) = " + (at10 && at50 ? num(*at10 / *at50, 4) : std::string("n/a")) +
             " (limit 1.25)";
  return o;
}

// Press trajectories of the default protocol with a linear ground-truth force.
Dataset linear_env(const Eigen::Vector3d& K, const Eigen::Vector3d& C, double noise, std::uint64_t seed) {
  PressProtocol p;
  p.position_noise = 0.0;
  p.force_noise = 0.0;
  p.trials_per_level = 10;
  Recording rec = generate_benchmark(default_silicone_env(), p).recording;
  Rng rng(seed);
  for (Tick& t : rec.ticks) t.y = VectorXd::Constant(1, K.dot(t.x) + C.dot(t.v) + noise * rng.normal());
  return rec.to_dataset();
}

// Independent OLS on [a, v, x, 1] columns.
VectorXd ols_coefficients(const Dataset& d) {
  MatrixXd X(static_cast<Eigen::Index>(d.size()), 10);
  VectorXd y(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Sample& s = d.samples[i];
    const auto r = static_cast<Eigen::Index>(i);
    X.block(r, 0, 1, 3) = ((s.v_next - s.v) / d.dt).transpose();
    X.block(r, 3, 1, 3) = s.v.transpose();
    X.block(r, 6, 1, 3) = s.x.transpose();
    X(r, 9) = 1.0;
    y[r] = s.y[0];
  }
  return X.colPivHouseholderQr().solve(y);
}

VectorXd model_coefficients(const IT2PFModel& m) {
  const PolynomialConsequent& c = m.rules[0].consequent;
  VectorXd out(10);
  for (int j = 0; j < 3; ++j) {
    out[j] = c.coeffs_M(j, 0);
    out[3 + j] = c.coeffs_C(j, 0);
    out[6 + j] = c.coeffs_K(j, 0);
  }
  out[9] = c.coeffs_f(0, 0);
  return out;
}

Outcome oracle_equivalence() {
  const Eigen::Vector3d K(40.0, -25.0, -800.0);
  const Eigen::Vector3d C(0.0, 0.0, -4.0);
  TrainConfig cfg;
  cfg.degree = 0;
  cfg.rule_count = 1;

  const Dataset clean = linear_env(K, C, 0.0, 1);
  const TrainResult fit = train(clean, cfg);
  const VectorXd got = model_coefficients(fit.model);
  const VectorXd oracle = ols_coefficients(clean);
  double truth_err = 0.0;
  double oracle_err = 0.0;
  for (int j = 0; j < 3; ++j) {
    truth_err = std::max({truth_err, rel_err(got[6 + j], K[j])});
    oracle_err = std::max({oracle_err, rel_err(got[6 + j], oracle[6 + j])});
  }
  truth_err = std::max(truth_err, rel_err(got[5], C[2]));
  oracle_err = std::max(oracle_err, rel_err(got[5], oracle[5]));

  const Dataset noisy = linear_env(K, C, 0.01, 2);
  TrainConfig wide = cfg;
  wide.huber_k = 1e12;
  const VectorXd irls = model_coefficients(train(noisy, wide).model);
  const VectorXd ls = ols_coefficients(noisy);
  const double irls_err = (irls - ls).cwiseAbs().maxCoeff();

  Outcome o;
  o.pass = truth_err <= 1e-6 && oracle_err <= 1e-6 && irls_err <= 1e-9;
  o.detail = "K,C relative error vs truth " + num(truth_err, 3) + ", vs OLS " + num(oracle_err, 3) +
             " (limit 1e-6); IRLS vs OLS max abs diff " + num(irls_err, 3) + " (limit 1e-9)";
  return o;
}

Outcome model_class_collapses() {
  const ExperimentConfig exp;
  PressProtocol p = exp.protocol;
  p.trials_per_level = 10;
  const Dataset ds = generate_benchmark(exp.env, p).recording.to_dataset();
  TrainConfig cfg = exp.train;
  const RuleBase rb = identify_rule_base(ds, cfg);

  TrainConfig it2 = cfg;
  it2.delta = 0.0;
  const IT2PFModel a = fit_consequents(ds, it2, rb).model;
  const IT2PFModel b = fit_pfmb(ds, cfg, rb).model;
  TrainConfig deg0 = cfg;
  deg0.degree = 0;
  const IT2PFModel c = fit_pfmb(ds, deg0, rb).model;
  const IT2PFModel d = fit_tsfmb(ds, cfg, rb).model;
  double delta_gap = 0.0;
  double degree_gap = 0.0;
  for (const Sample& s : ds.samples) {
    delta_gap = std::max(delta_gap, (a.predict(s).y - b.predict(s).y).cwiseAbs().maxCoeff());
    degree_gap = std::max(degree_gap, (c.predict(s).y - d.predict(s).y).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = delta_gap <= 1e-12 && degree_gap <= 1e-12;
  o.detail = "delta=0 IT2 vs PFMB max gap " + num(delta_gap, 3) + ", degree-0 PFMB vs TSFMB max gap " +
             num(degree_gap, 3) + " over " + std::to_string(ds.size()) + " samples (limit 1e-12)";
  return o;
}

Outcome inference_invariants() {
  Rng rng(2024);
  const int cases = 10000;
  int ordering = 0, normalization = 0, fallback = 0, symmetry = 0;
  for (int i = 0; i < cases; ++i) {
    const int dims = 1 + static_cast<int>(rng.below(6));
    const int rules = 1 + static_cast<int>(rng.below(6));
    const double delta = rng.uniform(0.0, 0.9);
    std::vector<RulePremise> prem(static_cast<std::size_t>(rules));
    for (RulePremise& r : prem)
      for (int d = 0; d < dims; ++d) r.sets.emplace_back(rng.uniform(-2, 2), rng.uniform(0.05, 2), delta);
    VectorXd z(dims);
    for (int d = 0; d < dims; ++d) z[d] = rng.uniform(-4, 4);

    std::vector<FiringInterval> iv;
    for (const RulePremise& r : prem) {
      for (const IT2Gaussian& g : r.sets) {
        const FiringInterval f = g.eval(z[&g - r.sets.data()]);
        if (!(0.0 <= f.lower && f.lower <= f.upper && f.upper <= 1.0)) ++ordering;
      }
      const FiringInterval f = firing_interval(r, FeatureVector(z));
      if (!(0.0 <= f.lower && f.lower <= f.upper && f.upper <= 1.0)) ++ordering;
      iv.push_back(f);
    }

    TypeReductionConfig tr;
    tr.b_lower = rng.uniform();
    tr.b_upper = 1.0 - tr.b_lower;
    const TypeReducedWeights w = type_reduce(iv, tr);
    double sum = 0.0;
    for (double x : w.weights) {
      if (!(x >= 0.0)) ++normalization;
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) ++normalization;

    const std::vector<FiringInterval> dead(iv.size(), FiringInterval{0.0, 0.0});
    const TypeReducedWeights u = type_reduce(dead, tr);
    bool uniform = u.degenerate;
    for (double x : u.weights) uniform = uniform && std::abs(x - 1.0 / static_cast<double>(iv.size())) <= 1e-15;
    if (!uniform) ++fallback;

    std::vector<FiringInterval> collapsed;
    for (const FiringInterval& f : iv) collapsed.push_back({f.upper, f.upper});
    TypeReductionConfig flipped{tr.b_upper, tr.b_lower};
    const TypeReducedWeights c1 = type_reduce(collapsed, tr);
    const TypeReducedWeights c2 = type_reduce(collapsed, flipped);
    const TypeReducedWeights c3 = type_reduce(collapsed, TypeReductionConfig{0.5, 0.5});
    for (std::size_t l = 0; l < collapsed.size(); ++l)
      if (std::abs(c1.weights[l] - c2.weights[l]) > 1e-12 || std::abs(c1.weights[l] - c3.weights[l]) > 1e-12) {
        ++symmetry;
        break;
      }
  }
  const int total = ordering + normalization + fallback + symmetry;
  Outcome o;
  o.pass = total == 0;
  o.detail = std::to_string(cases) + " randomized cases: membership ordering " + std::to_string(ordering) +
             ", normalization " + std::to_string(normalization) + ", degenerate fallback " + std::to_string(fallback) +
             ", b-symmetry " + std::to_string(symmetry) + " violations";
  return o;
}

Outcome peg_transfer() {
  const ExperimentConfig cfg;
  std::vector<Demonstration> demos;
  for (std::size_t i = 0; i < cfg.demo_seeds.size(); ++i) {
    const ScriptPair s = make_scripts(cfg.peg, cfg.op, cfg.demo_seeds[i]);
    demos.push_back(record_demonstration(cfg.peg, s.left, s.right, static_cast<int>(i), true, cfg.demo_seeds[i]));
  }
  const RPModels models = train_rp(demos, effective_rp_config(cfg));
  RPController rp(models.motion.model, models.gripper.model, cfg.rp.tau_ticks * cfg.peg.dt, cfg.peg);

  bool causal = true;
  const RightPolicy policy = [&](std::span<const OperatorState> history, std::size_t k, const GripperState& right,
                                 bool& degenerate) {
    if (history.size() != k + 1) causal = false;
    const RPController::Command c = rp.step(history, k, right);
    degenerate = c.motion_degenerate || c.gripper_degenerate;
    return c.target;
  };

  int completed = 0;
  int invariant_failures = 0;
  double time_sum = 0.0;
  std::string failures;
  for (std::uint64_t seed : cfg.episode_seeds) {
    rp.reset();
    const ScriptPair s = make_scripts(cfg.peg, cfg.op, seed);
    const EpisodeReport ep = run_episode(cfg.peg, s.left, policy, seed);
    if (!ep.invariants_ok) ++invariant_failures;
    if (ep.completed && ep.both_held_ticks >= 1) {
      ++completed;
      time_sum += ep.completion_time;
    } else {
      failures += " " + std::to_string(seed) + ":" + ep.phase;
    }
  }
  const double mean_time = completed ? time_sum / completed : std::nan("");
  Outcome o;
  o.pass = completed >= 19 && mean_time <= 27.0 && invariant_failures == 0 && causal;
  o.detail = "completed with handover " + std::to_string(completed) + "/" + std::to_string(cfg.episode_seeds.size()) +
             " (need 19), mean completion " + num(mean_time, 4) + " s (limit 27), invariant failures " +
             std::to_string(invariant_failures) + ", causal " + (causal ? "yes" : "no") +
             (failures.empty() ? "" : ", failed:" + failures);
  return o;
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  if (code != kExitOk) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "it2pf_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };
  bool ran = cli({"benchmark", "-o", p("bench_a.csv")}) == kExitOk && cli({"benchmark", "-o", p("bench_b.csv")}) == kExitOk &&
             cli({"gen-demo", "-o", p("demos")}) == kExitOk &&
             cli({"train-rp", "--demos", p("demos"), "-o", p("models")}) == kExitOk &&
             cli({"run-peg", "--models", p("models"), "-o", p("peg_a.csv")}) == kExitOk &&
             cli({"run-peg", "--models", p("models"), "-o", p("peg_b.csv")}) == kExitOk;
  if (!ran) return {false, "a CLI run failed"};
  const bool bench_same = read_file(p("bench_a.csv")) == read_file(p("bench_b.csv"));
  const bool peg_same = read_file(p("peg_a.csv")) == read_file(p("peg_b.csv"));

  double max_diff = 0.0;
  Rng rng(77);
  for (const char* name : {"motion_model.json", "gripper_model.json"}) {
    const IT2PFModel loaded = load_model(dir / "models" / name);
    const IT2PFModel again = model_from_string(model_to_string(loaded));
    for (int i = 0; i < 1000; ++i) {
      VectorXd x(loaded.n), v(loaded.n), vn(loaded.n);
      for (int d = 0; d < loaded.n; ++d) {
        x[d] = loaded.norm.mean[d] + loaded.norm.scale[d] * rng.normal();
        v[d] = loaded.norm.mean[loaded.n + d] + loaded.norm.scale[loaded.n + d] * rng.normal();
        vn[d] = loaded.norm.mean[2 * loaded.n + d] + loaded.norm.scale[2 * loaded.n + d] * rng.normal();
      }
      max_diff = std::max(max_diff, (loaded.predict(x, v, vn).y - again.predict(x, v, vn).y).cwiseAbs().maxCoeff());
    }
  }
  Outcome o;
  o.pass = bench_same && peg_same && max_diff <= 1e-15;
  o.detail = std::string("benchmark files identical: ") + (bench_same ? "yes" : "no") +
             ", run-peg files identical: " + (peg_same ? "yes" : "no") + ", model round-trip max prediction diff " +
             num(max_diff, 3) + " (limit 1e-15)";
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"baseline ranking", baseline_ranking},     {"few-shot trend", few_shot_trend},
      {"oracle equivalence", oracle_equivalence}, {"model-class collapses", model_class_collapses},
      {"inference invariants", inference_invariants}, {"peg transfer", peg_transfer},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  int index = 1;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
    ++index;
  }
  return failed == 0 ? 0 : 1;
}
