#include "it2pf/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "it2pf/config.hpp"
#include "it2pf/dataset_io.hpp"
#include "it2pf/env_sim.hpp"
#include "it2pf/errors.hpp"
#include "it2pf/metrics.hpp"
#include "it2pf/model_io.hpp"
#include "it2pf/peg_sim.hpp"

namespace it2pf {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;

  ExperimentConfig load() const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    for (const std::string& o : overrides) apply_override(c, o);
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("-c,--config", common.config_path, "Experiment config (INI)");
  cmd->add_option("--set", common.overrides, "Override section.key=value")->allow_extra_args(false);
}

Dataset env_dataset(const ExperimentConfig& c, const std::string& data_path) {
  const Recording rec =
      data_path.empty() ? generate_benchmark(c.env, c.protocol).recording : load_recording(data_path);
  return rec.to_dataset();
}

const char* motion_file = "h_mt.csv";
const char* gripper_file = "h_ga.csv";
const char* motion_model_file = "motion_model.json";
const char* gripper_model_file = "gripper_model.json";

void write_text(const std::string& path, const std::string& text) { write_file_atomic(path, text); }

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"it2pf: interval type-2 polynomial fuzzy interaction models"};
  app.require_subcommand(1);
  Common common;
  std::string data, output, model_path, report_path, kind_name = "it2pfml", dir, trace_dir;

  CLI::App* gen_env = app.add_subcommand("gen-env", "Generate the silicone press benchmark recording");
  add_common(gen_env, common);
  gen_env->add_option("-o,--out", output, "Output dataset CSV")->required();

  CLI::App* train_cmd = app.add_subcommand("train", "Fit a fuzzy model to a dataset CSV");
  add_common(train_cmd, common);
  train_cmd->add_option("-d,--data", data, "Dataset CSV")->required();
  train_cmd->add_option("-o,--out", output, "Output model file")->required();
  train_cmd->add_option("--report", report_path, "Output fit report");
  train_cmd->add_option("--kind", kind_name, "it2pfml, pfmb or tsfmb")
      ->check(CLI::IsMember({"it2pfml", "pfmb", "tsfmb"}));

  CLI::App* predict_cmd = app.add_subcommand("predict", "Evaluate a saved model on a dataset CSV");
  add_common(predict_cmd, common);
  predict_cmd->add_option("-m,--model", model_path, "Model file")->required();
  predict_cmd->add_option("-d,--data", data, "Dataset CSV")->required();
  predict_cmd->add_option("-o,--out", output, "Output predictions CSV");

  CLI::App* bench = app.add_subcommand("benchmark", "Compare models on whole-trial splits");
  add_common(bench, common);
  bench->add_option("-d,--data", data, "Dataset CSV (default: generate from config)");
  bench->add_option("-o,--out", output, "Output report CSV")->required();

  CLI::App* curve = app.add_subcommand("learning-curve", "Test RMSE against training fraction");
  add_common(curve, common);
  curve->add_option("-d,--data", data, "Dataset CSV (default: generate from config)");
  curve->add_option("-o,--out", output, "Output curve CSV")->required();

  CLI::App* gen_demo = app.add_subcommand("gen-demo", "Record seeded peg-transfer demonstrations");
  add_common(gen_demo, common);
  gen_demo->add_option("-o,--out-dir", dir, "Output directory")->required();

  CLI::App* train_rp_cmd = app.add_subcommand("train-rp", "Train the Robotic Partner models");
  add_common(train_rp_cmd, common);
  train_rp_cmd->add_option("--demos", data, "Directory written by gen-demo")->required();
  train_rp_cmd->add_option("-o,--out-dir", dir, "Output directory")->required();

  CLI::App* run_peg = app.add_subcommand("run-peg", "Run seeded peg-transfer episodes with the trained partner");
  add_common(run_peg, common);
  run_peg->add_option("--models", model_path, "Directory written by train-rp")->required();
  run_peg->add_option("-o,--out", output, "Output episode summary CSV")->required();
  run_peg->add_option("--trace-dir", trace_dir, "Write one trace CSV per episode here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const ExperimentConfig cfg = common.load();

    if (*gen_env) {
      const BenchmarkData bench_data = generate_benchmark(cfg.env, cfg.protocol);
      save_recording(bench_data.recording, output);
      out << "wrote " << bench_data.trials.size() << " trials to " << output << '\n';
    } else if (*train_cmd) {
      const Dataset ds = load_recording(data).to_dataset();
      const ModelKind kind = parse_model_kind(kind_name);
      TrainResult result = kind == ModelKind::PFMB    ? fit_pfmb(ds, cfg.train)
                           : kind == ModelKind::TSFMB ? fit_tsfmb(ds, cfg.train)
                                                      : train(ds, cfg.train);
      save_model(result.model, output);
      if (!report_path.empty()) write_text(report_path, fit_report_to_string(result.report));
      out << "rules=" << result.model.rule_count() << " train_rmse=" << fmt(result.report.train_rmse) << '\n';
    } else if (*predict_cmd) {
      const IT2PFModel model = load_model(model_path);
      const Dataset ds = load_recording(data).to_dataset();
      require(ds.channel == model.channel && ds.n == model.n && ds.m == model.m, ErrorCategory::Shape,
              "predict: dataset channel or shape does not match the model");
      std::ostringstream csv;
      csv << "# it2pf-predictions v1\ntrial_id,index";
      for (int i = 1; i <= model.m; ++i) csv << ",y" << i;
      for (int i = 1; i <= model.m; ++i) csv << ",yhat" << i;
      csv << ",degenerate\n";
      double se = 0.0;
      for (std::size_t k = 0; k < ds.size(); ++k) {
        const Prediction p = model.predict(ds.samples[k]);
        se += (p.y - ds.samples[k].y).squaredNorm();
        csv << ds.trial_ids[k] << ',' << k;
        for (int i = 0; i < model.m; ++i) csv << ',' << fmt(ds.samples[k].y[i]);
        for (int i = 0; i < model.m; ++i) csv << ',' << fmt(p.y[i]);
        csv << ',' << (p.degenerate ? 1 : 0) << '\n';
      }
      if (!output.empty()) write_text(output, csv.str());
      out << "samples=" << ds.size() << " rmse=" << fmt(std::sqrt(se / static_cast<double>(ds.size()))) << '\n';
    } else if (*bench) {
      const Dataset ds = env_dataset(cfg, data);
      const BenchmarkReport report =
          run_benchmark(ds, cfg.benchmark_models, cfg.train, cfg.split.train_fraction, cfg.benchmark_seeds);
      std::ostringstream csv;
      write_benchmark_csv(report, csv);
      write_text(output, csv.str());
      for (const BenchmarkAggregate& a : report.aggregates)
        out << a.model << " seed=" << a.seed << " srmse=" << fmt(a.srmse) << " smae=" << fmt(a.smae)
            << " status=" << a.status << '\n';
    } else if (*curve) {
      const Dataset ds = env_dataset(cfg, data);
      const ModelKind kind = cfg.curve_model;
      const TrainConfig train_cfg = curve_train_config(cfg);
      const LearningCurve lc = learning_curve(
          ds, [kind, &train_cfg](const Dataset& d) { return train_model(kind, d, train_cfg); }, cfg.curve_fractions,
          cfg.curve_seeds);
      std::ostringstream csv;
      write_learning_curve_csv(lc, csv);
      write_text(output, csv.str());
      for (const CurveRow& r : lc.rows)
        out << "fraction=" << fmt(r.fraction) << " median_rmse=" << (r.median ? fmt(*r.median) : "missing")
            << " missing=" << r.missing << '\n';
    } else if (*gen_demo) {
      Recording motion;
      Recording gripper;
      for (std::size_t i = 0; i < cfg.demo_seeds.size(); ++i) {
        const ScriptPair scripts = make_scripts(cfg.peg, cfg.op, cfg.demo_seeds[i]);
        const Demonstration demo =
            record_demonstration(cfg.peg, scripts.left, scripts.right, static_cast<int>(i), true, cfg.demo_seeds[i]);
        motion.append(demo.motion);
        gripper.append(demo.gripper);
      }
      fs::create_directories(dir);
      save_recording(motion, fs::path(dir) / motion_file);
      save_recording(gripper, fs::path(dir) / gripper_file);
      out << "wrote " << cfg.demo_seeds.size() << " demonstrations to " << dir << '\n';
    } else if (*train_rp_cmd) {
      const RPTrainConfig rp_cfg = effective_rp_config(cfg);
      const TrainResult motion = train(load_recording(fs::path(data) / motion_file).to_dataset(), rp_cfg.motion);
      const TrainResult gripper = train(load_recording(fs::path(data) / gripper_file).to_dataset(), rp_cfg.gripper);
      fs::create_directories(dir);
      save_model(motion.model, fs::path(dir) / motion_model_file);
      save_model(gripper.model, fs::path(dir) / gripper_model_file);
      out << "motion rules=" << motion.model.rule_count() << " train_rmse=" << fmt(motion.report.train_rmse)
          << "; gripper rules=" << gripper.model.rule_count() << " train_rmse=" << fmt(gripper.report.train_rmse)
          << '\n';
    } else if (*run_peg) {
      RPController rp(load_model(fs::path(model_path) / motion_model_file),
                      load_model(fs::path(model_path) / gripper_model_file), cfg.rp.tau_ticks * cfg.peg.dt, cfg.peg);
      std::ostringstream csv;
      csv << "# it2pf-peg v1\nseed,completed,completion_time,handover_error,both_held_ticks,phase,invariants_ok\n";
      std::size_t done = 0;
      double time_sum = 0.0;
      if (!trace_dir.empty()) fs::create_directories(trace_dir);
      for (std::uint64_t seed : cfg.episode_seeds) {
        const ScriptPair scripts = make_scripts(cfg.peg, cfg.op, seed);
        const EpisodeReport ep = run_episode(cfg.peg, scripts.left, rp, seed);
        csv << seed << ',' << (ep.completed ? 1 : 0) << ',' << fmt(ep.completion_time) << ','
            << fmt(ep.handover_error) << ',' << ep.both_held_ticks << ',' << ep.phase << ','
            << (ep.invariants_ok ? 1 : 0) << '\n';
        if (ep.completed) {
          ++done;
          time_sum += ep.completion_time;
        }
        if (!trace_dir.empty()) {
          std::ostringstream trace;
          write_trace_csv(ep, trace);
          write_text((fs::path(trace_dir) / ("episode_" + std::to_string(seed) + ".csv")).string(), trace.str());
        }
      }
      const double mean_time = done ? time_sum / static_cast<double>(done) : std::nan("");
      csv << "# summary\ncompleted,episodes,mean_completion_time\n"
          << done << ',' << cfg.episode_seeds.size() << ',' << fmt(mean_time) << '\n';
      write_text(output, csv.str());
      out << "completed " << done << "/" << cfg.episode_seeds.size() << " mean_completion_time=" << fmt(mean_time)
          << '\n';
    }
  } catch (const Error& e) {
    err << "error[" << category_name(e.category()) << "]: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const fs::filesystem_error& e) {
    err << "error[" << category_name(ErrorCategory::Io) << "]: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cli_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace it2pf
