#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "it2pf/config.hpp"
#include "it2pf/dataset_io.hpp"
#include "it2pf/env_sim.hpp"
#include "it2pf/errors.hpp"
#include "it2pf/identification.hpp"
#include "it2pf/model_io.hpp"
#include "it2pf/rng.hpp"

using namespace it2pf;
namespace fs = std::filesystem;

namespace {

ErrorCategory category_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCategory::Io;
}

Recording small_recording() {
  PressProtocol p;
  p.trials_per_level = 2;
  return generate_benchmark(default_silicone_env(), p).recording;
}

IT2PFModel small_model() {
  TrainConfig cfg;
  cfg.degree = 1;
  cfg.rule_count = 2;
  return train(small_recording().to_dataset(), cfg).model;
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "it2pf_test_io";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Rng, SubstreamsAreStable) {
  Rng a = Rng::substream(7, 3);
  Rng b = Rng::substream(7, 3);
  Rng c = Rng::substream(7, 4);
  const std::uint64_t x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
}

TEST(Rng, UniformAndNormalMoments) {
  Rng r(42);
  double s = 0.0, s2 = 0.0, u = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    const double v = r.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    u += v;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(u / n, 0.5, 0.005);
}

TEST(DatasetCsv, RoundTripIsExact) {
  const Recording r = small_recording();
  std::stringstream ss;
  write_recording_csv(r, ss);
  const Recording back = read_recording_csv(ss);
  ASSERT_EQ(back.ticks.size(), r.ticks.size());
  EXPECT_EQ(back.channel, r.channel);
  EXPECT_EQ(back.dt, r.dt);
  for (std::size_t i = 0; i < r.ticks.size(); ++i) {
    EXPECT_EQ(back.ticks[i].t, r.ticks[i].t);
    EXPECT_EQ(back.ticks[i].trial_id, r.ticks[i].trial_id);
    EXPECT_EQ(back.ticks[i].x, r.ticks[i].x);
    EXPECT_EQ(back.ticks[i].v, r.ticks[i].v);
    EXPECT_EQ(back.ticks[i].y, r.ticks[i].y);
  }
}

TEST(DatasetCsv, VNextComesFromFollowingTick) {
  const Recording r = small_recording();
  const Dataset d = r.to_dataset();
  EXPECT_EQ(d.size(), r.ticks.size() - r.trials().size());
  EXPECT_EQ(d.samples[0].v_next, r.ticks[1].v);
}

TEST(DatasetCsv, Diagnostics) {
  std::stringstream bad_version("# it2pf-dataset v9 channel=e dt=0.01 n=1 m=1\nt,trial_id,x1,v1,y1\n");
  EXPECT_EQ(category_of([&] { read_recording_csv(bad_version); }), ErrorCategory::Version);
  std::stringstream bad_row("# it2pf-dataset v1 channel=e dt=0.01 n=1 m=1\nt,trial_id,x1,v1,y1\n0,0,1,2\n");
  EXPECT_EQ(category_of([&] { read_recording_csv(bad_row); }), ErrorCategory::Format);
  std::stringstream bad_step(
      "# it2pf-dataset v1 channel=e dt=0.01 n=1 m=1\nt,trial_id,x1,v1,y1\n0,0,1,2,3\n0.5,0,1,2,3\n");
  EXPECT_EQ(category_of([&] { read_recording_csv(bad_step); }), ErrorCategory::Format);
  std::stringstream bad_value("# it2pf-dataset v1 channel=e dt=0.01 n=1 m=1\nt,trial_id,x1,v1,y1\n0,0,abc,2,3\n");
  EXPECT_EQ(category_of([&] { read_recording_csv(bad_value); }), ErrorCategory::Format);
}

TEST(ModelIo, RoundTripPredictionsIdentical) {
  const IT2PFModel m = small_model();
  const IT2PFModel back = model_from_string(model_to_string(m));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    VectorXd x(3), v(3), vn(3);
    for (int d = 0; d < 3; ++d) {
      x[d] = rng.uniform(-0.01, 0.1);
      v[d] = rng.uniform(-0.05, 0.05);
      vn[d] = rng.uniform(-0.05, 0.05);
    }
    ASSERT_EQ(m.predict(x, v, vn).y, back.predict(x, v, vn).y);
  }
  EXPECT_EQ(model_to_string(back), model_to_string(m));
}

TEST(ModelIo, FileRoundTrip) {
  const IT2PFModel m = small_model();
  const fs::path p = temp_dir() / "model.json";
  save_model(m, p);
  EXPECT_EQ(model_to_string(load_model(p)), model_to_string(m));
}

TEST(ModelIo, TruncatedIsFormatError) {
  const std::string text = model_to_string(small_model());
  EXPECT_EQ(category_of([&] { model_from_string(text.substr(0, text.size() / 2)); }), ErrorCategory::Format);
}

TEST(ModelIo, BumpedVersionIsVersionError) {
  std::string text = model_to_string(small_model());
  const auto at = text.find("\"version\": 1");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 12, "\"version\": 2");
  EXPECT_EQ(category_of([&] { model_from_string(text); }), ErrorCategory::Version);
}

TEST(ModelIo, InvariantViolationRejected) {
  std::string text = model_to_string(small_model());
  const auto at = text.find("\"epsilon_floor\"");
  ASSERT_NE(at, std::string::npos);
  const auto colon = text.find(':', at);
  const auto end = text.find_first_of(",\n}", colon);
  text.replace(colon + 1, end - colon - 1, " -1.0");
  EXPECT_EQ(category_of([&] { model_from_string(text); }), ErrorCategory::Format);
}

TEST(FitReportIo, RoundTrip) {
  TrainConfig cfg;
  cfg.degree = 0;
  cfg.rule_count = 2;
  const FitReport r = train(small_recording().to_dataset(), cfg).report;
  EXPECT_EQ(fit_report_to_string(fit_report_from_string(fit_report_to_string(r))), fit_report_to_string(r));
}

TEST(Config, CanonicalRoundTrip) {
  ExperimentConfig c;
  apply_override(c, "train.degree=1");
  apply_override(c, "benchmark.seeds=4,8");
  apply_override(c, "peg.left_home=-0.1,0.01,0.05");
  const std::string text = config_to_string(c);
  EXPECT_EQ(config_to_string(parse_config(text)), text);
  const ExperimentConfig back = parse_config(text);
  EXPECT_EQ(back.train.degree, 1);
  EXPECT_EQ(back.benchmark_seeds, (std::vector<std::uint64_t>{4, 8}));
  EXPECT_DOUBLE_EQ(back.peg.left_home.y(), 0.01);
}

TEST(Config, SectionsAndComments) {
  const ExperimentConfig c = parse_config("# comment\n[train]\ndegree = 3\n; other\n[split]\ntrain_fraction = 0.2\n");
  EXPECT_EQ(c.train.degree, 3);
  EXPECT_DOUBLE_EQ(c.split.train_fraction, 0.2);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(category_of([] { parse_config("[train]\nbogus = 1\n"); }), ErrorCategory::Config);
  EXPECT_EQ(category_of([] { parse_config("[nosuch]\ndegree = 1\n"); }), ErrorCategory::Config);
  EXPECT_EQ(category_of([] { parse_config("bad line\n"); }), ErrorCategory::Config);
  ExperimentConfig c;
  EXPECT_EQ(category_of([&] { apply_override(c, "train.degree"); }), ErrorCategory::Config);
  EXPECT_EQ(category_of([&] { apply_override(c, "train.degree=two"); }), ErrorCategory::Config);
}

TEST(Config, SeedsAreExplicit) {
  const std::string text = config_to_string(ExperimentConfig{});
  for (const char* key : {"seed = ", "seeds = "}) EXPECT_NE(text.find(key), std::string::npos);
  for (const std::string& k : config_keys()) EXPECT_NE(k.find('.'), std::string::npos);
}

TEST(AtomicWrite, ReplacesContents) {
  const fs::path p = temp_dir() / "atomic.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  EXPECT_EQ(read_file(p), "two");
  EXPECT_EQ(category_of([&] { read_file(temp_dir() / "missing.txt"); }), ErrorCategory::Io);
}
