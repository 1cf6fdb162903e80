#include "it2pf/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "it2pf/dataset_io.hpp"
#include "it2pf/errors.hpp"

namespace it2pf {

namespace {

using Values = std::vector<std::string>;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& why) {
  fail(ErrorCategory::Config, "config key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad_value(key, "expected a number, got '" + s + "'");
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& s) {
  Int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad_value(key, "expected an integer, got '" + s + "'");
  return v;
}

const std::string& single(const std::string& key, const Values& v) {
  if (v.size() != 1) bad_value(key, "expected a single value");
  return v.front();
}

struct Binding {
  std::function<void(const Values&)> set;
  std::function<std::string()> get;
};

class Table {
 public:
  void number(const std::string& key, double& ref) {
    add(key, {[key, &ref](const Values& v) { ref = to_double(key, single(key, v)); }, [&ref] { return fmt(ref); }});
  }
  void degrees(const std::string& key, double& radians) {
    add(key, {[key, &radians](const Values& v) { radians = to_double(key, single(key, v)) * kDegree; },
              [&radians] { return fmt(radians / kDegree); }});
  }
  void integer(const std::string& key, int& ref) {
    add(key, {[key, &ref](const Values& v) { ref = to_int<int>(key, single(key, v)); },
              [&ref] { return std::to_string(ref); }});
  }
  void seed(const std::string& key, std::uint64_t& ref) {
    add(key, {[key, &ref](const Values& v) { ref = to_int<std::uint64_t>(key, single(key, v)); },
              [&ref] { return std::to_string(ref); }});
  }
  void seeds(const std::string& key, std::vector<std::uint64_t>& ref) {
    add(key, {[key, &ref](const Values& v) {
                ref.clear();
                for (const std::string& s : v) ref.push_back(to_int<std::uint64_t>(key, s));
              },
              [&ref] {
                std::vector<std::string> parts;
                for (std::uint64_t s : ref) parts.push_back(std::to_string(s));
                return join(parts);
              }});
  }
  void numbers(const std::string& key, std::vector<double>& ref) {
    add(key, {[key, &ref](const Values& v) {
                ref.clear();
                for (const std::string& s : v) ref.push_back(to_double(key, s));
              },
              [&ref] {
                std::vector<std::string> parts;
                for (double d : ref) parts.push_back(fmt(d));
                return join(parts);
              }});
  }
  void vec3(const std::string& key, Vector3d& ref) {
    add(key, {[key, &ref](const Values& v) {
                if (v.size() != 3) bad_value(key, "expected three numbers");
                for (int i = 0; i < 3; ++i) ref[i] = to_double(key, v[static_cast<std::size_t>(i)]);
              },
              [&ref] { return fmt(ref[0]) + ", " + fmt(ref[1]) + ", " + fmt(ref[2]); }});
  }
  void add(const std::string& key, Binding b) {
    keys_.push_back(key);
    bindings_.emplace(key, std::move(b));
  }

  const Binding* find(const std::string& key) const {
    const auto it = bindings_.find(key);
    return it == bindings_.end() ? nullptr : &it->second;
  }
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
  std::map<std::string, Binding> bindings_;
};

void bind_train(Table& t, const std::string& s, TrainConfig& c) {
  t.integer(s + ".degree", c.degree);
  t.number(s + ".delta", c.delta);
  t.number(s + ".huber_k", c.huber_k);
  t.integer(s + ".irls_max_iter", c.irls_max_iter);
  t.number(s + ".irls_tol", c.irls_tol);
  t.integer(s + ".rule_count", c.rule_count);
  t.number(s + ".support_ratio", c.support_ratio);
  t.number(s + ".b_lower", c.tr_config.b_lower);
  t.number(s + ".b_upper", c.tr_config.b_upper);
  t.number(s + ".epsilon_floor", c.epsilon_floor);
  t.seed(s + ".seed", c.seed);
}

Table make_table(ExperimentConfig& c) {
  Table t;
  bind_train(t, "train", c.train);

  t.number("clustering.radius", c.train.subtractive.r_a);
  t.number("clustering.squash", c.train.subtractive.r_b);
  t.number("clustering.accept_ratio", c.train.subtractive.accept_ratio);
  t.number("clustering.reject_ratio", c.train.subtractive.reject_ratio);
  t.number("clustering.fuzzifier", c.train.fcm.fuzzifier);
  t.number("clustering.tol", c.train.fcm.tol);
  t.integer("clustering.max_iter", c.train.fcm.max_iter);
  t.number("clustering.width_floor", c.train.fcm.width_floor);

  t.number("env.base_stiffness", c.env.base_stiffness);
  t.number("env.damping", c.env.damping);
  t.number("env.exponent", c.env.exponent);
  t.number("env.surface_height", c.env.surface_height);
  SiliconeEnv& env = c.env;
  t.add("env.bumps", {[&env](const Values& v) {
                        if (v.size() % 4 != 0) bad_value("env.bumps", "expected groups of amplitude, cx, cy, width");
                        env.bumps.clear();
                        for (std::size_t i = 0; i < v.size(); i += 4)
                          env.bumps.push_back({to_double("env.bumps", v[i]), to_double("env.bumps", v[i + 1]),
                                               to_double("env.bumps", v[i + 2]), to_double("env.bumps", v[i + 3])});
                      },
                      [&env] {
                        std::vector<std::string> parts;
                        for (const StiffnessBump& b : env.bumps)
                          for (double d : {b.amplitude, b.cx, b.cy, b.width}) parts.push_back(fmt(d));
                        return join(parts);
                      }});

  PressProtocol& p = c.protocol;
  t.add("protocol.depths", {[&p](const Values& v) {
                              if (v.size() != 3) bad_value("protocol.depths", "expected three depths");
                              for (std::size_t i = 0; i < 3; ++i) p.depths[i] = to_double("protocol.depths", v[i]);
                            },
                            [&p] { return fmt(p.depths[0]) + ", " + fmt(p.depths[1]) + ", " + fmt(p.depths[2]); }});
  t.integer("protocol.trials_per_level", p.trials_per_level);
  t.integer("protocol.grid_nx", p.grid_nx);
  t.integer("protocol.grid_ny", p.grid_ny);
  t.number("protocol.grid_x0", p.grid_x0);
  t.number("protocol.grid_y0", p.grid_y0);
  t.number("protocol.grid_spacing", p.grid_spacing);
  t.number("protocol.dt", p.dt);
  t.number("protocol.clearance", p.clearance);
  t.number("protocol.descend_time", p.descend_time);
  t.number("protocol.hold_time", p.hold_time);
  t.number("protocol.retract_time", p.retract_time);
  t.number("protocol.position_noise", p.position_noise);
  t.number("protocol.force_noise", p.force_noise);
  t.seed("protocol.seed", p.seed);

  t.number("split.train_fraction", c.split.train_fraction);
  t.seed("split.seed", c.split.seed);

  std::vector<ModelKind>& models = c.benchmark_models;
  t.add("benchmark.models", {[&models](const Values& v) {
                               models.clear();
                               for (const std::string& s : v) models.push_back(parse_model_kind(s));
                             },
                             [&models] {
                               std::vector<std::string> parts;
                               for (ModelKind k : models) parts.emplace_back(model_name(k));
                               return join(parts);
                             }});
  t.seeds("benchmark.seeds", c.benchmark_seeds);

  ModelKind& curve_model = c.curve_model;
  t.add("curve.model", {[&curve_model](const Values& v) { curve_model = parse_model_kind(single("curve.model", v)); },
                        [&curve_model] { return std::string(model_name(curve_model)); }});
  t.numbers("curve.fractions", c.curve_fractions);
  t.seeds("curve.seeds", c.curve_seeds);
  t.integer("curve.rule_count", c.curve_rule_count);

  PegWorldConfig& w = c.peg;
  t.integer("peg.cols", w.peg_cols);
  t.integer("peg.rows", w.peg_rows);
  t.number("peg.spacing", w.peg_spacing);
  t.vec3("peg.origin", w.peg_origin);
  t.integer("peg.start_peg", w.start_peg);
  t.integer("peg.target_peg", w.target_peg);
  t.number("peg.grasp_radius", w.grasp_radius);
  t.degrees("peg.theta_max_deg", w.theta_max);
  t.degrees("peg.theta_close_deg", w.theta_close);
  t.number("peg.max_speed", w.max_speed);
  t.number("peg.dt", w.dt);
  t.number("peg.timeout", w.timeout);
  t.vec3("peg.left_home", w.left_home);
  t.vec3("peg.right_home", w.right_home);
  t.number("peg.obs_position_noise", w.obs_position_noise);
  t.number("peg.obs_velocity_noise", w.obs_velocity_noise);
  t.number("peg.obs_angle_noise", w.obs_angle_noise);
  t.number("peg.obs_angle_rate_noise", w.obs_angle_rate_noise);

  OperatorTiming& o = c.op;
  t.number("operator.approach", o.approach);
  t.number("operator.grasp", o.grasp);
  t.number("operator.close", o.close);
  t.number("operator.carry", o.carry);
  t.number("operator.dwell", o.dwell);
  t.number("operator.release", o.release);
  t.degrees("operator.release_angle_deg", o.release_angle);
  t.number("operator.partner_close", o.partner_close);
  t.number("operator.partner_close_delay", o.partner_close_delay);
  t.number("operator.retreat", o.retreat);
  t.number("operator.settle", o.settle);
  t.vec3("operator.handover", o.handover);
  t.vec3("operator.left_rest", o.left_rest);
  t.number("operator.position_jitter", o.position_jitter);
  t.number("operator.time_jitter", o.time_jitter);

  t.integer("rp.motion_degree", c.rp.motion.degree);
  t.number("rp.motion_delta", c.rp.motion.delta);
  t.integer("rp.motion_rules", c.rp.motion.rule_count);
  t.integer("rp.gripper_degree", c.rp.gripper.degree);
  t.number("rp.gripper_delta", c.rp.gripper.delta);
  t.integer("rp.gripper_rules", c.rp.gripper.rule_count);
  t.number("rp.tau_ticks", c.rp.tau_ticks);

  t.seeds("demo.seeds", c.demo_seeds);
  t.seeds("episodes.seeds", c.episode_seeds);
  return t;
}

void assign(ExperimentConfig& config, const std::string& key, const Values& values) {
  Table table = make_table(config);
  const Binding* b = table.find(key);
  if (!b) fail(ErrorCategory::Config, "unknown config key '" + key + "'");
  try {
    b->set(values);
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::Config) throw;
    fail(ErrorCategory::Config, "config key '" + key + "': " + e.what());
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

Values split_list(std::string_view s) {
  Values out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  train.validate();
  env.validate();
  protocol.validate();
  split.validate();
  require(!benchmark_models.empty(), ErrorCategory::Config, "config: benchmark.models is empty");
  require(!benchmark_seeds.empty(), ErrorCategory::Config, "config: benchmark.seeds is empty");
  require(!curve_fractions.empty() && !curve_seeds.empty(), ErrorCategory::Config,
          "config: curve needs fractions and seeds");
  require(curve_rule_count >= 0, ErrorCategory::Config, "config: curve.rule_count must be >= 0");
  for (double f : curve_fractions)
    require(f > 0.0 && f < 1.0, ErrorCategory::Config, "config: curve fractions must lie in (0, 1)");
  peg.validate();
  op.validate();
  rp.motion.validate();
  rp.gripper.validate();
  require(rp.tau_ticks >= 1.0, ErrorCategory::Config, "config: rp.tau_ticks must be >= 1");
  require(!demo_seeds.empty(), ErrorCategory::Config, "config: demo.seeds is empty");
  require(!episode_seeds.empty(), ErrorCategory::Config, "config: episodes.seeds is empty");
}

ExperimentConfig parse_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    fail(ErrorCategory::Config, std::string("config: ") + e.what());
  }
  ExperimentConfig config;
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (item.parents.size() != 1)
      fail(ErrorCategory::Config, "config key '" + item.fullname() + "' must sit in one [section]");
    assign(config, item.fullname(), item.inputs);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    fail(ErrorCategory::Config, "override '" + std::string(assignment) + "' must look like section.key=value");
  assign(config, trim(assignment.substr(0, eq)), split_list(assignment.substr(eq + 1)));
}

std::string config_to_string(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  const Table table = make_table(copy);
  std::string out;
  std::string section;
  for (const std::string& key : table.keys()) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out += (section.empty() ? "[" : "\n[") + s + "]\n";
      section = s;
    }
    out += key.substr(dot + 1) + " = " + table.find(key)->get() + "\n";
  }
  return out;
}

RPTrainConfig effective_rp_config(const ExperimentConfig& config) {
  RPTrainConfig out = config.rp;
  for (TrainConfig* c : {&out.motion, &out.gripper}) {
    const TrainConfig own = *c;
    *c = config.train;
    c->degree = own.degree;
    c->delta = own.delta;
    c->rule_count = own.rule_count;
  }
  return out;
}

TrainConfig curve_train_config(const ExperimentConfig& config) {
  TrainConfig out = config.train;
  out.rule_count = config.curve_rule_count;
  return out;
}

std::vector<std::string> config_keys() {
  ExperimentConfig c;
  return make_table(c).keys();
}

}  // namespace it2pf
