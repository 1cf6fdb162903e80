#include "it2pf/env_sim.hpp"

#include <cmath>

#include "it2pf/errors.hpp"
#include "it2pf/min_jerk.hpp"
#include "it2pf/rng.hpp"

namespace it2pf {

void SiliconeEnv::validate() const {
  require(base_stiffness > 0.0, ErrorCategory::Parameter, "env: base stiffness must be > 0");
  double negative = 0.0;
  for (const StiffnessBump& b : bumps) {
    require(b.width > 0.0, ErrorCategory::Parameter, "env: bump width must be > 0");
    if (b.amplitude < 0.0) negative += -b.amplitude;
  }
  require(negative < 1.0, ErrorCategory::Parameter,
          "env: negative bump amplitudes must sum to < 1 so stiffness stays positive");
  require(damping >= 0.0, ErrorCategory::Parameter, "env: damping must be >= 0");
  require(exponent >= 1.0, ErrorCategory::Parameter, "env: contact exponent must be >= 1");
}

double SiliconeEnv::stiffness(double x1, double x2) const {
  double factor = 1.0;
  for (const StiffnessBump& b : bumps) {
    const double dx = x1 - b.cx;
    const double dy = x2 - b.cy;
    factor += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
  }
  return base_stiffness * factor;
}

double SiliconeEnv::stiffness_lipschitz() const {
  // max_r r/w^2 exp(-r^2/2w^2) = exp(-1/2)/w
  double l = 0.0;
  for (const StiffnessBump& b : bumps) l += std::abs(b.amplitude) * std::exp(-0.5) / b.width;
  return base_stiffness * l;
}

SiliconeEnv default_silicone_env() {
  SiliconeEnv env;
  env.bumps = {
      {0.4, 0.03, 0.03, 0.025},
      {-0.4, 0.07, 0.065, 0.02},
      {0.3, 0.07, 0.02, 0.015},
  };
  return env;
}

ContactForce contact_force(const SiliconeEnv& env, const Eigen::Vector3d& position,
                           const Eigen::Vector3d& velocity) {
  ContactForce f;
  const double d = env.surface_height - position.z();
  if (!(d > 0.0)) return f;
  const double dn = std::pow(d, env.exponent);
  const double rate = -velocity.z();
  f.elastic = env.stiffness(position.x(), position.y()) * dn;
  f.dissipative = env.damping * dn * rate;
  f.normal = std::max(0.0, f.elastic + f.dissipative);
  return f;
}

void PressProtocol::validate() const {
  require(depths[0] > 0.0 && depths[0] < depths[1] && depths[1] < depths[2], ErrorCategory::Parameter,
          "protocol: depths must be strictly increasing and > 0");
  require(trials_per_level >= 1, ErrorCategory::Parameter, "protocol: trials_per_level must be >= 1");
  require(grid_nx >= 1 && grid_ny >= 1, ErrorCategory::Parameter, "protocol: grid must be non-empty");
  require(dt > 0.0, ErrorCategory::Parameter, "protocol: dt must be > 0");
  require(descend_time > 0.0 && hold_time >= 0.0 && retract_time > 0.0, ErrorCategory::Parameter,
          "protocol: phase durations must be positive");
  require(clearance >= 0.0 && position_noise >= 0.0 && force_noise >= 0.0, ErrorCategory::Parameter,
          "protocol: clearance and noise levels must be >= 0");
}

std::vector<PressLocation> PressProtocol::grid() const {
  std::vector<PressLocation> out;
  for (int j = 0; j < grid_ny; ++j)
    for (int i = 0; i < grid_nx; ++i) out.push_back({grid_x0 + i * grid_spacing, grid_y0 + j * grid_spacing});
  return out;
}

Recording generate_trial(const SiliconeEnv& env, const PressProtocol& protocol, DepthLevel level,
                         const PressLocation& location, std::uint64_t seed, int trial_id) {
  env.validate();
  protocol.validate();
  Rng rng(seed);
  const double depth = protocol.depths[static_cast<std::size_t>(level)];
  const double top = env.surface_height + protocol.clearance;
  const double bottom = env.surface_height - depth;
  const double t1 = protocol.descend_time;
  const double t2 = t1 + protocol.hold_time;
  const double t3 = t2 + protocol.retract_time;
  const auto ticks = static_cast<int>(std::llround(t3 / protocol.dt));

  Recording rec;
  rec.channel = Channel::Environment;
  rec.dt = protocol.dt;
  rec.n = 3;
  rec.m = 1;
  rec.ticks.reserve(static_cast<std::size_t>(ticks) + 1);
  for (int k = 0; k <= ticks; ++k) {
    const double t = k * protocol.dt;
    double height = bottom;
    double rate = 0.0;
    if (t < t1) {
      const double tau = t / protocol.descend_time;
      height = top + (bottom - top) * min_jerk(tau);
      rate = (bottom - top) * min_jerk_rate(tau) / protocol.descend_time;
    } else if (t < t2) {
      height = bottom;
    } else {
      const double tau = (t - t2) / protocol.retract_time;
      height = bottom + (top - bottom) * min_jerk(tau);
      rate = (top - bottom) * min_jerk_rate(tau) / protocol.retract_time;
    }
    const Eigen::Vector3d pos(location.x1, location.x2, height);
    const Eigen::Vector3d vel(0.0, 0.0, rate);
    const ContactForce f = contact_force(env, pos, vel);

    Tick tick;
    tick.t = t;
    tick.trial_id = trial_id;
    tick.x = pos;
    for (int d = 0; d < 3; ++d) tick.x[d] += rng.normal(0.0, protocol.position_noise);
    tick.v = vel;
    tick.y = VectorXd::Constant(1, f.normal + rng.normal(0.0, protocol.force_noise));
    rec.ticks.push_back(std::move(tick));
  }
  return rec;
}

BenchmarkData generate_benchmark(const SiliconeEnv& env, const PressProtocol& protocol) {
  protocol.validate();
  const std::vector<PressLocation> grid = protocol.grid();
  BenchmarkData data;
  data.recording.channel = Channel::Environment;
  data.recording.dt = protocol.dt;
  data.recording.n = 3;
  data.recording.m = 1;
  for (int level = 0; level < 3; ++level) {
    for (int j = 0; j < protocol.trials_per_level; ++j) {
      const int id = level * protocol.trials_per_level + j;
      const PressLocation loc = grid[static_cast<std::size_t>(j) % grid.size()];
      const auto lvl = static_cast<DepthLevel>(level);
      const std::uint64_t seed = splitmix64(protocol.seed ^ splitmix64(static_cast<std::uint64_t>(id) + 1));
      data.recording.append(generate_trial(env, protocol, lvl, loc, seed, id));
      data.trials.push_back({id, lvl, loc});
    }
  }
  return data;
}

}  // namespace it2pf
