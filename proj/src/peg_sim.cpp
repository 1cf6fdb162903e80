#include "it2pf/peg_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "it2pf/errors.hpp"
#include "it2pf/min_jerk.hpp"
#include "it2pf/rng.hpp"

namespace it2pf {

namespace {

bool finite(const Vector3d& v) { return v.allFinite(); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GripperState at_rest(const Vector3d& position, double theta) {
  GripperState g;
  g.position = position;
  g.theta = theta;
  return g;
}

}  // namespace

void PegWorldConfig::validate() const {
  require(peg_cols >= 1 && peg_rows >= 1 && peg_cols * peg_rows >= 2, ErrorCategory::Parameter,
          "peg world: at least two pegs required");
  require(peg_spacing > 0.0, ErrorCategory::Parameter, "peg world: peg spacing must be positive");
  require(finite(peg_origin) && finite(left_home) && finite(right_home), ErrorCategory::Parameter,
          "peg world: positions must be finite");
  const int count = peg_cols * peg_rows;
  require(start_peg >= 0 && start_peg < count && target_peg >= 0 && target_peg < count,
          ErrorCategory::Parameter, "peg world: start/target peg index out of range");
  require(start_peg != target_peg, ErrorCategory::Parameter, "peg world: start and target peg coincide");
  require(grasp_radius >= 0.0, ErrorCategory::Parameter, "peg world: grasp radius must be >= 0");
  require(theta_max > 0.0 && theta_close > 0.0 && theta_close < theta_max, ErrorCategory::Parameter,
          "peg world: need 0 < theta_close < theta_max");
  require(max_speed > 0.0, ErrorCategory::Parameter, "peg world: max speed must be positive");
  require(dt > 0.0, ErrorCategory::Parameter, "peg world: dt must be positive");
  require(timeout > 0.0, ErrorCategory::Parameter, "peg world: timeout must be positive");
  require(obs_position_noise >= 0.0 && obs_velocity_noise >= 0.0 && obs_angle_noise >= 0.0 &&
              obs_angle_rate_noise >= 0.0,
          ErrorCategory::Parameter, "peg world: observation noise must be >= 0");
}

std::vector<Vector3d> PegWorldConfig::pegs() const {
  std::vector<Vector3d> out;
  for (int r = 0; r < peg_rows; ++r)
    for (int c = 0; c < peg_cols; ++c) out.push_back(peg_origin + Vector3d(c * peg_spacing, r * peg_spacing, 0.0));
  return out;
}

const char* phase_name(BlockPhase p) noexcept {
  switch (p) {
    case BlockPhase::OnPeg: return "on-peg";
    case BlockPhase::HeldLeft: return "held-left";
    case BlockPhase::HeldBoth: return "held-both";
    case BlockPhase::HeldRight: return "held-right";
    case BlockPhase::Placed: return "placed";
    case BlockPhase::Dropped: return "dropped";
  }
  return "?";
}

bool phase_transition_allowed(BlockPhase from, BlockPhase to) noexcept {
  using P = BlockPhase;
  if (from == to) return true;
  switch (from) {
    case P::OnPeg: return to == P::HeldLeft || to == P::HeldRight;
    case P::HeldLeft: return to == P::OnPeg || to == P::HeldBoth || to == P::Dropped;
    case P::HeldBoth: return to == P::HeldLeft || to == P::HeldRight || to == P::Dropped;
    case P::HeldRight: return to == P::OnPeg || to == P::HeldBoth || to == P::Placed || to == P::Dropped;
    case P::Placed:
    case P::Dropped: return false;
  }
  return false;
}

PegWorld::PegWorld(PegWorldConfig config)
    : PegWorld(config, at_rest(config.left_home, config.theta_max), at_rest(config.right_home, config.theta_max)) {}

PegWorld::PegWorld(PegWorldConfig config, const GripperState& left, const GripperState& right)
    : config_(std::move(config)), left_(left), right_(right) {
  config_.validate();
  require(finite(left.position) && finite(right.position), ErrorCategory::Parameter,
          "peg world: initial gripper positions must be finite");
  pegs_ = config_.pegs();
  left_.theta = std::clamp(left_.theta, 0.0, config_.theta_max);
  right_.theta = std::clamp(right_.theta, 0.0, config_.theta_max);
  block_peg_ = config_.start_peg;
  block_ = pegs_[static_cast<std::size_t>(block_peg_)];
}

std::optional<int> PegWorld::peg_near(const Vector3d& p) const {
  for (std::size_t i = 0; i < pegs_.size(); ++i)
    if ((pegs_[i] - p).norm() <= config_.grasp_radius) return static_cast<int>(i);
  return std::nullopt;
}

void PegWorld::move(GripperState& g, const GripperCommand& cmd) const {
  if (!finite(cmd.position) || !std::isfinite(cmd.theta))
    fail(ErrorCategory::InputDomain, "peg world: non-finite gripper command");
  const Vector3d old = g.position;
  const Vector3d d = cmd.position - old;
  const double reach = config_.max_speed * config_.dt;
  const double dist = d.norm();
  g.position = dist <= reach ? cmd.position : Vector3d(old + d * (reach / dist));
  g.velocity = (g.position - old) / config_.dt;
  const double theta = std::clamp(cmd.theta, 0.0, config_.theta_max);
  g.theta_rate = (theta - g.theta) / config_.dt;
  g.theta = theta;
}

void PegWorld::step(const GripperCommand& left_cmd, const GripperCommand& right_cmd) {
  const bool left_was_open = !closed(left_);
  const bool right_was_open = !closed(right_);
  move(left_, left_cmd);
  move(right_, right_cmd);
  update_block(left_was_open && closed(left_), right_was_open && closed(right_));
  if (phase_ == BlockPhase::HeldBoth) ++both_held_ticks_;
  ++tick_;
  time_ = static_cast<double>(tick_) * config_.dt;
}

void PegWorld::update_block(bool left_edge, bool right_edge) {
  const double eps = config_.grasp_radius;
  const Vector3d& target = pegs_[static_cast<std::size_t>(config_.target_peg)];
  const auto rest_or_drop = [&] {
    if (const auto peg = peg_near(block_)) {
      block_peg_ = *peg;
      phase_ = *peg == config_.target_peg ? BlockPhase::Placed : BlockPhase::OnPeg;
    } else {
      phase_ = BlockPhase::Dropped;
    }
  };

  switch (phase_) {
    case BlockPhase::OnPeg:
      if (left_edge && distance_to_block(left_) <= eps) {
        phase_ = BlockPhase::HeldLeft;
        offset_ = block_ - left_.position;
      } else if (right_edge && distance_to_block(right_) <= eps) {
        phase_ = BlockPhase::HeldRight;
        offset_ = block_ - right_.position;
      }
      break;
    case BlockPhase::HeldLeft:
      block_ = left_.position + offset_;
      if (!closed(left_)) {
        rest_or_drop();
      } else if (right_edge && distance_to_block(right_) <= eps) {
        phase_ = BlockPhase::HeldBoth;
        right_grasp_distance_ = distance_to_block(right_);
      }
      break;
    case BlockPhase::HeldBoth: {
      block_ = left_.position + offset_;
      const bool right_holds = closed(right_) && distance_to_block(right_) <= eps;
      const bool left_holds = closed(left_);
      if (!right_holds && !left_holds) {
        phase_ = BlockPhase::Dropped;
      } else if (!right_holds) {
        phase_ = BlockPhase::HeldLeft;
      } else if (!left_holds) {
        phase_ = BlockPhase::HeldRight;
        offset_ = block_ - right_.position;
      }
      break;
    }
    case BlockPhase::HeldRight:
      block_ = right_.position + offset_;
      if (!closed(right_)) {
        rest_or_drop();
      } else if ((block_ - target).norm() <= eps) {
        phase_ = BlockPhase::Placed;
        block_peg_ = config_.target_peg;
      } else if (left_edge && distance_to_block(left_) <= eps) {
        phase_ = BlockPhase::HeldBoth;
        offset_ = block_ - left_.position;
      }
      break;
    case BlockPhase::Placed:
    case BlockPhase::Dropped:
      break;
  }
}

void OperatorScript::validate() const {
  require(finite(start) && std::isfinite(theta_start) && theta_start >= 0.0, ErrorCategory::Parameter,
          "operator script: invalid start state");
  require(!segments.empty(), ErrorCategory::Parameter, "operator script: no segments");
  for (const Segment& s : segments) {
    require(std::isfinite(s.duration) && s.duration > 0.0, ErrorCategory::Parameter,
            "operator script: segment durations must be positive");
    require(finite(s.target), ErrorCategory::Parameter, "operator script: non-finite waypoint");
  }
  const double total = duration();
  double free_from = 0.0;
  for (const AngleMove& g : gripper) {
    require(std::isfinite(g.duration) && g.duration > 0.0, ErrorCategory::Parameter,
            "operator script: gripper move durations must be positive");
    require(std::isfinite(g.target) && g.target >= 0.0, ErrorCategory::Parameter,
            "operator script: gripper targets must be >= 0");
    require(g.start >= free_from - 1e-12, ErrorCategory::Parameter,
            "operator script: gripper moves must be ordered and non-overlapping");
    require(g.start + g.duration <= total + 1e-9, ErrorCategory::Parameter,
            "operator script: gripper schedule exceeds the episode");
    free_from = g.start + g.duration;
  }
}

double OperatorScript::duration() const {
  double total = 0.0;
  for (const Segment& s : segments) total += s.duration;
  return total;
}

Vector3d OperatorScript::position(double t) const {
  Vector3d from = start;
  double t0 = 0.0;
  for (const Segment& s : segments) {
    if (t < t0 + s.duration) return from + (s.target - from) * min_jerk((t - t0) / s.duration);
    from = s.target;
    t0 += s.duration;
  }
  return from;
}

double OperatorScript::theta(double t) const {
  double from = theta_start;
  for (const AngleMove& g : gripper) {
    if (t < g.start) return from;
    if (t < g.start + g.duration) return from + (g.target - from) * min_jerk((t - g.start) / g.duration);
    from = g.target;
  }
  return from;
}

void OperatorTiming::validate() const {
  for (double d : {approach, grasp, close, carry, dwell, release, partner_close, retreat, settle})
    require(std::isfinite(d) && d > 0.0, ErrorCategory::Parameter, "operator timing: durations must be positive");
  require(close < grasp, ErrorCategory::Parameter, "operator timing: closing must fit inside the grasp dwell");
  require(partner_close_delay >= 0.0, ErrorCategory::Parameter, "operator timing: negative partner delay");
  require(release_angle > 0.0, ErrorCategory::Parameter, "operator timing: release angle must be positive");
  require(position_jitter >= 0.0 && time_jitter >= 0.0 && time_jitter < 0.3, ErrorCategory::Parameter,
          "operator timing: jitter out of range");
  require(finite(handover) && finite(left_rest), ErrorCategory::Parameter, "operator timing: non-finite waypoint");
}

ScriptPair make_scripts(const PegWorldConfig& world, const OperatorTiming& timing,
                        std::optional<std::uint64_t> jitter_seed) {
  world.validate();
  timing.validate();
  OperatorTiming t = timing;
  if (jitter_seed) {
    Rng rng = Rng::substream(*jitter_seed, 0x0b5e);
    const double s = timing.time_jitter;
    const auto scale = [&] { return std::clamp(1.0 + s * rng.normal(), 1.0 - 3.0 * s, 1.0 + 3.0 * s); };
    const auto offset = [&] {
      Vector3d d;
      for (int i = 0; i < 3; ++i) d[i] = timing.position_jitter * rng.normal();
      return d;
    };
    t.approach *= scale();
    const double grasp_scale = scale();
    t.grasp *= grasp_scale;
    t.close *= grasp_scale;
    t.carry *= scale();
    t.dwell *= scale();
    const double release_scale = scale();
    t.release *= release_scale;
    t.partner_close *= release_scale;
    t.partner_close_delay *= release_scale;
    t.retreat *= scale();
    t.settle *= scale();
    t.handover += offset();
    t.left_rest += offset();
  }

  const std::vector<Vector3d> pegs = world.pegs();
  const Vector3d block = pegs[static_cast<std::size_t>(world.start_peg)];
  const Vector3d target = pegs[static_cast<std::size_t>(world.target_peg)];
  const double hold_at_handover = t.dwell + t.release + 0.2;
  const double t_handover = t.approach + t.grasp + t.carry;

  ScriptPair out;
  OperatorScript& left = out.left;
  left.start = world.left_home;
  left.theta_start = world.theta_max;
  left.segments = {{t.approach, block},         {t.grasp, block},      {t.carry, t.handover},
                   {hold_at_handover, t.handover}, {t.retreat, t.left_rest}, {t.settle, t.left_rest}};
  left.gripper = {{t.approach + 0.25 * (t.grasp - t.close), t.close, 0.0},
                  {t_handover + t.dwell, t.release, t.release_angle}};

  OperatorScript& right = out.right;
  right.start = world.right_home;
  right.theta_start = world.theta_max;
  right.segments = {{t.approach + t.grasp, world.right_home}, {t.carry, t.handover},
                    {hold_at_handover, t.handover}, {t.retreat, target}, {t.settle, target}};
  right.gripper = {{t_handover + t.dwell + t.partner_close_delay, t.partner_close, 0.0}};

  left.validate();
  right.validate();
  return out;
}

namespace {

OperatorState observe(const GripperState& g, const PegWorldConfig& c, Rng& rng) {
  OperatorState o = g;
  const auto add = [&](double& v, double sigma) {
    if (sigma > 0.0) v += sigma * rng.normal();
  };
  for (int i = 0; i < 3; ++i) add(o.position[i], c.obs_position_noise);
  for (int i = 0; i < 3; ++i) add(o.velocity[i], c.obs_velocity_noise);
  add(o.theta, c.obs_angle_noise);
  add(o.theta_rate, c.obs_angle_rate_noise);
  return o;
}

}  // namespace

Demonstration record_demonstration(const PegWorldConfig& config, const OperatorScript& left,
                                   const OperatorScript& right, int trial_id, bool require_transfer,
                                   std::optional<std::uint64_t> noise_seed) {
  config.validate();
  left.validate();
  right.validate();
  const double duration = std::max(left.duration(), right.duration());
  const auto ticks = static_cast<long>(std::llround(duration / config.dt));
  require(ticks >= 2, ErrorCategory::Demonstration, "demonstration: scripts shorter than two ticks");

  PegWorld world(config, at_rest(left.start, left.theta_start), at_rest(right.start, right.theta_start));
  Demonstration demo;
  demo.motion = Recording{Channel::MotionTrajectory, config.dt, 3, 3, {}};
  demo.gripper = Recording{Channel::GestureAction, config.dt, 1, 1, {}};
  Rng rng = Rng::substream(noise_seed.value_or(0), 0x0b5d);
  const auto record = [&](long k) {
    const double t = static_cast<double>(k) * config.dt;
    const GripperState l = noise_seed ? observe(world.left(), config, rng) : world.left();
    const GripperState& r = world.right();
    demo.motion.ticks.push_back(Tick{t, trial_id, l.position, l.velocity, r.position});
    demo.gripper.ticks.push_back(Tick{t, trial_id, VectorXd::Constant(1, l.theta), VectorXd::Constant(1, l.theta_rate),
                                      VectorXd::Constant(1, r.theta)});
  };
  record(0);
  for (long k = 1; k < ticks; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    world.step(left.command(t), right.command(t));
    record(k);
  }
  if (require_transfer) {
    if (world.phase() != BlockPhase::Placed || world.both_held_ticks() < 1)
      fail(ErrorCategory::Demonstration, std::string("demonstration: dry run did not complete the transfer (block ") +
                                             phase_name(world.phase()) + ")");
  }
  return demo;
}

RPController::RPController(IT2PFModel motion, IT2PFModel gripper, double tau, const PegWorldConfig& world)
    : motion_(std::move(motion)), gripper_(std::move(gripper)), tau_(tau), dt_(world.dt), theta_max_(world.theta_max) {
  world.validate();
  motion_.validate();
  gripper_.validate();
  require(motion_.channel == Channel::MotionTrajectory && motion_.n == 3 && motion_.m == 3, ErrorCategory::Parameter,
          "RP: motion model must be an h_mt model with n = m = 3");
  require(gripper_.channel == Channel::GestureAction && gripper_.n == 1 && gripper_.m == 1,
          ErrorCategory::Parameter, "RP: gripper model must be an h_ga model with n = m = 1");
  require(std::abs(motion_.dt - dt_) <= 1e-12 && std::abs(gripper_.dt - dt_) <= 1e-12, ErrorCategory::Parameter,
          "RP: model dt differs from world dt");
  require(std::isfinite(tau_) && tau_ >= dt_, ErrorCategory::Parameter, "RP: tau must be >= dt");
}

void RPController::reset() { initialized_ = false; }

RPController::Command RPController::step(std::span<const OperatorState> history, std::size_t k,
                                         const GripperState& right) {
  require(k < history.size(), ErrorCategory::InputDomain, "RP: history does not contain tick k");
  Command out;
  if (!initialized_ || k == 0) {
    filtered_ = {right.position, right.theta};
    initialized_ = true;
    out.target = filtered_;
    return out;
  }
  const OperatorState& prev = history[k - 1];
  const OperatorState& cur = history[k];
  const Prediction pm = motion_.predict(prev.position, prev.velocity, cur.velocity);
  const Prediction pg = gripper_.predict(VectorXd::Constant(1, prev.theta), VectorXd::Constant(1, prev.theta_rate),
                                         VectorXd::Constant(1, cur.theta_rate));
  const double alpha = dt_ / tau_;
  filtered_.position += alpha * (Vector3d(pm.y) - filtered_.position);
  filtered_.theta += alpha * (pg.y[0] - filtered_.theta);
  filtered_.theta = std::clamp(filtered_.theta, 0.0, theta_max_);
  out.target = filtered_;
  out.motion_degenerate = pm.degenerate;
  out.gripper_degenerate = pg.degenerate;
  return out;
}

RPController::Command rp_step(RPController& controller, std::span<const OperatorState> history, std::size_t k,
                              const GripperState& right) {
  return controller.step(history, k, right);
}

RPTrainConfig::RPTrainConfig() {
  motion.degree = 1;
  gripper.degree = 2;
}

RPModels train_rp(std::span<const Demonstration> demos, const RPTrainConfig& config) {
  require(!demos.empty(), ErrorCategory::EmptyInput, "train-rp: no demonstrations");
  require(config.tau_ticks >= 1.0, ErrorCategory::Parameter, "train-rp: tau must be at least one tick");
  Recording motion;
  Recording gripper;
  for (std::size_t i = 0; i < demos.size(); ++i) {
    Recording m = demos[i].motion;
    Recording g = demos[i].gripper;
    for (Tick& t : m.ticks) t.trial_id = static_cast<int>(i);
    for (Tick& t : g.ticks) t.trial_id = static_cast<int>(i);
    motion.append(m);
    gripper.append(g);
  }
  motion.validate();
  gripper.validate();
  return {train(motion.to_dataset(), config.motion), train(gripper.to_dataset(), config.gripper)};
}

namespace {

const char* stage_label(BlockPhase p) {
  switch (p) {
    case BlockPhase::OnPeg: return "approach";
    case BlockPhase::HeldLeft:
    case BlockPhase::HeldBoth: return "handover";
    case BlockPhase::HeldRight: return "transfer";
    case BlockPhase::Placed: return "complete";
    case BlockPhase::Dropped: return "dropped";
  }
  return "?";
}


}  // namespace

EpisodeReport run_episode(const PegWorldConfig& config, const OperatorScript& left, const RightPolicy& policy,
                          std::uint64_t seed) {
  config.validate();
  left.validate();
  PegWorld world(config, at_rest(left.start, left.theta_start),
                 at_rest(config.right_home, config.theta_max));
  Rng rng = Rng::substream(seed, 0x0b5);
  const auto max_ticks = static_cast<long>(std::llround(config.timeout / config.dt));
  const double reach = config.max_speed * config.dt;

  EpisodeReport report;
  std::vector<OperatorState> history;
  history.reserve(static_cast<std::size_t>(max_ticks) + 1);
  const char* stage = "approach";
  double closest = std::numeric_limits<double>::infinity();
  const auto violate = [&](const std::string& what) {
    if (report.invariants_ok) {
      report.invariants_ok = false;
      report.invariant_violation = "tick " + std::to_string(world.tick()) + ": " + what;
    }
  };
  const auto check_state = [&] {
    for (const GripperState* g : {&world.left(), &world.right()})
      if (!(g->theta >= 0.0 && g->theta <= config.theta_max)) violate("gripper angle out of bounds");
    const auto holds = [&](const GripperState& g) {
      return g.theta < config.theta_close && (g.position - world.block_position()).norm() <= config.grasp_radius;
    };
    const BlockPhase p = world.phase();
    if ((p == BlockPhase::HeldLeft || p == BlockPhase::HeldBoth) && !holds(world.left()))
      violate("block held by an open or distant left gripper");
    if ((p == BlockPhase::HeldRight || p == BlockPhase::HeldBoth) && !holds(world.right()))
      violate("block held by an open or distant right gripper");
  };

  TraceRow row;
  const auto trace = [&](const GripperCommand& cmd, bool degenerate) {
    row.tick = world.tick();
    row.t = world.time();
    row.left = world.left();
    row.right = world.right();
    row.right_command = cmd;
    row.block = world.block_position();
    row.phase = world.phase();
    row.degenerate = degenerate;
    report.trace.push_back(row);
  };
  check_state();
  trace({world.right().position, world.right().theta}, false);

  for (long k = 0; k < max_ticks; ++k) {
    history.push_back(observe(world.left(), config, rng));
    bool degenerate = false;
    const GripperCommand right_cmd =
        policy(std::span<const OperatorState>(history.data(), history.size()), static_cast<std::size_t>(k),
               world.right(), degenerate);
    const BlockPhase before = world.phase();
    const Vector3d block_before = world.block_position();
    world.step(left.command(static_cast<double>(k + 1) * config.dt), right_cmd);

    if (!phase_transition_allowed(before, world.phase()))
      violate(std::string("block jumped from ") + phase_name(before) + " to " + phase_name(world.phase()));
    if ((world.block_position() - block_before).norm() > reach * (1.0 + 1e-9) + 1e-12)
      violate("block displaced faster than the gripper speed limit");
    check_state();
    trace(right_cmd, degenerate);

    if (world.phase() == BlockPhase::HeldLeft)
      closest = std::min(closest, (world.right().position - world.block_position()).norm());
    if (world.phase() != BlockPhase::Dropped) stage = stage_label(world.phase());
    if (world.phase() == BlockPhase::Placed || world.phase() == BlockPhase::Dropped) break;
  }

  report.both_held_ticks = world.both_held_ticks();
  report.completed = world.phase() == BlockPhase::Placed && world.both_held_ticks() >= 1;
  report.completion_time = world.time();
  report.phase = stage;
  if (const auto d = world.right_grasp_distance())
    report.handover_error = *d;
  else
    report.handover_error = std::isfinite(closest) ? closest : std::numeric_limits<double>::quiet_NaN();
  return report;
}

EpisodeReport run_episode(const PegWorldConfig& world, const OperatorScript& left, RPController& rp,
                          std::uint64_t seed) {
  rp.reset();
  const RightPolicy policy = [&rp](std::span<const OperatorState> history, std::size_t k, const GripperState& right,
                                   bool& degenerate) {
    const RPController::Command c = rp.step(history, k, right);
    degenerate = c.motion_degenerate || c.gripper_degenerate;
    return c.target;
  };
  return run_episode(world, left, policy, seed);
}

EpisodeReport run_episode(const PegWorldConfig& world, const OperatorScript& left, const OperatorScript& right,
                          std::uint64_t seed) {
  right.validate();
  const double dt = world.dt;
  const RightPolicy policy = [&right, dt](std::span<const OperatorState>, std::size_t k, const GripperState&,
                                          bool&) { return right.command(static_cast<double>(k + 1) * dt); };
  return run_episode(world, left, policy, seed);
}

void write_trace_csv(const EpisodeReport& report, std::ostream& out) {
  out << "# it2pf-trace v1 completed=" << (report.completed ? 1 : 0) << " completion_time="
      << fmt(report.completion_time) << " handover_error=" << fmt(report.handover_error) << " phase=" << report.phase
      << '\n';
  out << "tick,t,left_x,left_y,left_z,left_theta,right_x,right_y,right_z,right_theta,"
         "cmd_x,cmd_y,cmd_z,cmd_theta,block_x,block_y,block_z,phase,degenerate\n";
  for (const TraceRow& r : report.trace) {
    out << r.tick << ',' << fmt(r.t);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(r.left.position[i]);
    out << ',' << fmt(r.left.theta);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(r.right.position[i]);
    out << ',' << fmt(r.right.theta);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(r.right_command.position[i]);
    out << ',' << fmt(r.right_command.theta);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(r.block[i]);
    out << ',' << phase_name(r.phase) << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
}

}  // namespace it2pf
