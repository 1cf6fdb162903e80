#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "it2pf/fuzzy_core.hpp"
#include "it2pf/identification.hpp"
#include "it2pf/recording.hpp"

namespace it2pf {

using Eigen::Vector3d;

inline constexpr double kDegree = std::numbers::pi / 180.0;

struct PegWorldConfig {
  int peg_cols = 3;
  int peg_rows = 2;
  double peg_spacing = 0.06;                    // [m]
  Vector3d peg_origin{-0.06, -0.03, 0.0};       // peg (0, 0) top
  int start_peg = 0;
  int target_peg = 5;
  double grasp_radius = 0.005;                  // [m]
  double theta_max = 60.0 * kDegree;            // [rad]
  double theta_close = 10.0 * kDegree;          // [rad]
  double max_speed = 0.2;                       // [m/s]
  double dt = 0.01;                             // [s]
  double timeout = 60.0;                        // [s]
  Vector3d left_home{-0.10, 0.0, 0.05};
  Vector3d right_home{0.10, 0.0, 0.05};
  // Operator observation noise seen by the Robotic Partner (per-episode seed).
  double obs_position_noise = 5e-5;   // [m]
  double obs_velocity_noise = 5e-4;   // [m/s]
  double obs_angle_noise = 1e-3;      // [rad]
  double obs_angle_rate_noise = 5e-3; // [rad/s]

  void validate() const;
  std::vector<Vector3d> pegs() const;
};

enum class BlockPhase { OnPeg, HeldLeft, HeldBoth, HeldRight, Placed, Dropped };

const char* phase_name(BlockPhase p) noexcept;
/// Allowed single-tick transitions of the block phase (staying put is always allowed).
bool phase_transition_allowed(BlockPhase from, BlockPhase to) noexcept;

struct GripperState {
  Vector3d position = Vector3d::Zero();
  Vector3d velocity = Vector3d::Zero();
  double theta = 0.0;
  double theta_rate = 0.0;
};

struct GripperCommand {
  Vector3d position = Vector3d::Zero();
  double theta = 0.0;
};

/// Operator state as observed by the partner (left gripper).
using OperatorState = GripperState;

class PegWorld {
 public:
  /// Grippers start open at their home positions.
  explicit PegWorld(PegWorldConfig config);
  PegWorld(PegWorldConfig config, const GripperState& left, const GripperState& right);

  const PegWorldConfig& config() const noexcept { return config_; }
  const GripperState& left() const noexcept { return left_; }
  const GripperState& right() const noexcept { return right_; }
  BlockPhase phase() const noexcept { return phase_; }
  int block_peg() const noexcept { return block_peg_; }
  const Vector3d& block_position() const noexcept { return block_; }
  double time() const noexcept { return time_; }
  long tick() const noexcept { return tick_; }
  int both_held_ticks() const noexcept { return both_held_ticks_; }
  /// Distance between the right gripper and the block when the right gripper closed on it.
  std::optional<double> right_grasp_distance() const noexcept { return right_grasp_distance_; }

  /// Advances one tick: velocity-limited motion toward the commands, then grasp/release logic.
  void step(const GripperCommand& left_cmd, const GripperCommand& right_cmd);

 private:
  void move(GripperState& g, const GripperCommand& cmd) const;
  void update_block(bool left_closed_edge, bool right_closed_edge);
  bool closed(const GripperState& g) const { return g.theta < config_.theta_close; }
  double distance_to_block(const GripperState& g) const { return (g.position - block_).norm(); }
  std::optional<int> peg_near(const Vector3d& p) const;

  PegWorldConfig config_;
  std::vector<Vector3d> pegs_;
  GripperState left_;
  GripperState right_;
  BlockPhase phase_ = BlockPhase::OnPeg;
  int block_peg_ = 0;
  Vector3d block_ = Vector3d::Zero();
  Vector3d offset_ = Vector3d::Zero();
  double time_ = 0.0;
  long tick_ = 0;
  int both_held_ticks_ = 0;
  std::optional<double> right_grasp_distance_;
};

/// Minimum-jerk piecewise path plus a gripper angle schedule.
struct OperatorScript {
  struct Segment {
    double duration = 1.0;
    Vector3d target = Vector3d::Zero();
  };
  struct AngleMove {
    double start = 0.0;
    double duration = 0.5;
    double target = 0.0;
  };

  Vector3d start = Vector3d::Zero();
  std::vector<Segment> segments;
  double theta_start = 0.0;
  std::vector<AngleMove> gripper;

  void validate() const;
  double duration() const;
  Vector3d position(double t) const;
  double theta(double t) const;
  GripperCommand command(double t) const { return {position(t), theta(t)}; }
};

/// Phase durations of the scripted bimanual demonstration.
struct OperatorTiming {
  double approach = 2.0;   // left: home -> block
  double grasp = 0.8;      // left: dwell at the block while closing
  double close = 0.6;      // left gripper closing time
  double carry = 2.5;      // left: block -> handover point; right: home -> handover point
  double dwell = 0.6;      // both at the handover point before the release cue
  double release = 1.6;    // left gripper opening to release_angle
  double release_angle = 30.0 * kDegree;
  double partner_close = 0.35;
  double partner_close_delay = 0.05;
  double retreat = 2.5;    // left: handover -> rest; right: handover -> target peg
  double settle = 1.0;
  Vector3d handover{0.0, 0.0, 0.04};
  Vector3d left_rest{-0.07, 0.05, 0.07};
  // Per-seed variability of the operator.
  double position_jitter = 0.002;  // [m], std of handover / rest-point offsets
  double time_jitter = 0.06;       // relative std of phase durations

  void validate() const;
};

struct ScriptPair {
  OperatorScript left;
  OperatorScript right;
};

/// Nominal scripts when `jitter_seed` is empty, otherwise a seeded perturbation of them.
ScriptPair make_scripts(const PegWorldConfig& world, const OperatorTiming& timing,
                        std::optional<std::uint64_t> jitter_seed = std::nullopt);

struct Demonstration {
  Recording motion;   // h_mt: x = left position, y = right position
  Recording gripper;  // h_ga: x = left angle, y = right angle
};

/// Runs both scripts for their full duration (N = duration / dt ticks). With
/// `require_transfer`, throws a demonstration error unless the block is handed over and placed.
/// With `noise_seed`, the left gripper is recorded through the observation noise model.
Demonstration record_demonstration(const PegWorldConfig& world, const OperatorScript& left,
                                   const OperatorScript& right, int trial_id = 0,
                                   bool require_transfer = true,
                                   std::optional<std::uint64_t> noise_seed = std::nullopt);

/// Learned partner for the right gripper.
class RPController {
 public:
  struct Command {
    GripperCommand target;
    bool motion_degenerate = false;
    bool gripper_degenerate = false;
  };

  RPController(IT2PFModel motion, IT2PFModel gripper, double tau, const PegWorldConfig& world);

  /// Reads operator ticks 0..k of `history` only. At k = 0 the current right state is held.
  Command step(std::span<const OperatorState> history, std::size_t k, const GripperState& right);
  void reset();

  const IT2PFModel& motion_model() const noexcept { return motion_; }
  const IT2PFModel& gripper_model() const noexcept { return gripper_; }
  double tau() const noexcept { return tau_; }

 private:
  IT2PFModel motion_;
  IT2PFModel gripper_;
  double tau_;
  double dt_;
  double theta_max_;
  bool initialized_ = false;
  GripperCommand filtered_;
};

RPController::Command rp_step(RPController& controller, std::span<const OperatorState> history,
                              std::size_t k, const GripperState& right);

struct RPTrainConfig {
  TrainConfig motion;
  TrainConfig gripper;
  double tau_ticks = 3.0;  // low-pass time constant in ticks

  RPTrainConfig();
};

struct RPModels {
  TrainResult motion;
  TrainResult gripper;
};

RPModels train_rp(std::span<const Demonstration> demos, const RPTrainConfig& config);

struct TraceRow {
  long tick = 0;
  double t = 0.0;
  GripperState left;
  GripperState right;
  GripperCommand right_command;
  Vector3d block = Vector3d::Zero();
  BlockPhase phase = BlockPhase::OnPeg;
  bool degenerate = false;
};

struct EpisodeReport {
  bool completed = false;
  double completion_time = 0.0;
  /// Right gripper to block distance at the right grasp, otherwise its closest approach while
  /// the left gripper held the block (NaN if the left never grasped).
  double handover_error = 0.0;
  int both_held_ticks = 0;
  std::string phase = "approach";
  bool invariants_ok = true;
  std::string invariant_violation;
  std::vector<TraceRow> trace;
};

/// Right-gripper policy: reads operator ticks 0..k and the current right state.
using RightPolicy =
    std::function<GripperCommand(std::span<const OperatorState> history, std::size_t k, const GripperState& right,
                                 bool& degenerate)>;

EpisodeReport run_episode(const PegWorldConfig& world, const OperatorScript& left, const RightPolicy& policy,
                          std::uint64_t seed);
EpisodeReport run_episode(const PegWorldConfig& world, const OperatorScript& left, RPController& rp,
                          std::uint64_t seed);
/// Scripted right gripper (demonstration replay oracle).
EpisodeReport run_episode(const PegWorldConfig& world, const OperatorScript& left, const OperatorScript& right,
                          std::uint64_t seed);

void write_trace_csv(const EpisodeReport& report, std::ostream& out);

}  // namespace it2pf
