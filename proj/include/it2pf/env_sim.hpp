#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "it2pf/recording.hpp"

namespace it2pf {

struct StiffnessBump {
  double amplitude = 0.0;  // fraction of base stiffness
  double cx = 0.0;         // [m]
  double cy = 0.0;         // [m]
  double width = 0.02;     // [m]
};

/// Hunt-Crossley silicone block with a spatially varying stiffness field.
struct SiliconeEnv {
  double base_stiffness = 800.0;  // [N/m^1.5]
  std::vector<StiffnessBump> bumps;
  double damping = 5.0;  // [N s/m^2.5]
  double exponent = 1.5;
  double surface_height = 0.0;  // [m]

  void validate() const;
  /// k(x1, x2) = base * (1 + sum_g a_g exp(-|p - c_g|^2 / (2 w_g^2))).
  double stiffness(double x1, double x2) const;
  /// Upper bound on |grad k|.
  double stiffness_lipschitz() const;
};

SiliconeEnv default_silicone_env();

struct ContactForce {
  double elastic = 0.0;
  double dissipative = 0.0;
  /// elastic + dissipative, clamped at 0.
  double normal = 0.0;
  Eigen::Vector3d vector() const { return {0.0, 0.0, normal}; }
};

ContactForce contact_force(const SiliconeEnv& env, const Eigen::Vector3d& position,
                           const Eigen::Vector3d& velocity);

enum class DepthLevel { Shallow = 0, Medium = 1, Deep = 2 };

struct PressLocation {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct PressProtocol {
  std::array<double, 3> depths{0.002, 0.005, 0.008};  // [m]
  int trials_per_level = 50;
  int grid_nx = 5;
  int grid_ny = 5;
  double grid_x0 = 0.01;
  double grid_y0 = 0.01;
  double grid_spacing = 0.02;
  double dt = 0.01;
  double clearance = 0.002;  // start height above the surface [m]
  double descend_time = 0.5;
  double hold_time = 0.5;
  double retract_time = 0.5;
  double position_noise = 1e-4;  // [m]
  double force_noise = 0.05;     // [N]
  std::uint64_t seed = 7;

  void validate() const;
  std::vector<PressLocation> grid() const;
  int trial_count() const { return 3 * trials_per_level; }
};

struct TrialInfo {
  int trial_id = 0;
  DepthLevel level = DepthLevel::Shallow;
  PressLocation location;
};

/// Descend, hold, retract press at one location; y = measured normal force.
Recording generate_trial(const SiliconeEnv& env, const PressProtocol& protocol, DepthLevel level,
                         const PressLocation& location, std::uint64_t seed, int trial_id = 0);

struct BenchmarkData {
  Recording recording;
  std::vector<TrialInfo> trials;
};

/// trials_per_level presses per depth level, cycling over the scan grid. Trial id
/// = level * trials_per_level + j; trial seed = substream(protocol.seed, trial id).
BenchmarkData generate_benchmark(const SiliconeEnv& env, const PressProtocol& protocol);

}  // namespace it2pf
