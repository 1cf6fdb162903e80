#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "it2pf/fuzzy_core.hpp"

namespace it2pf {

struct SubtractiveParams {
  double r_a = 0.5;
  double r_b = 0.75;
  double accept_ratio = 0.5;
  double reject_ratio = 0.15;

  void validate() const;
};

struct FcmParams {
  double fuzzifier = 2.0;
  double tol = 1e-6;
  int max_iter = 200;
  double width_floor = 1e-3;

  void validate() const;
};

/// Rows of `centers` and `widths` are clusters; columns of `memberships` are points.
struct ClusterResult {
  int p = 0;
  MatrixXd centers;
  MatrixXd memberships;
  MatrixXd widths;
  std::vector<double> objective_history;
  int iterations = 0;
};

/// Chiu's subtractive clustering. `points` rows are data points scaled to the unit hypercube.
/// Returns row indices of the accepted centers, in acceptance order.
std::vector<std::size_t> subtractive_cluster(const MatrixXd& points, const SubtractiveParams& params);

/// Same potential/reduction sequence, but ignores the acceptance rule and returns
/// exactly `count` centers (used when the rule count is fixed by the caller).
std::vector<std::size_t> subtractive_top(const MatrixXd& points, const SubtractiveParams& params,
                                         std::size_t count);

/// Initial mountain potentials P_i = sum_j exp(-4 |x_i - x_j|^2 / r_a^2).
VectorXd subtractive_potentials(const MatrixXd& points, double r_a);

/// Fuzzy C-means starting from `init_centers` (p rows).
ClusterResult fcm_refine(const MatrixXd& points, int p, const MatrixXd& init_centers,
                         const FcmParams& params);

/// FCM objective J = sum_ij u_ij^m |x_j - c_i|^2.
double fcm_objective(const MatrixXd& points, const MatrixXd& centers, const MatrixXd& memberships,
                     double fuzzifier);

/// Rule premises from the first `z_dims` coordinates of each cluster.
std::vector<RulePremise> build_premises(const ClusterResult& result, int z_dims, double delta);

/// Per-dimension min-max scaling to [0, 1]; constant dimensions map to 0.
MatrixXd to_unit_hypercube(const MatrixXd& points);

}  // namespace it2pf
