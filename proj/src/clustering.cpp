#include "it2pf/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "it2pf/errors.hpp"

namespace it2pf {

namespace {

double squared_distance(const MatrixXd& a, Eigen::Index i, const MatrixXd& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

// Index of the maximum potential; lowest index wins ties.
Eigen::Index argmax(const VectorXd& p) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

void reduce_around(VectorXd& potential, const MatrixXd& points, Eigen::Index center,
                   double center_potential, double beta) {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double d2 = squared_distance(points, i, points, center);
    potential[i] = std::max(0.0, potential[i] - center_potential * std::exp(-beta * d2));
  }
  potential[center] = 0.0;
}

MatrixXd update_memberships(const MatrixXd& points, const MatrixXd& centers, double fuzzifier) {
  const Eigen::Index p = centers.rows();
  const Eigen::Index n = points.rows();
  MatrixXd u(p, n);
  const double expo = 1.0 / (fuzzifier - 1.0);
  VectorXd d2(p);
  for (Eigen::Index j = 0; j < n; ++j) {
    int zeros = 0;
    for (Eigen::Index i = 0; i < p; ++i) {
      d2[i] = squared_distance(points, j, centers, i);
      if (d2[i] == 0.0) ++zeros;
    }
    if (zeros > 0) {
      // Point coincides with one or more centers: split membership among them.
      for (Eigen::Index i = 0; i < p; ++i) u(i, j) = d2[i] == 0.0 ? 1.0 / zeros : 0.0;
      continue;
    }
    for (Eigen::Index i = 0; i < p; ++i) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) s += std::pow(d2[i] / d2[k], expo);
      u(i, j) = 1.0 / s;
    }
  }
  return u;
}

MatrixXd update_centers(const MatrixXd& points, const MatrixXd& u, double fuzzifier) {
  const MatrixXd um = u.array().pow(fuzzifier).matrix();
  MatrixXd centers = um * points;
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    const double total = um.row(i).sum();
    if (total > 0.0) centers.row(i) /= total;
  }
  return centers;
}

}  // namespace

void SubtractiveParams::validate() const {
  require(r_a > 0.0, ErrorCategory::Parameter, "subtractive clustering: r_a must be > 0");
  require(r_b >= r_a, ErrorCategory::Parameter, "subtractive clustering: r_b must be >= r_a");
  require(reject_ratio > 0.0 && reject_ratio < accept_ratio && accept_ratio <= 1.0,
          ErrorCategory::Parameter,
          "subtractive clustering: need 0 < reject_ratio < accept_ratio <= 1");
}

void FcmParams::validate() const {
  require(fuzzifier > 1.0, ErrorCategory::Parameter, "FCM fuzzifier must be > 1");
  require(tol > 0.0, ErrorCategory::Parameter, "FCM tolerance must be > 0");
  require(max_iter >= 1, ErrorCategory::Parameter, "FCM max_iter must be >= 1");
  require(width_floor > 0.0, ErrorCategory::Parameter, "FCM width floor must be > 0");
}

VectorXd subtractive_potentials(const MatrixXd& points, double r_a) {
  const double alpha = 4.0 / (r_a * r_a);
  const Eigen::Index n = points.rows();
  VectorXd potential = VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double e = std::exp(-alpha * squared_distance(points, i, points, j));
      potential[i] += e;
      potential[j] += e;
    }
  }
  return potential;
}

std::vector<std::size_t> subtractive_cluster(const MatrixXd& points, const SubtractiveParams& params) {
  params.validate();
  require(points.rows() >= 1, ErrorCategory::EmptyInput, "subtractive clustering needs points");
  const double beta = 4.0 / (params.r_b * params.r_b);
  VectorXd potential = subtractive_potentials(points, params.r_a);

  std::vector<std::size_t> centers;
  Eigen::Index first = argmax(potential);
  const double p1 = potential[first];
  centers.push_back(static_cast<std::size_t>(first));
  reduce_around(potential, points, first, p1, beta);

  while (true) {
    const Eigen::Index k = argmax(potential);
    const double pk = potential[k];
    if (pk <= 0.0) break;
    const double ratio = pk / p1;
    if (ratio > params.accept_ratio) {
      centers.push_back(static_cast<std::size_t>(k));
      reduce_around(potential, points, k, pk, beta);
      continue;
    }
    if (ratio < params.reject_ratio) break;
    double d_min = std::numeric_limits<double>::infinity();
    for (std::size_t c : centers)
      d_min = std::min(d_min, std::sqrt(squared_distance(points, k, points, static_cast<Eigen::Index>(c))));
    if (d_min / params.r_a + ratio >= 1.0) {
      centers.push_back(static_cast<std::size_t>(k));
      reduce_around(potential, points, k, pk, beta);
    } else {
      potential[k] = 0.0;
    }
  }
  return centers;
}

std::vector<std::size_t> subtractive_top(const MatrixXd& points, const SubtractiveParams& params,
                                         std::size_t count) {
  params.validate();
  require(points.rows() >= 1, ErrorCategory::EmptyInput, "subtractive clustering needs points");
  require(count >= 1 && count <= static_cast<std::size_t>(points.rows()), ErrorCategory::Parameter,
          "requested cluster count must lie in [1, N]");
  const double beta = 4.0 / (params.r_b * params.r_b);
  VectorXd potential = subtractive_potentials(points, params.r_a);
  std::vector<std::size_t> centers;
  std::vector<bool> taken(static_cast<std::size_t>(points.rows()), false);
  while (centers.size() < count) {
    Eigen::Index k = argmax(potential);
    if (taken[static_cast<std::size_t>(k)]) {
      // All remaining potential is zero; fall back to the first unused point.
      k = static_cast<Eigen::Index>(std::find(taken.begin(), taken.end(), false) - taken.begin());
    }
    taken[static_cast<std::size_t>(k)] = true;
    centers.push_back(static_cast<std::size_t>(k));
    reduce_around(potential, points, k, potential[k], beta);
  }
  return centers;
}

double fcm_objective(const MatrixXd& points, const MatrixXd& centers, const MatrixXd& memberships,
                     double fuzzifier) {
  double j = 0.0;
  for (Eigen::Index i = 0; i < centers.rows(); ++i)
    for (Eigen::Index k = 0; k < points.rows(); ++k)
      j += std::pow(memberships(i, k), fuzzifier) * squared_distance(points, k, centers, i);
  return j;
}

ClusterResult fcm_refine(const MatrixXd& points, int p, const MatrixXd& init_centers,
                         const FcmParams& params) {
  params.validate();
  require(points.rows() >= 1, ErrorCategory::EmptyInput, "FCM needs points");
  require(p >= 1, ErrorCategory::Parameter, "FCM cluster count must be >= 1");
  require(p <= points.rows(), ErrorCategory::Parameter, "FCM cluster count exceeds point count");
  require(init_centers.rows() == p && init_centers.cols() == points.cols(), ErrorCategory::Shape,
          "FCM initial centers have wrong shape");

  ClusterResult result;
  result.p = p;
  MatrixXd centers = init_centers;
  MatrixXd u;
  for (int it = 0; it < params.max_iter; ++it) {
    u = update_memberships(points, centers, params.fuzzifier);
    result.objective_history.push_back(fcm_objective(points, centers, u, params.fuzzifier));
    MatrixXd next = update_centers(points, u, params.fuzzifier);
    const double shift = (next - centers).rowwise().norm().maxCoeff();
    centers = std::move(next);
    result.iterations = it + 1;
    if (shift < params.tol) break;
  }
  u = update_memberships(points, centers, params.fuzzifier);
  result.objective_history.push_back(fcm_objective(points, centers, u, params.fuzzifier));

  const MatrixXd um = u.array().pow(params.fuzzifier).matrix();
  result.widths.resize(p, points.cols());
  for (Eigen::Index i = 0; i < p; ++i) {
    const double total = um.row(i).sum();
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
      double var = 0.0;
      if (total > 0.0) {
        var = (um.row(i).transpose().array() * (points.col(d).array() - centers(i, d)).square()).sum() /
              total;
      }
      result.widths(i, d) = std::max(std::sqrt(var), params.width_floor);
    }
  }
  result.centers = std::move(centers);
  result.memberships = std::move(u);
  return result;
}

std::vector<RulePremise> build_premises(const ClusterResult& result, int z_dims, double delta) {
  require(z_dims >= 1 && z_dims <= result.centers.cols(), ErrorCategory::Shape,
          "build_premises: z subspace larger than cluster space");
  std::vector<RulePremise> premises(static_cast<std::size_t>(result.p));
  for (int l = 0; l < result.p; ++l) {
    auto& sets = premises[static_cast<std::size_t>(l)].sets;
    sets.reserve(static_cast<std::size_t>(z_dims));
    for (int d = 0; d < z_dims; ++d) sets.emplace_back(result.centers(l, d), result.widths(l, d), delta);
  }
  return premises;
}

MatrixXd to_unit_hypercube(const MatrixXd& points) {
  MatrixXd out = points;
  for (Eigen::Index d = 0; d < points.cols(); ++d) {
    const double lo = points.col(d).minCoeff();
    const double hi = points.col(d).maxCoeff();
    const double range = hi - lo;
    if (range > 0.0)
      out.col(d) = (points.col(d).array() - lo) / range;
    else
      out.col(d).setZero();
  }
  return out;
}

}  // namespace it2pf
