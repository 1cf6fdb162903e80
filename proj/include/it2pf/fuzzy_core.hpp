#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "it2pf/monomial_basis.hpp"

namespace it2pf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Channel {
  MotionTrajectory,  // h_mt
  GestureAction,     // h_ga
  Environment,       // e
};

std::string_view channel_tag(Channel c) noexcept;
Channel parse_channel(std::string_view tag);

/// One training pair: state, velocity, next-tick velocity and output.
struct Sample {
  VectorXd x;
  VectorXd v;
  VectorXd v_next;
  VectorXd y;
};

/// Ordered samples of one channel. `trial_ids` is parallel to `samples`.
struct Dataset {
  Channel channel = Channel::Environment;
  double dt = 0.0;
  int n = 0;
  int m = 0;
  std::vector<Sample> samples;
  std::vector<int> trial_ids;

  std::size_t size() const noexcept { return samples.size(); }
  /// Throws unless dt > 0, N >= 1 and every sample has shape (n, m) with finite entries.
  void validate() const;
  /// Distinct trial ids in order of first appearance.
  std::vector<int> trials() const;
  /// Samples whose trial id is in `ids`, original order preserved.
  Dataset subset(std::span<const int> ids) const;
};

/// Premise vector z = [x, v, v_next], length 3n.
class FeatureVector {
 public:
  FeatureVector(const VectorXd& x, const VectorXd& v, const VectorXd& v_next);
  explicit FeatureVector(VectorXd z);

  const VectorXd& values() const noexcept { return z_; }
  Eigen::Index size() const noexcept { return z_.size(); }
  double operator[](Eigen::Index i) const { return z_[i]; }

 private:
  VectorXd z_;
};

struct FiringInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Gaussian set with uncertain width: lower bound uses sigma*(1-delta), upper sigma*(1+delta).
class IT2Gaussian {
 public:
  IT2Gaussian(double center, double sigma, double delta);

  double center() const noexcept { return center_; }
  double sigma() const noexcept { return sigma_; }
  double delta() const noexcept { return delta_; }

  FiringInterval eval(double t) const;

 private:
  double center_;
  double sigma_;
  double delta_;
};

struct RulePremise {
  std::vector<IT2Gaussian> sets;
};

/// Polynomial matrices M(z), C(z), K(z), f(z) of one rule.
///
/// Row r*n + j of coeffs_M/C/K holds the basis coefficients of entry (r, j);
/// row r of coeffs_f holds those of f_r.
struct PolynomialConsequent {
  int degree = 0;
  int n = 0;
  int m = 0;
  MatrixXd coeffs_M;
  MatrixXd coeffs_C;
  MatrixXd coeffs_K;
  MatrixXd coeffs_f;

  static PolynomialConsequent zeros(int n, int m, int degree);
  int basis_size() const noexcept { return static_cast<int>(coeffs_f.cols()); }
  void validate() const;
};

struct TypeReductionConfig {
  double b_lower = 0.5;
  double b_upper = 0.5;

  void validate() const;
};

struct TypeReducedWeights {
  std::vector<double> weights;
  bool degenerate = false;
};

/// Per-dimension affine map z -> (z - mean) / scale.
struct Normalization {
  VectorXd mean;
  VectorXd scale;

  VectorXd apply(const VectorXd& z) const;
  /// Mean and population standard deviation per dimension; constant dimensions get scale 1.
  static Normalization fit(const MatrixXd& rows);
};

struct Rule {
  RulePremise premise;
  PolynomialConsequent consequent;
};

struct Prediction {
  VectorXd y;
  bool degenerate = false;
};

inline constexpr double kDefaultEpsilonFloor = 1e-12;

struct IT2PFModel {
  Channel channel = Channel::Environment;
  double dt = 0.0;
  int n = 0;
  int m = 0;
  int degree = 0;
  double delta = 0.0;
  std::vector<Rule> rules;
  Normalization norm;
  TypeReductionConfig tr_config;
  double epsilon_floor = kDefaultEpsilonFloor;

  std::size_t rule_count() const noexcept { return rules.size(); }
  void validate() const;

  /// Type-reduced normalized weights at an already normalized feature vector.
  TypeReducedWeights weights(const FeatureVector& z_normalized) const;
  Prediction predict(const VectorXd& x, const VectorXd& v, const VectorXd& v_next) const;
  Prediction predict(const Sample& s) const { return predict(s.x, s.v, s.v_next); }
};

FiringInterval eval_membership(const IT2Gaussian& set, double t);
FiringInterval firing_interval(const RulePremise& premise, const FeatureVector& z);
TypeReducedWeights type_reduce(std::span<const FiringInterval> intervals,
                               const TypeReductionConfig& cfg,
                               double epsilon_floor = kDefaultEpsilonFloor);

/// y = M(z)(v_next - v)/dt + C(z) v + K(z) x + f(z).
VectorXd eval_consequent(const PolynomialConsequent& cons, const FeatureVector& z,
                         const VectorXd& x, const VectorXd& v, const VectorXd& v_next, double dt);
/// Same, with the monomial basis already evaluated at z.
VectorXd eval_consequent(const PolynomialConsequent& cons, const VectorXd& basis_values,
                         const VectorXd& x, const VectorXd& v, const VectorXd& v_next, double dt);

inline Prediction predict(const IT2PFModel& model, const VectorXd& x, const VectorXd& v,
                          const VectorXd& v_next) {
  return model.predict(x, v, v_next);
}

}  // namespace it2pf
