#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "it2pf/clustering.hpp"
#include "it2pf/fuzzy_core.hpp"

namespace it2pf {

struct TrainConfig {
  int degree = 2;
  double delta = 0.2;
  double huber_k = 1.345;
  int irls_max_iter = 50;
  double irls_tol = 1e-8;
  SubtractiveParams subtractive;
  FcmParams fcm;
  TypeReductionConfig tr_config;
  double epsilon_floor = kDefaultEpsilonFloor;
  /// 0 lets subtractive clustering choose the rule count.
  int rule_count = 0;
  /// A rule keeps polynomial degree d only while its weight sum is at least this multiple of its coefficient count.
  double support_ratio = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RuleFitReport {
  int rule = 0;
  /// Weighted RMS residual per output dimension.
  std::vector<double> residual_norms;
  /// Sum of the rule's sample weights.
  double effective_weight = 0.0;
  /// Mean final IRLS weight relative to the rule weight, per output dimension.
  std::vector<double> mean_robust_weight;
  int iterations = 0;
  int active_coefficients = 0;
  /// Highest monomial degree actually fitted; below the model degree when support is low.
  int fitted_degree = 0;
  /// Smallest reciprocal condition estimate seen across solves (scaled normal equations).
  double rcond = 1.0;
  bool rank_deficient = false;
  bool low_support = false;
  /// Huber objective after each IRLS solve, per output dimension.
  std::vector<std::vector<double>> objective_history;
};

struct FitReport {
  std::vector<RuleFitReport> rules;
  double train_rmse = 0.0;
  double train_mae = 0.0;
  std::size_t degenerate_samples = 0;
};

/// Clustering outcome shared by models that differ only in consequents or delta.
struct RuleBase {
  Normalization norm;
  ClusterResult clusters;
  std::size_t rule_count() const noexcept { return static_cast<std::size_t>(clusters.p); }
};

struct RuleFit {
  PolynomialConsequent consequent;
  RuleFitReport report;
};

struct TrainResult {
  IT2PFModel model;
  FitReport report;
};

/// Regressor row shared by all output dimensions: blocks phi(z) * a_j, phi(z) * v_j,
/// phi(z) * x_j (j = 1..n) and phi(z), with a = (v_next - v)/dt. Length (3n+1)B.
VectorXd assemble_regressor(const FeatureVector& z, const VectorXd& x, const VectorXd& v,
                            const VectorXd& v_next, double dt, int degree);

/// Coefficient vector of output row r, laid out to match assemble_regressor.
VectorXd consequent_coefficients(const PolynomialConsequent& cons, int r);
PolynomialConsequent consequent_from_coefficients(const std::vector<VectorXd>& thetas, int n, int degree);

/// Raw premise rows [x, v, v_next], one per sample.
MatrixXd feature_rows(const Dataset& dataset);

/// Regressor rows built on normalized z.
MatrixXd design_matrix(const Dataset& dataset, const Normalization& norm, int degree);

/// Weighted Huber regression of one rule by IRLS, one problem per output dimension.
RuleFit robust_fit_rule(const Dataset& dataset, std::span<const double> rule_weights,
                        const TrainConfig& config, const Normalization& norm);
RuleFit robust_fit_rule(const MatrixXd& design, const MatrixXd& targets,
                        std::span<const double> rule_weights, const TrainConfig& config, int n);

/// Normalization plus subtractive + FCM clustering on the joint (z, y) cloud.
RuleBase identify_rule_base(const Dataset& dataset, const TrainConfig& config);

/// Normalized type-reduced weights, one row per sample and one column per rule.
MatrixXd rule_weight_matrix(const IT2PFModel& skeleton, const MatrixXd& z_normalized_rows,
                            std::size_t* degenerate_count = nullptr);

/// Premises from `rule_base` with config.delta, then robust per-rule consequent fits.
TrainResult fit_consequents(const Dataset& dataset, const TrainConfig& config, const RuleBase& rule_base);

TrainResult train(const Dataset& dataset, const TrainConfig& config);

}  // namespace it2pf
