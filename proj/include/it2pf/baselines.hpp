#pragma once

#include "it2pf/fuzzy_core.hpp"
#include "it2pf/identification.hpp"

namespace it2pf {

/// Linear Kelvin-Voigt contact model y = K x + C v.
struct LKVModel {
  MatrixXd K;
  MatrixXd C;
  bool rank_deficient = false;

  VectorXd predict(const VectorXd& x, const VectorXd& v) const;
};

/// Global unweighted least squares of y on [x, v]; minimum-norm when rank deficient.
LKVModel fit_lkv(const Dataset& dataset);
VectorXd predict_lkv(const LKVModel& model, const VectorXd& x, const VectorXd& v);

/// Takagi-Sugeno model: degree-0 consequents, type-1 sets.
TrainResult fit_tsfmb(const Dataset& dataset, const TrainConfig& config);
TrainResult fit_tsfmb(const Dataset& dataset, const TrainConfig& config, const RuleBase& rule_base);
/// Polynomial fuzzy model: config.degree consequents, type-1 sets.
TrainResult fit_pfmb(const Dataset& dataset, const TrainConfig& config);
TrainResult fit_pfmb(const Dataset& dataset, const TrainConfig& config, const RuleBase& rule_base);

TrainConfig tsfmb_config(TrainConfig config);
TrainConfig pfmb_config(TrainConfig config);

}  // namespace it2pf
