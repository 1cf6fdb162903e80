#include "it2pf/baselines.hpp"

#include <Eigen/QR>

#include "it2pf/errors.hpp"

namespace it2pf {

VectorXd LKVModel::predict(const VectorXd& x, const VectorXd& v) const {
  require(x.size() == K.cols() && v.size() == C.cols(), ErrorCategory::Shape,
          "LKV predict: state dimension mismatch");
  return K * x + C * v;
}

VectorXd predict_lkv(const LKVModel& model, const VectorXd& x, const VectorXd& v) {
  return model.predict(x, v);
}

LKVModel fit_lkv(const Dataset& dataset) {
  dataset.validate();
  const int n = dataset.n;
  const auto rows = static_cast<Eigen::Index>(dataset.size());
  require(rows >= 2 * n, ErrorCategory::Training, "LKV fit needs at least 2n samples");
  MatrixXd a(rows, 2 * n);
  MatrixXd y(rows, dataset.m);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const Sample& s = dataset.samples[static_cast<std::size_t>(k)];
    a.row(k).head(n) = s.x.transpose();
    a.row(k).tail(n) = s.v.transpose();
    y.row(k) = s.y.transpose();
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(a);
  const MatrixXd theta = cod.solve(y);  // (2n x m)
  LKVModel model;
  model.K = theta.topRows(n).transpose();
  model.C = theta.bottomRows(n).transpose();
  model.rank_deficient = cod.rank() < 2 * n;
  return model;
}

TrainConfig tsfmb_config(TrainConfig config) {
  config.degree = 0;
  config.delta = 0.0;
  return config;
}

TrainConfig pfmb_config(TrainConfig config) {
  config.delta = 0.0;
  return config;
}

TrainResult fit_tsfmb(const Dataset& dataset, const TrainConfig& config) {
  return train(dataset, tsfmb_config(config));
}

TrainResult fit_tsfmb(const Dataset& dataset, const TrainConfig& config, const RuleBase& rule_base) {
  return fit_consequents(dataset, tsfmb_config(config), rule_base);
}

TrainResult fit_pfmb(const Dataset& dataset, const TrainConfig& config) {
  return train(dataset, pfmb_config(config));
}

TrainResult fit_pfmb(const Dataset& dataset, const TrainConfig& config, const RuleBase& rule_base) {
  return fit_consequents(dataset, pfmb_config(config), rule_base);
}

}  // namespace it2pf
