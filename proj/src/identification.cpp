#include "it2pf/identification.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "it2pf/errors.hpp"

namespace it2pf {

namespace {

constexpr double kLltRcondMin = 1e-10;
constexpr double kEigenRelFloor = 1e-12;
constexpr double kMadToSigma = 0.6744897501960817;

struct WlsSolution {
  VectorXd theta;
  double rcond = 1.0;
  bool rank_deficient = false;
};

// Weighted least squares on the active columns, with column equilibration.
// Falls back to the minimum-norm (equilibrated) solution when the Gram matrix
// is singular or ill-conditioned, or when `force_min_norm` is set.
WlsSolution solve_wls(const MatrixXd& phi, const VectorXd& y, const VectorXd& u,
                      const std::vector<Eigen::Index>& active, bool force_min_norm) {
  const Eigen::Index nrows = phi.rows();
  const auto p = static_cast<Eigen::Index>(active.size());
  const VectorXd su = u.array().sqrt().matrix();

  MatrixXd xw(nrows, p);
  VectorXd scale(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    xw.col(c) = su.cwiseProduct(phi.col(active[static_cast<std::size_t>(c)]));
    scale[c] = xw.col(c).norm();
    if (scale[c] > 0.0) xw.col(c) /= scale[c];
  }
  const VectorXd yw = su.cwiseProduct(y);
  MatrixXd gram = MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xw.transpose());
  gram.triangularView<Eigen::Upper>() = gram.transpose();
  const VectorXd rhs = xw.transpose() * yw;

  WlsSolution sol;
  VectorXd scaled;
  bool solved = false;
  if (!force_min_norm) {
    Eigen::LLT<MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
      sol.rcond = llt.rcond();
      if (sol.rcond >= kLltRcondMin) {
        scaled = llt.solve(rhs);
        solved = true;
      }
    } else {
      sol.rcond = 0.0;
    }
  }
  if (!solved) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    const VectorXd& lambda = eig.eigenvalues();
    const double lmax = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
    const double cutoff = kEigenRelFloor * lmax;
    VectorXd proj = eig.eigenvectors().transpose() * rhs;
    for (Eigen::Index k = 0; k < proj.size(); ++k) {
      if (lambda[k] > cutoff)
        proj[k] /= lambda[k];
      else
        proj[k] = 0.0;
    }
    scaled = eig.eigenvectors() * proj;
    if (lmax > 0.0) sol.rcond = std::min(sol.rcond, std::max(lambda.minCoeff(), 0.0) / lmax);
    sol.rank_deficient = true;
  }
  sol.theta = VectorXd::Zero(phi.cols());
  for (Eigen::Index c = 0; c < p; ++c)
    if (scale[c] > 0.0) sol.theta[active[static_cast<std::size_t>(c)]] = scaled[c] / scale[c];
  return sol;
}

double weighted_median(const VectorXd& values, const VectorXd& w) {
  std::vector<std::pair<double, double>> items;
  items.reserve(static_cast<std::size_t>(values.size()));
  double total = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (w[k] > 0.0) {
      items.emplace_back(values[k], w[k]);
      total += w[k];
    }
  }
  if (items.empty()) return 0.0;
  std::sort(items.begin(), items.end());
  double acc = 0.0;
  for (const auto& [value, weight] : items) {
    acc += weight;
    if (acc >= 0.5 * total) return value;
  }
  return items.back().first;
}

double huber_rho(double t, double k) {
  const double a = std::abs(t);
  return a <= k ? 0.5 * t * t : k * (a - 0.5 * k);
}

double huber_objective(const VectorXd& residual, const VectorXd& w, double scale, double k) {
  double j = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i)
    if (w[i] > 0.0) j += w[i] * huber_rho(residual[i] / scale, k);
  return j;
}

}  // namespace

void TrainConfig::validate() const {
  require(degree >= 0, ErrorCategory::Parameter, "train: degree must be >= 0");
  require(delta >= 0.0 && delta < 1.0, ErrorCategory::Parameter, "train: delta must lie in [0, 1)");
  require(huber_k > 0.0, ErrorCategory::Parameter, "train: huber_k must be > 0");
  require(irls_max_iter >= 1, ErrorCategory::Parameter, "train: irls_max_iter must be >= 1");
  require(irls_tol > 0.0, ErrorCategory::Parameter, "train: irls_tol must be > 0");
  require(epsilon_floor > 0.0, ErrorCategory::Parameter, "train: epsilon_floor must be > 0");
  require(rule_count >= 0, ErrorCategory::Parameter, "train: rule_count must be >= 0");
  require(std::isfinite(support_ratio) && support_ratio >= 0.0, ErrorCategory::Parameter,
          "train: support_ratio must be >= 0");
  subtractive.validate();
  fcm.validate();
  tr_config.validate();
}

VectorXd assemble_regressor(const FeatureVector& z, const VectorXd& x, const VectorXd& v,
                            const VectorXd& v_next, double dt, int degree) {
  require(dt > 0.0, ErrorCategory::Parameter, "regressor needs dt > 0");
  const auto n = x.size();
  require(v.size() == n && v_next.size() == n && z.size() == 3 * n, ErrorCategory::Shape,
          "regressor: inconsistent dimensions");
  const MonomialBasis basis(static_cast<int>(3 * n), degree);
  const VectorXd phi = basis.evaluate(z.values());
  const Eigen::Index b = phi.size();
  VectorXd row(( 3 * n + 1) * b);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double accel = (v_next[j] - v[j]) / dt;
    row.segment(j * b, b) = phi * accel;
    row.segment((n + j) * b, b) = phi * v[j];
    row.segment((2 * n + j) * b, b) = phi * x[j];
  }
  row.segment(3 * n * b, b) = phi;
  return row;
}

VectorXd consequent_coefficients(const PolynomialConsequent& cons, int r) {
  const Eigen::Index b = cons.basis_size();
  const Eigen::Index n = cons.n;
  VectorXd theta((3 * n + 1) * b);
  for (Eigen::Index j = 0; j < n; ++j) {
    theta.segment(j * b, b) = cons.coeffs_M.row(r * n + j).transpose();
    theta.segment((n + j) * b, b) = cons.coeffs_C.row(r * n + j).transpose();
    theta.segment((2 * n + j) * b, b) = cons.coeffs_K.row(r * n + j).transpose();
  }
  theta.segment(3 * n * b, b) = cons.coeffs_f.row(r).transpose();
  return theta;
}

PolynomialConsequent consequent_from_coefficients(const std::vector<VectorXd>& thetas, int n, int degree) {
  const int m = static_cast<int>(thetas.size());
  PolynomialConsequent cons = PolynomialConsequent::zeros(n, m, degree);
  const Eigen::Index b = cons.basis_size();
  for (int r = 0; r < m; ++r) {
    const VectorXd& theta = thetas[static_cast<std::size_t>(r)];
    require(theta.size() == (3 * n + 1) * b, ErrorCategory::Shape, "coefficient vector has wrong length");
    for (Eigen::Index j = 0; j < n; ++j) {
      cons.coeffs_M.row(r * n + j) = theta.segment(j * b, b).transpose();
      cons.coeffs_C.row(r * n + j) = theta.segment((n + j) * b, b).transpose();
      cons.coeffs_K.row(r * n + j) = theta.segment((2 * n + j) * b, b).transpose();
    }
    cons.coeffs_f.row(r) = theta.segment(3 * n * b, b).transpose();
  }
  return cons;
}

MatrixXd feature_rows(const Dataset& dataset) {
  const auto n = dataset.n;
  MatrixXd z(static_cast<Eigen::Index>(dataset.size()), 3 * n);
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    const Sample& s = dataset.samples[k];
    const auto row = static_cast<Eigen::Index>(k);
    z.row(row).segment(0, n) = s.x.transpose();
    z.row(row).segment(n, n) = s.v.transpose();
    z.row(row).segment(2 * n, n) = s.v_next.transpose();
  }
  return z;
}

MatrixXd design_matrix(const Dataset& dataset, const Normalization& norm, int degree) {
  const int n = dataset.n;
  const MonomialBasis basis(3 * n, degree);
  const Eigen::Index b = basis.size();
  MatrixXd phi_rows(static_cast<Eigen::Index>(dataset.size()), (3 * n + 1) * b);
  VectorXd phi;
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    const Sample& s = dataset.samples[k];
    const VectorXd zn = norm.apply(FeatureVector(s.x, s.v, s.v_next).values());
    basis.evaluate(zn, phi);
    auto row = phi_rows.row(static_cast<Eigen::Index>(k));
    for (int j = 0; j < n; ++j) {
      const double accel = (s.v_next[j] - s.v[j]) / dataset.dt;
      row.segment(j * b, b) = (phi * accel).transpose();
      row.segment((n + j) * b, b) = (phi * s.v[j]).transpose();
      row.segment((2 * n + j) * b, b) = (phi * s.x[j]).transpose();
    }
    row.segment(3 * n * b, b) = phi.transpose();
  }
  return phi_rows;
}

RuleFit robust_fit_rule(const MatrixXd& design, const MatrixXd& targets,
                        std::span<const double> rule_weights, const TrainConfig& config, int n) {
  require(static_cast<Eigen::Index>(rule_weights.size()) == design.rows() &&
              targets.rows() == design.rows(),
          ErrorCategory::Shape, "robust fit: weight/target/design row counts differ");
  const Eigen::Index nrows = design.rows();
  const VectorXd w = Eigen::Map<const VectorXd>(rule_weights.data(), nrows);
  const double total = w.sum();
  require(total > 0.0, ErrorCategory::Training, "robust fit: rule weights sum to zero");

  std::vector<Eigen::Index> active;
  for (Eigen::Index c = 0; c < design.cols(); ++c) {
    double ss = 0.0;
    for (Eigen::Index k = 0; k < nrows; ++k)
      if (w[k] > 0.0) ss += design(k, c) * design(k, c);
    if (ss > 0.0) active.push_back(c);
  }
  const Eigen::Index b = design.cols() / (3 * n + 1);
  int degree = 0;
  while (MonomialBasis::count(3 * n, degree) < b) ++degree;

  RuleFit out;
  RuleFitReport& rep = out.report;
  rep.effective_weight = total;
  // Sparsely fired rules drop the highest polynomial degrees until the weight covers the coefficients.
  rep.fitted_degree = degree;
    while (rep.fitted_degree > 0 && total < config.support_ratio * static_cast<double>(active.size())) {
    --rep.fitted_degree;
    const auto keep = static_cast<Eigen::Index>(MonomialBasis::count(3 * n, rep.fitted_degree));
    std::erase_if(active, [b, keep](Eigen::Index c) { return c % b >= keep; });
  }
  const auto coeffs = static_cast<double>(active.size());
  rep.active_coefficients = static_cast<int>(active.size());
  const auto supported = (w.array() > 0.0).count();
  if (static_cast<double>(supported) < coeffs) {
    fail(ErrorCategory::Training, "insufficient effective samples: " + std::to_string(supported) +
                                      " weighted samples < " + std::to_string(active.size()) + " coefficients");
  }
  rep.low_support = total < 2.0 * coeffs;

  std::vector<VectorXd> thetas;
  for (Eigen::Index r = 0; r < targets.cols(); ++r) {
    const VectorXd y = targets.col(r);
    WlsSolution sol = solve_wls(design, y, w, active, rep.low_support);
    rep.rcond = std::min(rep.rcond, sol.rcond);
    rep.rank_deficient = rep.rank_deficient || sol.rank_deficient;
    VectorXd theta = sol.theta;
    VectorXd residual = y - design * theta;

    const double y_rms = std::sqrt((w.array() * y.array().square()).sum() / total);
    double scale = weighted_median(residual.cwiseAbs(), w) / kMadToSigma;
    scale = std::max(scale, 1e-12 * std::max(y_rms, 1e-300));

    std::vector<double> history{huber_objective(residual, w, scale, config.huber_k)};
    VectorXd u = w;
    int iterations = 0;
    for (int it = 0; it < config.irls_max_iter; ++it) {
      for (Eigen::Index k = 0; k < nrows; ++k) {
        const double t = std::abs(residual[k]) / scale;
        u[k] = t <= config.huber_k ? w[k] : w[k] * config.huber_k / t;
      }
      sol = solve_wls(design, y, u, active, rep.low_support);
      rep.rcond = std::min(rep.rcond, sol.rcond);
      rep.rank_deficient = rep.rank_deficient || sol.rank_deficient;
      const double change = (sol.theta - theta).lpNorm<Eigen::Infinity>();
      theta = std::move(sol.theta);
      residual = y - design * theta;
      history.push_back(huber_objective(residual, w, scale, config.huber_k));
      iterations = it + 1;
      if (change <= config.irls_tol * std::max(1.0, theta.lpNorm<Eigen::Infinity>())) break;
    }
    rep.iterations = std::max(rep.iterations, iterations);
    rep.residual_norms.push_back(std::sqrt((w.array() * residual.array().square()).sum() / total));
    rep.mean_robust_weight.push_back(u.sum() / total);
    rep.objective_history.push_back(std::move(history));
    thetas.push_back(std::move(theta));
  }

  out.consequent = consequent_from_coefficients(thetas, n, degree);
  return out;
}

RuleFit robust_fit_rule(const Dataset& dataset, std::span<const double> rule_weights,
                        const TrainConfig& config, const Normalization& norm) {
  dataset.validate();
  require(rule_weights.size() == dataset.size(), ErrorCategory::Shape,
          "robust fit: one weight per sample required");
  const MatrixXd design = design_matrix(dataset, norm, config.degree);
  MatrixXd targets(static_cast<Eigen::Index>(dataset.size()), dataset.m);
  for (std::size_t k = 0; k < dataset.size(); ++k)
    targets.row(static_cast<Eigen::Index>(k)) = dataset.samples[k].y.transpose();
  return robust_fit_rule(design, targets, rule_weights, config, dataset.n);
}

RuleBase identify_rule_base(const Dataset& dataset, const TrainConfig& config) {
  dataset.validate();
  config.validate();
  RuleBase base;
  const MatrixXd z = feature_rows(dataset);
  base.norm = Normalization::fit(z);

  const Eigen::Index nrows = z.rows();
  MatrixXd y(nrows, dataset.m);
  for (std::size_t k = 0; k < dataset.size(); ++k)
    y.row(static_cast<Eigen::Index>(k)) = dataset.samples[k].y.transpose();
  const Normalization ynorm = Normalization::fit(y);

  MatrixXd joint(nrows, z.cols() + y.cols());
  for (Eigen::Index k = 0; k < nrows; ++k) {
    joint.row(k).head(z.cols()) = base.norm.apply(z.row(k).transpose()).transpose();
    joint.row(k).tail(y.cols()) = ynorm.apply(y.row(k).transpose()).transpose();
  }

  const MatrixXd cube = to_unit_hypercube(joint);
  const std::vector<std::size_t> idx =
      config.rule_count > 0
          ? subtractive_top(cube, config.subtractive, static_cast<std::size_t>(config.rule_count))
          : subtractive_cluster(cube, config.subtractive);
  MatrixXd init(static_cast<Eigen::Index>(idx.size()), joint.cols());
  for (std::size_t l = 0; l < idx.size(); ++l)
    init.row(static_cast<Eigen::Index>(l)) = joint.row(static_cast<Eigen::Index>(idx[l]));
  base.clusters = fcm_refine(joint, static_cast<int>(idx.size()), init, config.fcm);
  return base;
}

MatrixXd rule_weight_matrix(const IT2PFModel& skeleton, const MatrixXd& zn_rows,
                            std::size_t* degenerate_count) {
  MatrixXd weights(zn_rows.rows(), static_cast<Eigen::Index>(skeleton.rules.size()));
  std::size_t degenerate = 0;
  for (Eigen::Index k = 0; k < zn_rows.rows(); ++k) {
    const TypeReducedWeights w = skeleton.weights(FeatureVector(VectorXd(zn_rows.row(k).transpose())));
    if (w.degenerate) ++degenerate;
    for (std::size_t l = 0; l < w.weights.size(); ++l)
      weights(k, static_cast<Eigen::Index>(l)) = w.weights[l];
  }
  if (degenerate_count) *degenerate_count = degenerate;
  return weights;
}

TrainResult fit_consequents(const Dataset& dataset, const TrainConfig& config, const RuleBase& rule_base) {
  dataset.validate();
  config.validate();
  const int n = dataset.n;
  TrainResult result;
  IT2PFModel& model = result.model;
  model.channel = dataset.channel;
  model.dt = dataset.dt;
  model.n = n;
  model.m = dataset.m;
  model.degree = config.degree;
  model.delta = config.delta;
  model.norm = rule_base.norm;
  model.tr_config = config.tr_config;
  model.epsilon_floor = config.epsilon_floor;
  for (RulePremise& premise : build_premises(rule_base.clusters, 3 * n, config.delta))
    model.rules.push_back(Rule{std::move(premise), PolynomialConsequent::zeros(n, dataset.m, config.degree)});

  const MatrixXd z = feature_rows(dataset);
  MatrixXd zn(z.rows(), z.cols());
  for (Eigen::Index k = 0; k < z.rows(); ++k) zn.row(k) = model.norm.apply(z.row(k).transpose()).transpose();
  const MatrixXd weights = rule_weight_matrix(model, zn, &result.report.degenerate_samples);

  const MatrixXd design = design_matrix(dataset, model.norm, config.degree);
  MatrixXd targets(z.rows(), dataset.m);
  for (std::size_t k = 0; k < dataset.size(); ++k)
    targets.row(static_cast<Eigen::Index>(k)) = dataset.samples[k].y.transpose();

  for (std::size_t l = 0; l < model.rules.size(); ++l) {
    const VectorXd wl = weights.col(static_cast<Eigen::Index>(l));
    try {
      RuleFit fit = robust_fit_rule(design, targets, std::span<const double>(wl.data(), wl.size()), config, n);
      fit.report.rule = static_cast<int>(l);
      model.rules[l].consequent = std::move(fit.consequent);
      result.report.rules.push_back(std::move(fit.report));
    } catch (const Error& e) {
      throw Error(e.category(), "rule " + std::to_string(l) + ": " + e.what());
    }
  }

  double se = 0.0;
  double ae = 0.0;
  for (const Sample& s : dataset.samples) {
    const double e = (model.predict(s).y - s.y).norm();
    se += e * e;
    ae += e;
  }
  result.report.train_rmse = std::sqrt(se / static_cast<double>(dataset.size()));
  result.report.train_mae = ae / static_cast<double>(dataset.size());
  return result;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  RuleBase base;
  try {
    base = identify_rule_base(dataset, config);
  } catch (const Error& e) {
    throw Error(e.category(), std::string("clustering: ") + e.what());
  }
  return fit_consequents(dataset, config, base);
}

}  // namespace it2pf
