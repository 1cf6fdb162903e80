#include "it2pf/fuzzy_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <utility>

#include "it2pf/errors.hpp"

namespace it2pf {

namespace {

bool all_finite(const VectorXd& v) { return v.allFinite(); }

const MonomialBasis& cached_basis(int dims, int degree) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<MonomialBasis>> cache;
  auto& slot = cache[{dims, degree}];
  if (!slot) slot = std::make_unique<MonomialBasis>(dims, degree);
  return *slot;
}

}  // namespace

std::string_view channel_tag(Channel c) noexcept {
  switch (c) {
    case Channel::MotionTrajectory: return "h_mt";
    case Channel::GestureAction: return "h_ga";
    case Channel::Environment: return "e";
  }
  return "e";
}

Channel parse_channel(std::string_view tag) {
  if (tag == "h_mt") return Channel::MotionTrajectory;
  if (tag == "h_ga") return Channel::GestureAction;
  if (tag == "e") return Channel::Environment;
  fail(ErrorCategory::Format, "unknown channel tag '" + std::string(tag) + "'");
}

void Dataset::validate() const {
  require(dt > 0.0 && std::isfinite(dt), ErrorCategory::Parameter, "dataset dt must be > 0");
  require(n >= 1 && m >= 1, ErrorCategory::Shape, "dataset dimensions must be >= 1");
  require(!samples.empty(), ErrorCategory::EmptyInput, "dataset has no samples");
  require(trial_ids.size() == samples.size(), ErrorCategory::Shape,
          "dataset trial index length differs from sample count");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Sample& s = samples[k];
    require(s.x.size() == n && s.v.size() == n && s.v_next.size() == n && s.y.size() == m,
            ErrorCategory::Shape, "sample " + std::to_string(k) + " has inconsistent shape");
    require(all_finite(s.x) && all_finite(s.v) && all_finite(s.v_next) && all_finite(s.y),
            ErrorCategory::InputDomain, "sample " + std::to_string(k) + " has non-finite entries");
  }
}

std::vector<int> Dataset::trials() const {
  std::vector<int> out;
  std::set<int> seen;
  for (int id : trial_ids)
    if (seen.insert(id).second) out.push_back(id);
  return out;
}

Dataset Dataset::subset(std::span<const int> ids) const {
  const std::set<int> keep(ids.begin(), ids.end());
  Dataset out;
  out.channel = channel;
  out.dt = dt;
  out.n = n;
  out.m = m;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (keep.count(trial_ids[k])) {
      out.samples.push_back(samples[k]);
      out.trial_ids.push_back(trial_ids[k]);
    }
  }
  return out;
}

FeatureVector::FeatureVector(const VectorXd& x, const VectorXd& v, const VectorXd& v_next) {
  require(x.size() == v.size() && v.size() == v_next.size(), ErrorCategory::Shape,
          "feature vector: x, v, v_next must share a dimension");
  z_.resize(3 * x.size());
  z_ << x, v, v_next;
}

FeatureVector::FeatureVector(VectorXd z) : z_(std::move(z)) {}

IT2Gaussian::IT2Gaussian(double center, double sigma, double delta)
    : center_(center), sigma_(sigma), delta_(delta) {
  require(std::isfinite(center), ErrorCategory::Parameter, "membership center must be finite");
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCategory::Parameter,
          "membership sigma must be > 0");
  require(delta >= 0.0 && delta < 1.0, ErrorCategory::Parameter,
          "membership delta must lie in [0, 1)");
}

FiringInterval IT2Gaussian::eval(double t) const {
  require(std::isfinite(t), ErrorCategory::InputDomain, "membership input must be finite");
  const double d = t - center_;
  const double s_lo = sigma_ * (1.0 - delta_);
  const double s_hi = sigma_ * (1.0 + delta_);
  const double lo = std::exp(-(d * d) / (2.0 * s_lo * s_lo));
  const double hi = std::exp(-(d * d) / (2.0 * s_hi * s_hi));
  return {lo, hi};
}

FiringInterval eval_membership(const IT2Gaussian& set, double t) { return set.eval(t); }

FiringInterval firing_interval(const RulePremise& premise, const FeatureVector& z) {
  if (static_cast<Eigen::Index>(premise.sets.size()) != z.size())
    fail(ErrorCategory::Shape, "firing interval: premise has " + std::to_string(premise.sets.size()) +
                                   " sets but z has length " + std::to_string(z.size()));
  FiringInterval w{1.0, 1.0};
  for (std::size_t nu = 0; nu < premise.sets.size(); ++nu) {
    const FiringInterval mu = premise.sets[nu].eval(z[static_cast<Eigen::Index>(nu)]);
    w.lower *= mu.lower;
    w.upper *= mu.upper;
  }
  return w;
}

void TypeReductionConfig::validate() const {
  require(b_lower >= 0.0 && b_lower <= 1.0 && b_upper >= 0.0 && b_upper <= 1.0,
          ErrorCategory::Parameter, "type-reduction weights must lie in [0, 1]");
  require(std::abs(b_lower + b_upper - 1.0) <= 1e-12, ErrorCategory::Parameter,
          "type-reduction weights must sum to 1");
}

TypeReducedWeights type_reduce(std::span<const FiringInterval> intervals,
                               const TypeReductionConfig& cfg, double epsilon_floor) {
  require(!intervals.empty(), ErrorCategory::Structural, "type reduction needs at least one rule");
  TypeReducedWeights out;
  out.weights.resize(intervals.size());
  double total = 0.0;
  for (std::size_t l = 0; l < intervals.size(); ++l) {
    const double w = cfg.b_lower * intervals[l].lower + cfg.b_upper * intervals[l].upper;
    out.weights[l] = w;
    total += w;
  }
  if (!(total >= epsilon_floor)) {
    std::fill(out.weights.begin(), out.weights.end(), 1.0 / static_cast<double>(intervals.size()));
    out.degenerate = true;
    return out;
  }
  for (double& w : out.weights) w /= total;
  return out;
}

PolynomialConsequent PolynomialConsequent::zeros(int n, int m, int degree) {
  PolynomialConsequent c;
  c.degree = degree;
  c.n = n;
  c.m = m;
  const auto b = static_cast<Eigen::Index>(MonomialBasis::count(3 * n, degree));
  c.coeffs_M = MatrixXd::Zero(m * n, b);
  c.coeffs_C = MatrixXd::Zero(m * n, b);
  c.coeffs_K = MatrixXd::Zero(m * n, b);
  c.coeffs_f = MatrixXd::Zero(m, b);
  return c;
}

void PolynomialConsequent::validate() const {
  require(degree >= 0 && n >= 1 && m >= 1, ErrorCategory::Parameter,
          "consequent: invalid degree or dimensions");
  const auto b = static_cast<Eigen::Index>(MonomialBasis::count(3 * n, degree));
  const auto ok = [&](const MatrixXd& a, Eigen::Index rows) {
    return a.rows() == rows && a.cols() == b && a.allFinite();
  };
  require(ok(coeffs_M, m * n) && ok(coeffs_C, m * n) && ok(coeffs_K, m * n) && ok(coeffs_f, m),
          ErrorCategory::Shape, "consequent coefficient tensors have wrong shape or non-finite entries");
}

VectorXd eval_consequent(const PolynomialConsequent& cons, const VectorXd& phi, const VectorXd& x,
                         const VectorXd& v, const VectorXd& v_next, double dt) {
  require(dt > 0.0, ErrorCategory::Parameter, "consequent evaluation needs dt > 0");
  require(x.size() == cons.n && v.size() == cons.n && v_next.size() == cons.n, ErrorCategory::Shape,
          "consequent evaluation: state dimension mismatch");
  require(phi.size() == cons.basis_size(), ErrorCategory::Shape,
          "consequent evaluation: basis length mismatch");
  const VectorXd accel = (v_next - v) / dt;
  const VectorXd Mz = cons.coeffs_M * phi;
  const VectorXd Cz = cons.coeffs_C * phi;
  const VectorXd Kz = cons.coeffs_K * phi;
  VectorXd y = cons.coeffs_f * phi;
  for (int r = 0; r < cons.m; ++r) {
    for (int j = 0; j < cons.n; ++j) {
      const Eigen::Index e = r * cons.n + j;
      y[r] += Mz[e] * accel[j] + Cz[e] * v[j] + Kz[e] * x[j];
    }
  }
  return y;
}

VectorXd eval_consequent(const PolynomialConsequent& cons, const FeatureVector& z, const VectorXd& x,
                         const VectorXd& v, const VectorXd& v_next, double dt) {
  require(z.size() == 3 * cons.n, ErrorCategory::Shape, "consequent evaluation: z length must be 3n");
  const MonomialBasis& basis = cached_basis(3 * cons.n, cons.degree);
  VectorXd phi;
  basis.evaluate(z.values(), phi);
  return eval_consequent(cons, phi, x, v, v_next, dt);
}

VectorXd Normalization::apply(const VectorXd& z) const {
  require(z.size() == mean.size(), ErrorCategory::Shape, "normalization: length mismatch");
  return ((z - mean).array() / scale.array()).matrix();
}

Normalization Normalization::fit(const MatrixXd& rows) {
  require(rows.rows() >= 1, ErrorCategory::EmptyInput, "normalization needs at least one row");
  Normalization norm;
  norm.mean = rows.colwise().mean().transpose();
  norm.scale.resize(rows.cols());
  for (Eigen::Index d = 0; d < rows.cols(); ++d) {
    const double var = (rows.col(d).array() - norm.mean[d]).square().mean();
    const double sd = std::sqrt(var);
    norm.scale[d] = sd > 1e-12 * (1.0 + std::abs(norm.mean[d])) ? sd : 1.0;
  }
  return norm;
}

void IT2PFModel::validate() const {
  require(!rules.empty(), ErrorCategory::Structural, "model needs at least one rule");
  require(dt > 0.0, ErrorCategory::Parameter, "model dt must be > 0");
  require(n >= 1 && m >= 1, ErrorCategory::Shape, "model dimensions must be >= 1");
  require(epsilon_floor > 0.0, ErrorCategory::Parameter, "epsilon_floor must be > 0");
  require(norm.mean.size() == 3 * n && norm.scale.size() == 3 * n, ErrorCategory::Shape,
          "model normalization must have length 3n");
  require((norm.scale.array() > 0.0).all() && norm.mean.allFinite() && norm.scale.allFinite(),
          ErrorCategory::Parameter, "normalization scales must be finite and > 0");
  tr_config.validate();
  for (std::size_t l = 0; l < rules.size(); ++l) {
    const Rule& rule = rules[l];
    require(static_cast<int>(rule.premise.sets.size()) == 3 * n, ErrorCategory::Shape,
            "rule " + std::to_string(l) + ": premise must have 3n sets");
    require(rule.consequent.n == n && rule.consequent.m == m && rule.consequent.degree == degree,
            ErrorCategory::Shape, "rule " + std::to_string(l) + ": consequent shape mismatch");
    rule.consequent.validate();
  }
}

TypeReducedWeights IT2PFModel::weights(const FeatureVector& zn) const {
  std::vector<FiringInterval> intervals;
  intervals.reserve(rules.size());
  for (const Rule& rule : rules) intervals.push_back(firing_interval(rule.premise, zn));
  return type_reduce(intervals, tr_config, epsilon_floor);
}

Prediction IT2PFModel::predict(const VectorXd& x, const VectorXd& v, const VectorXd& v_next) const {
  if (x.size() != n || v.size() != n || v_next.size() != n)
    fail(ErrorCategory::Shape, "predict: expected state dimension " + std::to_string(n));
  require(all_finite(x) && all_finite(v) && all_finite(v_next), ErrorCategory::InputDomain,
          "predict: non-finite input");
  const FeatureVector zn(norm.apply(FeatureVector(x, v, v_next).values()));
  const TypeReducedWeights w = weights(zn);
  const MonomialBasis& basis = cached_basis(3 * n, degree);
  VectorXd phi;
  basis.evaluate(zn.values(), phi);
  Prediction out;
  out.y = VectorXd::Zero(m);
  out.degenerate = w.degenerate;
  for (std::size_t l = 0; l < rules.size(); ++l) {
    out.y += w.weights[l] * eval_consequent(rules[l].consequent, phi, x, v, v_next, dt);
  }
  return out;
}

}  // namespace it2pf
