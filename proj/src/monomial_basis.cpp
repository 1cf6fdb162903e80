#include "it2pf/monomial_basis.hpp"

#include "it2pf/errors.hpp"

namespace it2pf {

MonomialBasis::MonomialBasis(int dims, int degree) : dims_(dims), degree_(degree) {
  require(dims >= 1, ErrorCategory::Parameter, "monomial basis needs at least one variable");
  require(degree >= 0, ErrorCategory::Parameter, "polynomial degree must be >= 0");
  parent_.push_back(-1);
  var_.push_back(-1);
  last_.push_back(0);
  std::size_t begin = 0;
  for (int k = 1; k <= degree; ++k) {
    const std::size_t end = parent_.size();
    for (std::size_t t = begin; t < end; ++t) {
      for (int j = last_[t]; j < dims; ++j) {
        parent_.push_back(static_cast<int>(t));
        var_.push_back(j);
        last_.push_back(j);
      }
    }
    begin = end;
  }
}

void MonomialBasis::evaluate(const Eigen::Ref<const Eigen::VectorXd>& z,
                             Eigen::VectorXd& out) const {
  require(z.size() == dims_, ErrorCategory::Shape, "monomial basis: feature length mismatch");
  out.resize(size());
  out[0] = 1.0;
  for (int j = 1; j < size(); ++j) out[j] = out[parent_[j]] * z[var_[j]];
}

Eigen::VectorXd MonomialBasis::evaluate(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  Eigen::VectorXd out;
  evaluate(z, out);
  return out;
}

std::vector<int> MonomialBasis::term(int j) const {
  std::vector<int> vars;
  for (int t = j; t > 0; t = parent_[t]) vars.insert(vars.begin(), var_[t]);
  return vars;
}

long long MonomialBasis::count(int dims, int degree) {
  // C(dims + degree, degree), computed incrementally to stay exact.
  long long c = 1;
  for (int k = 1; k <= degree; ++k) c = c * (dims + k) / k;
  return c;
}

}  // namespace it2pf
