#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace it2pf {

/// Full monomial basis of total degree <= `degree` in `dims` variables.
///
/// Terms are ordered by degree, then lexicographically by nondecreasing variable
/// index: {1, z0, z1, ..., z0^2, z0 z1, ...}. Term j (j > 0) is term parent(j)
/// multiplied by z[var(j)].
class MonomialBasis {
 public:
  MonomialBasis(int dims, int degree);

  int dims() const noexcept { return dims_; }
  int degree() const noexcept { return degree_; }
  int size() const noexcept { return static_cast<int>(parent_.size()); }

  /// Writes all basis values at z into out (resized to size()).
  void evaluate(const Eigen::Ref<const Eigen::VectorXd>& z, Eigen::VectorXd& out) const;
  Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  /// Variable indices of term j, nondecreasing. Empty for the constant term.
  std::vector<int> term(int j) const;

  /// Number of terms, C(dims + degree, degree).
  static long long count(int dims, int degree);

 private:
  int dims_;
  int degree_;
  std::vector<int> parent_;
  std::vector<int> var_;
  std::vector<int> last_;
};

}  // namespace it2pf
