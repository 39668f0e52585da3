#include "shom/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <mutex>
#include <numbers>

namespace shom {

void QuadratureSpec::validate() const {
  if (!(half_range >= 6.0)) {
    throw DomainError("quadrature half_range must be >= 6, got " +
                      format_double(half_range));
  }
  if (!(rel_tol > 0.0)) {
    throw DomainError("quadrature rel_tol must be positive, got " +
                      format_double(rel_tol));
  }
  if (max_subdivisions < 1) {
    throw DomainError("quadrature max_subdivisions must be >= 1");
  }
  if (rule == QuadratureRule::gauss_hermite && hermite_nodes < 2) {
    throw DomainError("Gauss-Hermite rule needs at least 2 nodes");
  }
}

const HermiteRule& gauss_hermite_rule(int n) {
  static std::mutex mutex;
  static std::map<int, HermiteRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  // Jacobi matrix of the Hermite recurrence: off-diagonal sqrt(i / 2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(0.5 * i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mass = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mass * v0 * v0;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace shom
