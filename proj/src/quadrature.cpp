#include "steinlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace steinlab {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
// matrix, weights are mu_0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Vec& offdiag, double mu0) {
  const Index n = offdiag.size() + 1;
  Mat jacobi = Mat::Zero(n, n);
  for (Index j = 0; j + 1 < n; ++j) {
    jacobi(j, j + 1) = offdiag[j];
    jacobi(j + 1, j) = offdiag[j];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = mu0 * es.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
  static std::mutex mtx;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Vec off(n - 1);
  for (int j = 1; j < n; ++j) off[j - 1] = std::sqrt(static_cast<double>(j));
  QuadratureRule rule = golub_welsch(off, 1.0);
  cache[n] = rule;
  return rule;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  Vec off(n - 1);
  for (int j = 1; j < n; ++j) off[j - 1] = j / std::sqrt(4.0 * j * j - 1.0);
  QuadratureRule rule = golub_welsch(off, 2.0);
  // affine map [-1,1] -> [a,b]
  rule.nodes = (0.5 * (b - a) * rule.nodes.array() + 0.5 * (a + b)).matrix();
  rule.weights *= 0.5 * (b - a);
  return rule;
}

}  // namespace steinlab
