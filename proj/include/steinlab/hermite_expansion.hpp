#pragma once

#include <vector>

#include "steinlab/hermite.hpp"
#include "steinlab/multi_index.hpp"
#include "steinlab/sym_tensor.hpp"
#include "steinlab/types.hpp"

namespace steinlab {

/// Vector-valued polynomial in the multidimensional Hermite basis:
/// f_c(x) = sum_alpha coef(alpha, c) H_alpha(x), |alpha| <= max_degree.
/// Differentiation is closed: d_j H_alpha = alpha_j H_{alpha - e_j}.
struct HermiteExpansion {
  int dim = 1;
  int components = 1;
  int max_degree = 0;
  std::vector<MultiIndex> alphas;  // graded-lex, degree <= max_degree
  Mat coef;                        // alphas.size() x components

  static HermiteExpansion zero(int dim, int components, int max_degree);

  int basis_size() const { return static_cast<int>(alphas.size()); }
  int position(const MultiIndex& alpha) const;  // -1 if not in basis
  double coef_at(const MultiIndex& alpha, int comp) const;
  void set_coef(const MultiIndex& alpha, int comp, double v);

  /// Component values at x.
  Vec eval(const Vec& x) const;
  double eval_scalar(double x) const;  // dim == components == 1

  /// partial^beta of component comp at x.
  double deriv(const MultiIndex& beta, int comp, const Vec& x) const;
  double deriv_scalar(double x, int j) const;  // 1-D j-th derivative
};

/// Full inner product <tau, D^k f>(x) of a symmetric (k+1)-tensor with the
/// k-th derivative tensor of the vector-valued f (component in the last slot).
double inner_with_derivative(const SymTensor& tau, const HermiteExpansion& f, int k, const Vec& x);

/// |D^k f|^2(x), full tensor norm over the k derivative slots and the
/// component slot.
double derivative_norm2(const HermiteExpansion& f, int k, const Vec& x);

/// x . f(x) - Tr(grad f)(x), the Gaussian integration-by-parts functional.
double stein_rhs_integrand(const HermiteExpansion& f, const Vec& x);

/// D^order f as a symmetric (order+1)-tensor, averaging the component slot
/// into the derivative slots. Exactly symmetric output; for gradient-type f
/// the averaging is a no-op.
SymTensor derivative_tensor_symmetrized(const HermiteExpansion& f, int order, const Vec& x,
                                        double* max_asymmetry = nullptr);

/// Ornstein-Uhlenbeck semigroup on expansions: Hermite coefficients of
/// degree m are scaled by exp(-m t).
HermiteExpansion apply_semigroup(const HermiteExpansion& f, double t);

/// x^n as a 1-D Hermite expansion (via the recurrence t He_m = He_{m+1} + m He_{m-1}).
HermiteExpansion monomial_1d(int n);
/// Single basis polynomial He_m, scaled.
HermiteExpansion hermite_1d(int m, double scale = 1.0);

}  // namespace steinlab
