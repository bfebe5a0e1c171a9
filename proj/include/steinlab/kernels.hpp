#pragma once

#include <functional>
#include <optional>
#include <string>

#include "steinlab/hermite_expansion.hpp"
#include "steinlab/measures.hpp"
#include "steinlab/sym_tensor.hpp"
#include "steinlab/types.hpp"

namespace steinlab {

/// Scalar test function with exact derivatives of any order, f(x) = deriv(x, 0).
struct TestFunction1D {
  std::string name;
  bool polynomial = false;
  std::function<double(double, int)> deriv;

  double operator()(double x) const { return deriv(x, 0); }
};

TestFunction1D monomial_test(int n);
/// a sin(omega x + phase); derivatives shift the phase by j pi/2.
TestFunction1D trig_test(double omega, double phase, double amplitude = 1.0);
TestFunction1D hermite_test(int m, double scale = 1.0);
TestFunction1D zero_test();

/// Tensor field x -> tau(x) of a Stein kernel of a given order. The kernel of
/// order k is a symmetric (k+1)-tensor field; in d=1 that is a scalar per
/// node. Values are tabulated on the measure's grid (row r = canonical entry
/// r of the symmetric index set, column = flattened node).
struct KernelField {
  enum class Provenance { iterative, variational, conditional, product, zero };

  int order = 1;
  int dim = 1;
  Provenance provenance = Provenance::iterative;
  std::array<GridAxis, 2> axes{};
  Mat values;                 // canonical entries x nodes
  int valid_lo = 0;           // flattened node range where the field is defined
  int valid_hi = -1;
  std::optional<HermiteExpansion> potential;  // set when tau = D^{order} g

  Index num_nodes() const { return values.cols(); }
  int tensor_order() const { return order + 1; }
  double scalar_at(Index node) const { return values(0, node); }
  SymTensor tensor_at(Index node) const;
  bool valid_at(Index node) const {
    return node >= valid_lo && node <= valid_hi;
  }

  static KernelField zero(const GridDensity& mu, int order);
};

/// Exact 1-D construction by iterated tail integration:
/// tau_1 = (1/p) int_x^inf y p dy - 1, tau_k = (1/p) int_x^inf tau_{k-1} p dy,
/// with cumulative trapezoid sums from the right edge. Requires moments of
/// degree <= order to match the Gaussian within tol.
KernelField kernel_1d_iterative(const GridDensity& mu, int order, double moment_tol = 1e-6);

/// Diagonal kernel of a product measure: entries (j,...,j) carry the factor
/// kernel in coordinate j, mixed entries vanish.
KernelField product_kernel(const KernelField& k0, const KernelField& k1);

/// sqrt( int ||tau||_2^2 dmu ), full-tensor norm; an upper bound on the
/// infimal discrepancy of this order.
double discrepancy(const KernelField& tau, const GridDensity& mu);
inline double discrepancy_squared(const KernelField& tau, const GridDensity& mu) {
  const double s = discrepancy(tau, mu);
  return s * s;
}

/// | int <tau, D^k f> dmu - int (x.f - Tr grad f) dmu | / (1 + |rhs|),
/// 1-D scalar test function read as the first vector component.
double stein_identity_residual(const KernelField& tau, const GridDensity& mu,
                               const TestFunction1D& f);
/// Same for a vector-valued Hermite expansion (any dimension).
double stein_identity_residual(const KernelField& tau, const GridDensity& mu,
                               const HermiteExpansion& f);

/// Relative residual of int <tau_k, D^k f> dmu vs int <tau_{k-1}, D^{k-1} f> dmu.
double iterative_consistency(const KernelField& tau_k, const KernelField& tau_km1,
                             const GridDensity& mu, const TestFunction1D& f);

/// Componentwise integral of the kernel against mu (max abs entry); near zero
/// when moments up to degree order+1 are matched.
double centering_defect(const KernelField& tau, const GridDensity& mu);

/// sup |tau(x) - reference(x)| over interior nodes where the density exceeds
/// rel_floor * max(p); the 1/p factor in the construction amplifies
/// quadrature error where mu carries no mass. d=1.
double kernel_sup_error(const KernelField& tau, const GridDensity& mu,
                        const std::function<double(double)>& reference,
                        double rel_floor = 1e-6);

}  // namespace steinlab
