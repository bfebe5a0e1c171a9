#pragma once

#include <vector>

#include "steinlab/kernels.hpp"
#include "steinlab/measures.hpp"

namespace steinlab {

struct IllConditioned : std::runtime_error {
  double condition;
  explicit IllConditioned(double c)
      : std::runtime_error("Galerkin system ill-conditioned, cond ~ " + std::to_string(c)),
        condition(c) {}
};

/// Discretization of the Euler-Lagrange equation of
/// J(f) = 1/2 int |D^{k+1} f|^2 dmu - int <tau_k, D^k f> dmu
/// over vector-valued Hermite polynomials of total degree k+1..N.
struct GalerkinSystem {
  Mat gram;     // A, symmetric PSD
  Vec load;     // b
  double ridge; // lambda added to the diagonal
  std::vector<std::pair<MultiIndex, int>> basis;  // (alpha, component)
  double condition;  // eigenvalue ratio of A + lambda I
};

struct NextKernelResult {
  KernelField kernel;      // order k+1, Hermite representation attached
  HermiteExpansion g;      // minimizer, tau = D^{k+1} g
  GalerkinSystem system;
  Vec coef;
  double solver_residual;  // ||(A + lambda I) c - b|| / max(||b||, eps)
  double asymmetry;        // worst component-slot asymmetry before symmetrization
};

/// Builds the order-(k+1) kernel from the order-k one by minimizing J over
/// the Hermite subspace; the returned field tabulates Sym(D^{k+1} g) on the
/// measure's grid.
NextKernelResult solve_next_kernel(const GridDensity& mu, const KernelField& tau_k,
                                   int max_degree, double ridge_scale = 1e-10);

/// Sample-measure variant: integrals become sample averages. tau_k must be
/// evaluable at the sample points (Hermite potential, or a d=1 grid field,
/// interpolated). The returned field is tabulated on eval_grid per axis.
NextKernelResult solve_next_kernel(const SampleMeasure& mu, const KernelField& tau_k,
                                   int max_degree, const GridAxis& eval_grid,
                                   double ridge_scale = 1e-8);

/// J(g) evaluated by quadrature on the measure's grid.
double functional_value(const HermiteExpansion& g, const GridDensity& mu,
                        const KernelField& tau_k);

struct ExistenceBound {
  double discrepancy_sq = 0.0;  // computed S_k^2 (constructed kernel)
  double bound = 0.0;           // C_P^{k-1} (C_P - 1) d
  double c_p = 0.0;
  bool pass = false;
  bool skipped = false;  // C_P < 1: bound is negative, check not meaningful
};

/// Evaluates S_k(mu)^2 <= C_P^{k-1}(C_P - 1) d with the iterative 1-D kernel
/// and the measured Poincare constant.
ExistenceBound existence_bound_check(const GridDensity& mu, int k);

}  // namespace steinlab
