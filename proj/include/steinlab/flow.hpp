#pragma once

#include <string>
#include <vector>

#include "steinlab/kernels.hpp"
#include "steinlab/measures.hpp"

namespace steinlab {

struct FlowState {
  double t = 0.0;
  GridDensity density;
  std::string base_id;
};

/// Law of e^{-t} X + sqrt(1-e^{-2t}) G for X ~ mu: the grid is contracted by
/// e^{-t} (exact pushforward) and the result convolved with the Gaussian
/// kernel by trapezoid quadrature on a fresh grid. d=1.
FlowState evolve_density(const GridDensity& mu, double t, const std::string& base_id = "");

/// Solution of Delta h - x . grad h = f - int f dgamma, tabulated with its
/// derivatives. Built from the time-integral representation of the
/// Ornstein-Uhlenbeck semigroup with the substitution t = sin^2(theta)
/// removing both endpoint singularities; Gauss-Legendre in theta,
/// Gauss-Hermite in the Gaussian average.
struct PoissonSolution {
  GridAxis grid;
  int order = 1;  // derivatives tabulated up to order+1
  Vec h;
  std::vector<Vec> deriv;  // deriv[j-1] = h^{(j)}, j = 1..order+1
  bool analytic = true;    // integral-representation derivatives (else finite differences)
  double f_mean = 0.0;     // int f dgamma
  double poisson_residual = 0.0;  // sup |h'' - x h' - (f - f_mean)| on the core grid
};

PoissonSolution barbour_solve(const TestFunction1D& f, int k, const GridAxis& grid);

struct RegularityReport {
  double sup_dh = 0.0;   // sup |h^{(k+1)}| over |x| <= core
  double sup_df = 0.0;   // sup |f^{(k)}| over |x| <= core
  double ratio = 0.0;
  bool defined = true;   // false for f == 0 (0/0)
  double poisson_residual = 0.0;
};

/// sup-norm comparison of D^{k+1} h_f against D^k f over the core box
/// |x| <= core. Polynomial f uses the analytic representation of the
/// derivatives, non-polynomial f uses 4th-order finite differences of the
/// tabulated h.
RegularityReport regularity_check(const TestFunction1D& f, int k, double core = 5.0);

/// Residual of int f dmu - int f dgamma = -int tau_k h_f^{(k+1)} dmu,
/// normalized by 1 + |lhs|.
double stein_chain_residual(const GridDensity& mu, const KernelField& tau,
                            const TestFunction1D& f);

/// (P_t f - f)/t evaluated coefficientwise minus the generator action
/// -|alpha| H_alpha; diagnostic for the semigroup (see apply_semigroup).
double generator_consistency(const HermiteExpansion& f, double t);

}  // namespace steinlab
