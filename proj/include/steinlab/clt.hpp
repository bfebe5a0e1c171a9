#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "steinlab/kernels.hpp"
#include "steinlab/measures.hpp"

namespace steinlab {

/// Laws of the normalized sums U_n = n^{-1/2} sum X_i on the convolution
/// lattice of the base grid. Discrete convolution of the trapezoid mass
/// sequence (FFT powering), so discrete moments are preserved exactly.
struct ConvolutionLadder {
  GridDensity base;
  std::vector<int> ns;
  std::map<int, GridDensity> laws;
  double max_edge_mass = 0.0;  // aliasing diagnostic, mass at the lattice ends
};

ConvolutionLadder convolve_ladder(const GridDensity& base, const std::vector<int>& ns);
GridDensity normalized_sum_law(const GridDensity& base, int n);

/// Conditional-expectation kernel of the normalized sum:
/// tau_n(m) = n^{(1-k)/2} E[tau(X_1) | U_n = m], computed pointwise as the
/// ratio of lattice convolutions (tau p) * q_{n-1} over p * q_{n-1}; reported
/// only where the density of U_n exceeds 1e-12.
KernelField kernel_of_sums(const KernelField& tau_base, const GridDensity& base, int n);

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  int points = 0;
  bool defined = false;
};
SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

struct RateRow {
  int n = 0;
  std::optional<double> s1, s2, sk, w2, entropy_val, dzol2;
  std::optional<double> bound_s, bound_w2, bound_h, bound_zol;
  std::optional<bool> pass_s, pass_w2, pass_h, pass_zol, pass_zol_vs_s;
  bool row_pass() const;
};

struct RateReport {
  std::vector<RateRow> rows;
  std::map<std::string, SlopeFit> slopes;
  std::string notes;
  bool all_pass() const;
};

/// S_k(mu_n) vs n^{-k/2} S_k(mu) and the fitted log-log slope.
RateReport discrepancy_decay_sweep(const GridDensity& base, int k, const std::vector<int>& ns);
/// d_Zol,2(mu_n, gamma) vs sqrt(C_P^{k-1}(C_P-1) d) n^{-k/2} (decaying reading)
/// and vs S_k(mu_n).
RateReport zolotarev_rate_check(const GridDensity& base, int k, const std::vector<int>& ns,
                                double c_p);
/// W2(mu_n, gamma) vs (sqrt(d C_P (C_P-1))/n)(1 + log(n)/2 + log(C_P)/2),
/// plus the compensated ratio n W2 / (1 + log(n)/2).
RateReport w2_rate_check(const GridDensity& base, const std::vector<int>& ns, double c_p);
/// Ent(mu_n) vs (2 C_P sqrt(d)/n) I(mu)^{1/2} for smooth bases.
RateReport entropy_rate_check(const GridDensity& base, const std::vector<int>& ns, double c_p);

/// Everything applicable in one table (used by the CLI sweep command):
/// discrepancies for the requested orders, W2/Zolotarev/entropy columns with
/// bounds where their premises hold.
RateReport full_sweep(const GridDensity& base, const std::vector<int>& orders,
                      const std::vector<int>& ns);

}  // namespace steinlab
