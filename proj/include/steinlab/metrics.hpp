#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "steinlab/flow.hpp"
#include "steinlab/measures.hpp"

namespace steinlab {

/// Relative entropy H(mu | gamma) = int log(dmu/dgamma) dmu, trapezoid with
/// 0 log 0 := 0.
double entropy(const GridDensity& mu);

/// Relative Fisher information I(mu | gamma) = int |d/dx log(dmu/dgamma)|^2 dmu,
/// 4th-order finite differences of log p. Throws on densities that do not
/// decay at the box edge or carry interior jumps.
double fisher(const GridDensity& mu);

/// Piecewise-linear CDF model of a 1-D grid density (exact trapezoid
/// antiderivative, normalized to F(x_end) = 1). All 1-D distances are
/// evaluated in closed form on this model.
struct PLCdf {
  Vec x;
  Vec F;
  double mean = 0.0;
};
PLCdf pl_cdf(const GridDensity& mu);

double wasserstein1_cdf(const PLCdf& a, const PLCdf& b);       // int |F - G| dx
double wasserstein1_quantile(const PLCdf& a, const PLCdf& b);  // int |Qa - Qb| du
double wasserstein2_pl(const PLCdf& a, const PLCdf& b);        // ( int (Qa-Qb)^2 du )^{1/2}

double wasserstein2_1d(const GridDensity& mu, const GridDensity& nu);
/// k=1: Kantorovich-Rubinstein int |F-G| dx. k=2: int | int_-inf^x (F-G) | dx,
/// valid when the means agree (checked to 1e-6).
double zolotarev_1d(const GridDensity& mu, const GridDensity& nu, int k);

struct PointCloud {
  Mat pts;  // n x d
  Vec w;    // weights summing to 1
};
PointCloud cloud_from_grid(const GridDensity& mu, int max_points = 1600);
PointCloud cloud_from_samples(const SampleMeasure& mu, int max_points = 1600);

struct W2Entropic {
  double value = 0.0;      // debiased W2 estimate
  double error_bar = 0.0;  // from the two finest regularization levels
  int iterations = 0;
};
/// Entropic-regularized OT with epsilon-scaling down to 1e-3 of the mean
/// cost, Sinkhorn-divergence debiasing.
W2Entropic wasserstein2_2d(const PointCloud& a, const PointCloud& b);

struct InequalityVerdict {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::string params;
};
InequalityVerdict make_verdict(const std::string& name, double lhs, double rhs,
                               const std::string& params, double tolerance = 1e-8);

struct FunctionalReport {
  std::optional<double> entropy;
  std::optional<double> fisher;
  std::optional<double> w1;
  std::optional<double> w2;
  std::map<int, double> zolotarev;  // order -> distance to gamma
  std::map<int, double> stein;      // order -> injected discrepancy value
  std::string tags;
};
FunctionalReport functional_report(const GridDensity& mu, const std::vector<int>& zol_orders);

/// Shared discretized standard Gaussian reference on [-8, 8].
const GridDensity& gaussian_reference();

/// H(mu) <= 1/2 min(I, k I^{(k-1)/k} S_k^{2/k}); without an admissible S_k
/// (moments of degree <= 2 unmatched) the Fisher branch alone is asserted.
InequalityVerdict verify_hsi(const GridDensity& mu, int k, std::optional<double> sk);

/// k=2: W2 <= max(S2 (1 - log(S2/S1)), S2); k>=3: W2 <= 2k S1^{1-1/(k-1)} Sk^{1/(k-1)}.
InequalityVerdict verify_transport(const GridDensity& mu, double s1, double sk, int k);

/// I(mu_t) <= e^{-2(k+1)t} (1-e^{-2t})^{-k} k! S_k^2 per time, plus the decay
/// of Fisher information along the flow between consecutive times.
std::vector<InequalityVerdict> verify_fisher_decay(const GridDensity& mu, int k, double sk,
                                                   const std::vector<double>& times);

/// |[H(mu) - H(mu_T)] - int_0^T I(mu_t) dt| / H(mu) < 1%.
InequalityVerdict verify_debruijn(const GridDensity& mu, double t_end);

/// W2(mu, gamma) <= int_0^inf I(mu_s)^{1/2} ds.
InequalityVerdict verify_ov(const GridDensity& mu);

}  // namespace steinlab
