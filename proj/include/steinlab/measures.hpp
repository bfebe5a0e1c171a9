#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinlab/multi_index.hpp"
#include "steinlab/types.hpp"

namespace steinlab {

struct MomentMismatch : std::runtime_error {
  int degree;
  double residual;
  MomentMismatch(int degree_, double residual_)
      : std::runtime_error("moment of degree " + std::to_string(degree_) +
                           " deviates from Gaussian by " + std::to_string(residual_)),
        degree(degree_),
        residual(residual_) {}
};

struct DensityZero : std::runtime_error {
  double location;
  explicit DensityZero(double x)
      : std::runtime_error("density vanishes at interior node x=" + std::to_string(x)),
        location(x) {}
};

struct NoSolution : std::runtime_error {
  double residual;
  explicit NoSolution(double r)
      : std::runtime_error("no moment-matching solution in parameter box, residual " +
                           std::to_string(r)),
        residual(r) {}
};

/// Uniform 1-D grid [lo, hi] with n nodes.
struct GridAxis {
  double lo = -8.0;
  double hi = 8.0;
  int n = 4096;

  double h() const { return (hi - lo) / (n - 1); }
  double node(int i) const { return lo + i * h(); }
  Vec nodes() const;
  Vec trapezoid_weights() const;
};

/// Probability density tabulated on a tensor grid, d in {1, 2}. For d=2 the
/// values are stored row-major with axis 0 slowest. All integrals use the
/// trapezoid rule; densities with jumps must place them on nodes and carry
/// the mean of the one-sided limits there.
struct GridDensity {
  int dim = 1;
  std::array<GridAxis, 2> axis{};
  Vec p;

  const GridAxis& ax() const { return axis[0]; }
  Index size() const { return p.size(); }

  double mass() const;
  /// Trapezoid integral of node values f against this density: sum w p f.
  double integrate(const Vec& f_nodes) const;
  /// d=1 raw moment E[x^k].
  double moment1d(int k) const;
  double mean() const { return moment1d(1); }
  double variance() const;

  /// d=1 pointwise evaluation by cubic (Catmull-Rom) interpolation; zero
  /// outside the grid box.
  double eval(double x) const;

  GridDensity& normalize();
};

GridDensity standard_gaussian(int dim, const GridAxis& axis);
/// Centered N(0, sigma^2) on the axis, renormalized.
GridDensity gaussian_1d(double sigma, const GridAxis& axis);
/// Uniform on [-half_width, half_width]; the grid box is the support.
GridDensity uniform_1d(double half_width, int n_nodes = 4096);
/// Uniform convolved with N(0, sigma^2), rescaled to unit variance
/// (half_width = sqrt(3(1-sigma^2))); closed-form density via the Gaussian cdf.
GridDensity smoothed_uniform_1d(double sigma, int n_nodes = 4096);
/// 1/2 (uniform(+-a) * N(0, smoothing^2)) + 1/2 N(0, s^2). smoothing == 0
/// aligns +-a with grid nodes and stores the mean value at the jumps.
GridDensity mixture_uniform_gauss(double a, double s, double smoothing, int n_nodes = 4096);
/// Gaussian location-scale mixture sum_i w_i N(m_i, s_i^2).
GridDensity gaussian_mixture_1d(const Vec& weights, const Vec& means, const Vec& sigmas,
                                const GridAxis& axis);
/// Product measure p1 (x) p2 on the tensor grid of the factor axes.
GridDensity product_density(const GridDensity& f1, const GridDensity& f2);

struct SampleMeasure {
  int dim = 1;
  Mat points;  // n x dim
  std::uint64_t seed = 0;

  /// iid standard Gaussian draws, Box-Muller over mt19937_64 (reproducible
  /// across standard libraries).
  static SampleMeasure gaussian(int dim, Index n, std::uint64_t seed);
};

struct MomentRow {
  MultiIndex alpha;
  double mu_moment;
  double gamma_moment;
  double diff;
};

struct MomentReport {
  std::vector<MomentRow> rows;  // graded-lex order, degree >= 1

  double max_abs_diff(int max_degree) const;
  const MomentRow* find(const MultiIndex& alpha) const;
  std::string summary(int max_degree) const;
};

MomentReport moments(const GridDensity& mu, int max_degree);
MomentReport moments(const SampleMeasure& mu, int max_degree);

/// Throws MomentMismatch if any mu-moment of degree <= max_degree differs
/// from the Gaussian one by more than tol.
void require_moments_match(const GridDensity& mu, int max_degree, double tol);

struct PoincareEstimate {
  double constant = 0.0;  // C_P = 1 / lambda1
  double lambda1 = 0.0;   // smallest nonzero Neumann eigenvalue
  int grid_size = 0;
  double residual = 0.0;  // ||K f - lambda M f|| / ||lambda M f||
};

/// Spectral gap of the weighted Neumann problem -(p f')' = lambda p f on the
/// grid box, by P1 finite elements and shifted inverse iteration with the
/// constant mode deflated. d=1 only.
PoincareEstimate poincare_constant(const GridDensity& mu);

/// Poincare constant of a product measure: max of the factor constants.
inline double product_poincare(const PoincareEstimate& a, const PoincareEstimate& b) {
  return std::max(a.constant, b.constant);
}

/// Gaussian mollification: convolution with N(0, sigma^2) on an extended
/// grid, renormalized. Variance grows by sigma^2.
GridDensity smooth(const GridDensity& mu, double sigma);

struct FamilySpec {
  enum class Kind { symmetric_uniform, uniform_gauss_mixture, gaussian_scale_mixture };
  Kind kind = Kind::uniform_gauss_mixture;
  double smoothing = 0.0;
  int n_nodes = 4096;
};

struct MatchResult {
  GridDensity density;
  Vec params;
  double residual;
};

/// Solves the family's parameters so that moments up to target_degree match
/// the standard Gaussian, by damped Newton on the closed-form moment map.
/// Throws NoSolution when the family cannot reach the constraints.
MatchResult match_moments(const FamilySpec& family, int target_degree);

/// L1 distance between two 1-D grid densities (interpolating onto the union
/// of both node sets, zero outside each box).
double l1_distance(const GridDensity& a, const GridDensity& b);

/// Cubic resampling onto at most max_nodes (same box). No-op when already
/// coarse enough.
GridDensity coarsen(const GridDensity& mu, int max_nodes);

}  // namespace steinlab
