#include "steinlab/flow.hpp"

#include <cmath>

#include "steinlab/quadrature.hpp"

namespace steinlab {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005;

}  // namespace

FlowState evolve_density(const GridDensity& mu, double t, const std::string& base_id) {
  if (mu.dim != 1) throw std::invalid_argument("evolve_density: d=1 only");
  if (t < 0.0) throw std::invalid_argument("evolve_density: t >= 0 required");
  if (t == 0.0) return FlowState{0.0, mu, base_id};

  const double c = std::exp(-t);
  const double s = std::sqrt(std::max(1.0 - c * c, 1e-300));
  const GridAxis& ax = mu.axis[0];
  const Vec x = ax.nodes();
  const Vec mass = ax.trapezoid_weights().cwiseProduct(mu.p);

  GridDensity out;
  out.dim = 1;
  out.axis[0] = {c * ax.lo - 7.5 * s, c * ax.hi + 7.5 * s, ax.n};
  out.p.resize(ax.n);
  const double reach = 8.5 * s;
  const Vec y = c * x;  // contracted source lattice
  for (int i = 0; i < ax.n; ++i) {
    const double xi = out.axis[0].node(i);
    // window of source nodes within the kernel reach
    const double ylo = xi - reach, yhi = xi + reach;
    const int jlo = std::max(0, static_cast<int>(std::ceil((ylo / c - ax.lo) / ax.h())));
    const int jhi = std::min(ax.n - 1, static_cast<int>(std::floor((yhi / c - ax.lo) / ax.h())));
    if (jlo > jhi) {
      out.p[i] = 0.0;
      continue;
    }
    const auto d = (xi - y.segment(jlo, jhi - jlo + 1).array()) / s;
    out.p[i] = ((-0.5 * d.square()).exp() * mass.segment(jlo, jhi - jlo + 1).array()).sum() /
               (s * kSqrt2Pi);
  }
  out.normalize();
  return FlowState{t, std::move(out), base_id};
}

namespace {

// 4th-order centered differences; margin nodes keep value 0 and are reported
// through the returned margin size
Vec fd_derivative(const Vec& h, double dx, int order, int* margin_out) {
  const Index n = h.size();
  Vec d = Vec::Zero(n);
  int margin = 0;
  switch (order) {
    case 1:
      margin = 2;
      for (Index i = 2; i + 2 < n; ++i)
        d[i] = (-h[i + 2] + 8.0 * h[i + 1] - 8.0 * h[i - 1] + h[i - 2]) / (12.0 * dx);
      break;
    case 2:
      margin = 2;
      for (Index i = 2; i + 2 < n; ++i)
        d[i] = (-h[i + 2] + 16.0 * h[i + 1] - 30.0 * h[i] + 16.0 * h[i - 1] - h[i - 2]) /
               (12.0 * dx * dx);
      break;
    case 3:
      margin = 3;
      for (Index i = 3; i + 3 < n; ++i)
        d[i] = (h[i - 3] - 8.0 * h[i - 2] + 13.0 * h[i - 1] - 13.0 * h[i + 1] +
                8.0 * h[i + 2] - h[i + 3]) /
               (8.0 * dx * dx * dx);
      break;
    case 4:
      margin = 3;
      for (Index i = 3; i + 3 < n; ++i)
        d[i] = (-h[i - 3] + 12.0 * h[i - 2] - 39.0 * h[i - 1] + 56.0 * h[i] -
                39.0 * h[i + 1] + 12.0 * h[i + 2] - h[i + 3]) /
               (6.0 * std::pow(dx, 4));
      break;
    default:
      throw std::invalid_argument("fd_derivative: order 1..4");
  }
  if (margin_out) *margin_out = margin;
  return d;
}

}  // namespace

PoissonSolution barbour_solve(const TestFunction1D& f, int k, const GridAxis& grid) {
  const QuadratureRule gl = gauss_legendre(96, 0.0, M_PI_2);
  const QuadratureRule gh = gauss_hermite(64);

  PoissonSolution sol;
  sol.grid = grid;
  sol.order = k;
  sol.analytic = f.polynomial;

  double f_mean = 0.0;
  for (Index q = 0; q < gh.nodes.size(); ++q) f_mean += gh.weights[q] * f.deriv(gh.nodes[q], 0);
  sol.f_mean = f_mean;

  const Vec x = grid.nodes();
  const Index n = x.size();

  // h(x) = -int_0^1 (1/2t) ( E f(sqrt(t)x + sqrt(1-t)G) - E f(G) ) dt,
  // t = sin^2(theta): (1/2t) dt = cot(theta) dtheta and the bracket vanishes
  // like sin(theta), so the theta-integrand is analytic.
  sol.h = Vec::Zero(n);
  Vec inner(n);
  for (Index it = 0; it < gl.nodes.size(); ++it) {
    const double th = gl.nodes[it];
    const double st = std::sin(th), ct = std::cos(th);
    inner.setZero();
    for (Index q = 0; q < gh.nodes.size(); ++q) {
      const double wq = gh.weights[q], yq = gh.nodes[q];
      for (Index i = 0; i < n; ++i) inner[i] += wq * f.deriv(st * x[i] + ct * yq, 0);
    }
    sol.h -= gl.weights[it] * (ct / st) * (inner.array() - f_mean).matrix();
  }

  sol.deriv.assign(k + 1, Vec::Zero(n));
  if (sol.analytic) {
    // h^{(j)}(x) = -int sin^{j-1}(theta) E[ G f^{(j-1)}(sin(theta) x + cos(theta) G) ] dtheta
    for (int j = 1; j <= k + 1; ++j) {
      Vec acc = Vec::Zero(n);
      for (Index it = 0; it < gl.nodes.size(); ++it) {
        const double th = gl.nodes[it];
        const double st = std::sin(th), ct = std::cos(th);
        const double wt = gl.weights[it] * std::pow(st, j - 1);
        inner.setZero();
        for (Index q = 0; q < gh.nodes.size(); ++q) {
          const double wq = gh.weights[q] * gh.nodes[q];
          for (Index i = 0; i < n; ++i) inner[i] += wq * f.deriv(st * x[i] + ct * gh.nodes[q], j - 1);
        }
        acc += wt * inner;
      }
      sol.deriv[j - 1] = -acc;
    }
  } else {
    for (int j = 1; j <= k + 1; ++j) sol.deriv[j - 1] = fd_derivative(sol.h, grid.h(), j, nullptr);
  }

  // generator residual on the core |x| <= 5, away from finite-difference margins
  double res = 0.0;
  const int margin = sol.analytic ? 0 : 3;
  for (Index i = margin; i < n - margin; ++i) {
    if (std::abs(x[i]) > 5.0) continue;
    const double r =
        sol.deriv[1][i] - x[i] * sol.deriv[0][i] - (f.deriv(x[i], 0) - f_mean);
    res = std::max(res, std::abs(r));
  }
  sol.poisson_residual = res;
  return sol;
}

RegularityReport regularity_check(const TestFunction1D& f, int k, double core) {
  const double dx = 0.01;
  const double margin = 0.6;
  const int n = static_cast<int>(std::lround(2.0 * (core + margin) / dx)) + 1;
  const GridAxis grid{-core - margin, core + margin, n};
  const PoissonSolution sol = barbour_solve(f, k, grid);

  RegularityReport rep;
  rep.poisson_residual = sol.poisson_residual;
  const int fd_margin = sol.analytic ? 0 : 3;
  for (int i = fd_margin; i < n - fd_margin; ++i) {
    const double x = grid.node(i);
    if (std::abs(x) > core) continue;
    rep.sup_dh = std::max(rep.sup_dh, std::abs(sol.deriv[k][i]));
    rep.sup_df = std::max(rep.sup_df, std::abs(f.deriv(x, k)));
  }
  if (rep.sup_df < 1e-300) {
    rep.defined = false;
    rep.ratio = 0.0;
  } else {
    rep.ratio = rep.sup_dh / rep.sup_df;
  }
  return rep;
}

double stein_chain_residual(const GridDensity& mu, const KernelField& tau,
                            const TestFunction1D& f) {
  if (mu.dim != 1) throw std::invalid_argument("stein_chain_residual: d=1 only");
  const int k = tau.order;
  const GridAxis& ax = mu.axis[0];
  const int m = 3;  // finite-difference margin for non-polynomial f
  const GridAxis ext{ax.lo - m * ax.h(), ax.hi + m * ax.h(), ax.n + 2 * m};
  const PoissonSolution sol = barbour_solve(f, k, ext);

  Vec fvals(mu.size()), chain(mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    fvals[i] = f.deriv(ax.node(static_cast<int>(i)), 0);
    chain[i] = tau.valid_at(i) ? tau.scalar_at(i) * sol.deriv[k][i + m] : 0.0;
  }
  const double lhs = mu.integrate(fvals) - sol.f_mean;
  const double rhs = -mu.integrate(chain);
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

double generator_consistency(const HermiteExpansion& f, double t) {
  const HermiteExpansion pt = apply_semigroup(f, t);
  double worst = 0.0;
  for (int i = 0; i < f.basis_size(); ++i) {
    const int m = f.alphas[i].degree();
    if (m == 0) continue;
    for (int c = 0; c < f.components; ++c) {
      if (f.coef(i, c) == 0.0) continue;
      const double rate = (pt.coef(i, c) - f.coef(i, c)) / (t * f.coef(i, c));
      worst = std::max(worst, std::abs(rate + m) / m);
    }
  }
  return worst;
}

}  // namespace steinlab
