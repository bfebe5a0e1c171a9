#include "steinlab/kernels.hpp"

#include <cmath>

namespace steinlab {

TestFunction1D monomial_test(int n) {
  TestFunction1D f;
  f.name = "x^" + std::to_string(n);
  f.polynomial = true;
  f.deriv = [n](double x, int j) {
    if (j > n) return 0.0;
    double fall = 1.0;
    for (int m = n; m > n - j; --m) fall *= m;
    return fall * std::pow(x, n - j);
  };
  return f;
}

TestFunction1D trig_test(double omega, double phase, double amplitude) {
  TestFunction1D f;
  f.name = "sin(" + std::to_string(omega) + "x+" + std::to_string(phase) + ")";
  f.polynomial = false;
  f.deriv = [omega, phase, amplitude](double x, int j) {
    return amplitude * std::pow(omega, j) * std::sin(omega * x + phase + j * M_PI_2);
  };
  return f;
}

TestFunction1D hermite_test(int m, double scale) {
  TestFunction1D f;
  f.name = "He_" + std::to_string(m);
  f.polynomial = true;
  f.deriv = [m, scale](double x, int j) {
    if (j > m) return 0.0;
    double fall = 1.0;
    for (int i = m; i > m - j; --i) fall *= i;
    return scale * fall * hermite_value(m - j, x);
  };
  return f;
}

TestFunction1D zero_test() {
  TestFunction1D f;
  f.name = "0";
  f.polynomial = true;
  f.deriv = [](double, int) { return 0.0; };
  return f;
}

SymTensor KernelField::tensor_at(Index node) const {
  SymTensor t(tensor_order(), dim);
  t.values = values.col(node);
  return t;
}

KernelField KernelField::zero(const GridDensity& mu, int order) {
  KernelField k;
  k.order = order;
  k.dim = mu.dim;
  k.provenance = Provenance::zero;
  k.axes = mu.axis;
  k.values = Mat::Zero(sym_index_set(order + 1, mu.dim).size(), mu.size());
  k.valid_lo = 0;
  k.valid_hi = static_cast<int>(mu.size()) - 1;
  return k;
}

namespace {

// int_x^b g dy at every node, accumulated from the right edge. Cells are
// integrated through the local cubic interpolant (4th order); the division
// by p(x) downstream amplifies quadrature error in the tails, which plain
// trapezoid sums cannot afford.
Vec tail_cumulative(const Vec& g, double h) {
  const Index n = g.size();
  if (n < 4) throw std::invalid_argument("tail_cumulative: need at least 4 nodes");
  auto cell = [&](Index i) {  // int over [x_i, x_{i+1}]
    if (i == 0) return h / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
    if (i == n - 2)
      return h / 24.0 * (g[n - 4] - 5.0 * g[n - 3] + 19.0 * g[n - 2] + 9.0 * g[n - 1]);
    return h / 24.0 * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]);
  };
  Vec r(n);
  r[n - 1] = 0.0;
  for (Index i = n - 2; i >= 0; --i) r[i] = r[i + 1] + cell(i);
  return r;
}

}  // namespace

KernelField kernel_1d_iterative(const GridDensity& mu, int order, double moment_tol) {
  if (mu.dim != 1) throw std::invalid_argument("kernel_1d_iterative: d=1 only");
  require_moments_match(mu, order, moment_tol);
  const GridAxis& ax = mu.axis[0];
  for (int i = 1; i + 1 < ax.n; ++i)
    if (mu.p[i] <= 0.0) throw DensityZero(ax.node(i));

  const Vec x = ax.nodes();
  const double h = ax.h();
  // guard the two boundary nodes against p == 0 there (open-support boxes)
  Vec psafe = mu.p;
  const double tiny = 1e-300;
  psafe[0] = std::max(psafe[0], tiny);
  psafe[ax.n - 1] = std::max(psafe[ax.n - 1], tiny);

  Vec tau = (tail_cumulative(x.cwiseProduct(mu.p), h).array() / psafe.array() - 1.0).matrix();
  for (int j = 2; j <= order; ++j)
    tau = (tail_cumulative(tau.cwiseProduct(mu.p), h).array() / psafe.array()).matrix();

  KernelField k;
  k.order = order;
  k.dim = 1;
  k.provenance = KernelField::Provenance::iterative;
  k.axes = mu.axis;
  k.values = tau.transpose();
  k.valid_lo = 0;
  k.valid_hi = ax.n - 1;
  return k;
}

KernelField product_kernel(const KernelField& k0, const KernelField& k1) {
  if (k0.dim != 1 || k1.dim != 1 || k0.order != k1.order)
    throw std::invalid_argument("product_kernel: two 1-D kernels of equal order required");
  KernelField k;
  k.order = k0.order;
  k.dim = 2;
  k.provenance = KernelField::Provenance::product;
  k.axes = {k0.axes[0], k1.axes[0]};
  const auto& set = sym_index_set(k.tensor_order(), 2);
  const int n0 = k0.axes[0].n, n1 = k1.axes[0].n;
  k.values = Mat::Zero(set.size(), static_cast<Index>(n0) * n1);
  int row_axis0 = -1, row_axis1 = -1;
  for (int e = 0; e < set.size(); ++e) {
    if (set.counts[e][0] == k.tensor_order()) row_axis0 = e;
    if (set.counts[e][1] == k.tensor_order()) row_axis1 = e;
  }
  for (int i0 = 0; i0 < n0; ++i0)
    for (int i1 = 0; i1 < n1; ++i1) {
      const Index node = static_cast<Index>(i0) * n1 + i1;
      k.values(row_axis0, node) = k0.scalar_at(i0);
      k.values(row_axis1, node) = k1.scalar_at(i1);
    }
  k.valid_lo = 0;
  k.valid_hi = static_cast<int>(k.values.cols()) - 1;
  return k;
}

double discrepancy(const KernelField& tau, const GridDensity& mu) {
  if (tau.num_nodes() != mu.size())
    throw std::invalid_argument("discrepancy: kernel and measure grids differ");
  const Vec mult = sym_index_set(tau.tensor_order(), tau.dim).multiplicity;
  Vec norm2(mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    norm2[i] = tau.valid_at(i)
                   ? (mult.array() * tau.values.col(i).array().square()).sum()
                   : 0.0;
  }
  return std::sqrt(std::max(0.0, mu.integrate(norm2)));
}

double stein_identity_residual(const KernelField& tau, const GridDensity& mu,
                               const TestFunction1D& f) {
  if (mu.dim != 1 || tau.dim != 1)
    throw std::invalid_argument("stein_identity_residual: d=1 overload");
  const int k = tau.order;
  const Vec x = mu.axis[0].nodes();
  Vec lhs_nodes(mu.size()), rhs_nodes(mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    lhs_nodes[i] = tau.valid_at(i) ? tau.scalar_at(i) * f.deriv(x[i], k) : 0.0;
    rhs_nodes[i] = x[i] * f.deriv(x[i], 0) - f.deriv(x[i], 1);
  }
  const double lhs = mu.integrate(lhs_nodes);
  const double rhs = mu.integrate(rhs_nodes);
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

double stein_identity_residual(const KernelField& tau, const GridDensity& mu,
                               const HermiteExpansion& f) {
  if (tau.dim != mu.dim || f.dim != mu.dim)
    throw std::invalid_argument("stein_identity_residual: dim mismatch");
  if (f.components != mu.dim)
    throw std::invalid_argument("stein_identity_residual: f must be a vector field");
  const int k = tau.order;
  Vec lhs_nodes(mu.size()), rhs_nodes(mu.size());
  const int n1 = mu.dim == 2 ? mu.axis[1].n : 1;
  for (Index i = 0; i < mu.size(); ++i) {
    Vec x(mu.dim);
    if (mu.dim == 1) {
      x[0] = mu.axis[0].node(static_cast<int>(i));
    } else {
      x[0] = mu.axis[0].node(static_cast<int>(i) / n1);
      x[1] = mu.axis[1].node(static_cast<int>(i) % n1);
    }
    lhs_nodes[i] = tau.valid_at(i) ? inner_with_derivative(tau.tensor_at(i), f, k, x) : 0.0;
    rhs_nodes[i] = stein_rhs_integrand(f, x);
  }
  const double lhs = mu.integrate(lhs_nodes);
  const double rhs = mu.integrate(rhs_nodes);
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

double iterative_consistency(const KernelField& tau_k, const KernelField& tau_km1,
                             const GridDensity& mu, const TestFunction1D& f) {
  if (mu.dim != 1) throw std::invalid_argument("iterative_consistency: d=1 only");
  const Vec x = mu.axis[0].nodes();
  Vec lhs_nodes(mu.size()), rhs_nodes(mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    lhs_nodes[i] = tau_k.valid_at(i) ? tau_k.scalar_at(i) * f.deriv(x[i], tau_k.order) : 0.0;
    rhs_nodes[i] =
        tau_km1.valid_at(i) ? tau_km1.scalar_at(i) * f.deriv(x[i], tau_km1.order) : 0.0;
  }
  const double lhs = mu.integrate(lhs_nodes);
  const double rhs = mu.integrate(rhs_nodes);
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

double kernel_sup_error(const KernelField& tau, const GridDensity& mu,
                        const std::function<double(double)>& reference,
                        double rel_floor) {
  if (tau.dim != 1 || mu.dim != 1)
    throw std::invalid_argument("kernel_sup_error: d=1 only");
  const double floor = rel_floor * mu.p.maxCoeff();
  double worst = 0.0;
  for (Index i = 1; i + 1 < mu.size(); ++i) {
    if (!tau.valid_at(i) || mu.p[i] < floor) continue;
    const double x = mu.axis[0].node(static_cast<int>(i));
    worst = std::max(worst, std::abs(tau.scalar_at(i) - reference(x)));
  }
  return worst;
}

double centering_defect(const KernelField& tau, const GridDensity& mu) {
  double worst = 0.0;
  for (Index r = 0; r < tau.values.rows(); ++r) {
    Vec comp(mu.size());
    for (Index i = 0; i < mu.size(); ++i) comp[i] = tau.valid_at(i) ? tau.values(r, i) : 0.0;
    worst = std::max(worst, std::abs(mu.integrate(comp)));
  }
  return worst;
}

}  // namespace steinlab
