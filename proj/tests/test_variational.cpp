#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "steinlab/variational.hpp"

using namespace steinlab;

namespace {

GridDensity unit_uniform(int n = 4096) { return uniform_1d(std::sqrt(3.0), n); }

double l2_mu_distance(const KernelField& a, const KernelField& b, const GridDensity& mu) {
  Vec diff2(mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    const double d = a.scalar_at(i) - b.scalar_at(i);
    diff2[i] = d * d;
  }
  return std::sqrt(mu.integrate(diff2));
}

}  // namespace

TEST_CASE("gaussian input gives the zero kernel") {
  const GridDensity g = standard_gaussian(1, {-8.0, 8.0, 2048});
  const KernelField t1 = kernel_1d_iterative(g, 1);
  const NextKernelResult res = solve_next_kernel(g, t1, 8);
  CHECK(discrepancy(res.kernel, g) < 1e-6);
}

TEST_CASE("galerkin tau_2 of the uniform matches the iterative kernel") {
  const GridDensity u = unit_uniform();
  const KernelField t1 = kernel_1d_iterative(u, 1);
  const KernelField t2 = kernel_1d_iterative(u, 2);
  const NextKernelResult res = solve_next_kernel(u, t1, 8);

  CHECK(res.solver_residual < 1e-10);
  CHECK(l2_mu_distance(res.kernel, t2, u) < 1e-3);
  CHECK(kernel_sup_error(res.kernel, u, [](double x) { return x * x * x / 6.0 - 0.5 * x; }) <
        1e-4);

  // minimizer value: J(g*) = -1/2 int |tau_2|^2 dmu
  const double j0 = functional_value(HermiteExpansion::zero(1, 1, 8), u, t1);
  CHECK(j0 == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  const double jstar = functional_value(res.g, u, t1);
  CHECK(jstar ==
        doctest::Approx(-0.5 * discrepancy_squared(res.kernel, u)).epsilon(1e-8));

  // convexity: perturbations increase J
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist(0.0, 0.05);
  for (int trial = 0; trial < 5; ++trial) {
    HermiteExpansion gp = res.g;
    for (int i = 0; i < gp.basis_size(); ++i)
      if (gp.alphas[i].degree() >= 2) gp.coef(i, 0) += dist(rng);
    CHECK(functional_value(gp, u, t1) >= jstar - 1e-12);
  }

  // identity transfer on the degree-<=k polynomial family
  for (int n = 0; n <= 1; ++n)
    CHECK(stein_identity_residual(res.kernel, u, monomial_test(n)) < 1e-3);
}

TEST_CASE("degree saturation on a smooth measure") {
  const GridDensity su = smoothed_uniform_1d(0.1, 2048);
  const KernelField t1 = kernel_1d_iterative(su, 1);
  const NextKernelResult r8 = solve_next_kernel(su, t1, 8);
  const NextKernelResult r12 = solve_next_kernel(su, t1, 12);
  const double v8 = discrepancy_squared(r8.kernel, su);
  const double v12 = discrepancy_squared(r12.kernel, su);
  CHECK(std::abs(v12 - v8) < 1e-3);
  CHECK(r12.system.condition > r8.system.condition);  // recorded, grows with N
}

TEST_CASE("product measure in d=2: kernel tensorizes along the axes") {
  const GridDensity u = unit_uniform(257);
  const GridDensity mu2 = product_density(u, u);
  const KernelField t1_1d = kernel_1d_iterative(u, 1);
  // reference only; the coarse factor grid carries h^2/6 ~ 3e-5 in m2
  const KernelField t2_1d = kernel_1d_iterative(u, 2, 1e-4);
  const KernelField tau1 = product_kernel(t1_1d, t1_1d);

  const NextKernelResult res = solve_next_kernel(mu2, tau1, 6);
  CHECK(res.solver_residual < 1e-10);
  // exact minimizer is diagonal; the recorded pre-symmetrization gap is pure
  // h^2 quadrature noise on this grid, the stored tensor is symmetric exactly
  CHECK(res.asymmetry < 1e-4);

  // the axis entries reproduce the 1-D second-order kernel of the factors
  const auto& set = sym_index_set(3, 2);
  const int row000 = set.position(MultiIndex({3, 0}));
  const int row111 = set.position(MultiIndex({0, 3}));
  double worst0 = 0.0, worst1 = 0.0;
  for (int i0 = 0; i0 < 257; ++i0)
    for (int i1 = 0; i1 < 257; ++i1) {
      const Index node = static_cast<Index>(i0) * 257 + i1;
      worst0 = std::max(worst0, std::abs(res.kernel.values(row000, node) - t2_1d.scalar_at(i0)));
      worst1 = std::max(worst1, std::abs(res.kernel.values(row111, node) - t2_1d.scalar_at(i1)));
    }
  CHECK(worst0 < 1e-3);
  CHECK(worst1 < 1e-3);
}

TEST_CASE("existence bound: uniform passes at k=1 and k=2") {
  const GridDensity u = unit_uniform();
  const ExistenceBound e1 = existence_bound_check(u, 1);
  CHECK(!e1.skipped);
  CHECK(e1.pass);
  CHECK(e1.discrepancy_sq == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(e1.bound == doctest::Approx(12.0 / (M_PI * M_PI) - 1.0).epsilon(1e-3));

  const ExistenceBound e2 = existence_bound_check(u, 2);
  CHECK(e2.pass);
  CHECK(e2.discrepancy_sq == doctest::Approx(2.0 / 35.0).epsilon(1e-2));
  const double cp = 12.0 / (M_PI * M_PI);
  CHECK(e2.bound == doctest::Approx(cp * (cp - 1.0)).epsilon(1e-3));
}

TEST_CASE("sample-measure assembly recovers the uniform's second-order kernel") {
  // iid draws from the uniform on [-sqrt(3), sqrt(3)]
  const Index n = 400000;
  SampleMeasure s;
  s.dim = 1;
  s.seed = 99;
  s.points.resize(n, 1);
  std::mt19937_64 rng(s.seed);
  for (Index i = 0; i < n; ++i)
    s.points(i, 0) = std::sqrt(3.0) * (2.0 * ((rng() >> 11) + 0.5) * 0x1.0p-53 - 1.0);

  const GridDensity u = unit_uniform(1025);
  const KernelField t1 = kernel_1d_iterative(u, 1);
  const NextKernelResult res = solve_next_kernel(s, t1, 8, GridAxis{-1.7, 1.7, 257});

  // statistical noise floor ~ n^{-1/2}
  double worst = 0.0;
  for (int i = 0; i < 257; ++i) {
    const double x = res.kernel.axes[0].node(i);
    worst = std::max(worst, std::abs(res.kernel.scalar_at(i) - (x * x * x / 6.0 - 0.5 * x)));
  }
  CHECK(worst < 0.05);
}
