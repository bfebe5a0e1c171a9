#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/flow.hpp"
#include "steinlab/quadrature.hpp"

using namespace steinlab;

namespace {

double sup_density_diff(const GridDensity& mu, double (*ref)(double), double lo, double hi) {
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = lo + (hi - lo) * i / 2000.0;
    worst = std::max(worst, std::abs(mu.eval(x) - ref(x)));
  }
  return worst;
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

}  // namespace

TEST_CASE("gaussian is the fixed point of the flow") {
  const GridDensity g = standard_gaussian(1, {-8.0, 8.0, 4096});
  const FlowState st = evolve_density(g, 0.7);
  CHECK(st.density.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sup_density_diff(st.density, std_normal_pdf, -7.0, 7.0) < 1e-8);
}

TEST_CASE("long times drive any unit-variance base to the gaussian") {
  const GridDensity u = uniform_1d(std::sqrt(3.0), 4096);
  const FlowState st = evolve_density(u, 20.0);
  CHECK(sup_density_diff(st.density, std_normal_pdf, -7.0, 7.0) < 1e-8);
}

TEST_CASE("unit variance is preserved along the flow") {
  const GridDensity u = uniform_1d(std::sqrt(3.0), 4096);
  const FlowState st = evolve_density(u, 0.5);
  CHECK(st.density.mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(st.density.variance() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(evolve_density(u, 0.0).density.p == u.p);  // t=0 returns the input
}

TEST_CASE("semigroup property in L1") {
  const GridDensity u = uniform_1d(std::sqrt(3.0), 4096);
  const GridDensity two_steps = evolve_density(evolve_density(u, 0.3).density, 0.5).density;
  const GridDensity one_step = evolve_density(u, 0.8).density;
  CHECK(l1_distance(two_steps, one_step) < 1e-7);
}

TEST_CASE("semigroup action on expansions: eigenvalue e^{-mt}") {
  HermiteExpansion f = hermite_1d(3);
  const HermiteExpansion pf = apply_semigroup(f, std::log(2.0));
  CHECK(pf.coef_at(MultiIndex({3}), 0) == doctest::Approx(1.0 / 8.0));

  HermiteExpansion c = HermiteExpansion::zero(1, 1, 0);
  c.set_coef(MultiIndex({0}), 0, 4.2);
  CHECK(apply_semigroup(c, 1.7).coef_at(MultiIndex({0}), 0) == doctest::Approx(4.2));

  // commutation: d/dx P_t f = e^{-t} P_t f' on coefficients, exactly
  const double t = 0.37;
  HermiteExpansion g = monomial_1d(4);
  const HermiteExpansion left = apply_semigroup(g, t);
  for (double x : {-1.1, 0.2, 2.5}) {
    const double dleft = left.deriv_scalar(x, 1);
    // derivative expansion of g, then semigroup, then eval
    HermiteExpansion dg = HermiteExpansion::zero(1, 1, 3);
    for (int m = 1; m <= 4; ++m)
      dg.set_coef(MultiIndex({m - 1}), 0, m * g.coef_at(MultiIndex({m}), 0));
    const double right = std::exp(-t) * apply_semigroup(dg, t).eval_scalar(x);
    CHECK(dleft == doctest::Approx(right).epsilon(1e-13));
  }
}

TEST_CASE("generator consistency at small t") {
  for (int m : {1, 2, 3, 4}) {
    const HermiteExpansion f = hermite_1d(m);
    CHECK(generator_consistency(f, 1e-4) < 1e-2);
  }
}

TEST_CASE("barbour solution for eigenfunctions") {
  const GridAxis grid{-6.0, 6.0, 1201};

  const PoissonSolution lin = barbour_solve(monomial_test(1), 1, grid);
  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i)
    worst = std::max(worst, std::abs(lin.h[i] - (-grid.node(i))));
  CHECK(worst < 1e-6);
  CHECK(lin.poisson_residual < 1e-3);

  const PoissonSolution h2 = barbour_solve(hermite_test(2), 1, grid);
  worst = 0.0;
  for (int i = 0; i < grid.n; ++i)
    worst = std::max(worst, std::abs(h2.h[i] - (-0.5 * hermite_value(2, grid.node(i)))));
  CHECK(worst < 1e-6);

  const PoissonSolution h3 = barbour_solve(hermite_test(3), 2, grid);
  worst = 0.0;
  for (int i = 0; i < grid.n; ++i)
    worst = std::max(worst, std::abs(h3.h[i] - (-hermite_value(3, grid.node(i)) / 3.0)));
  CHECK(worst < 1e-6);
  CHECK(h3.poisson_residual < 1e-3);

  const PoissonSolution zero = barbour_solve(zero_test(), 1, grid);
  CHECK(zero.h.lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("regularity: D^{k+1} h_f stays below D^k f") {
  for (int k : {1, 2}) {
    const RegularityReport sin_rep = regularity_check(trig_test(1.0, 0.0), k);
    CHECK(sin_rep.defined);
    CHECK(sin_rep.ratio <= 1.0 + 1e-3);
    CHECK(sin_rep.poisson_residual < 1e-3);
  }
  const RegularityReport h3 = regularity_check(hermite_test(3, 1.0 / 3.0), 2);
  CHECK(h3.defined);
  CHECK(h3.ratio <= 1.0 + 1e-3);

  const RegularityReport zero = regularity_check(zero_test(), 1);
  CHECK_FALSE(zero.defined);
}

TEST_CASE("stein chain: mu-gamma gap through the kernel and the poisson solution") {
  const GridDensity u = uniform_1d(std::sqrt(3.0), 4096);
  for (int k : {1, 2}) {
    const KernelField tau = kernel_1d_iterative(u, k);
    for (const auto& f : {trig_test(1.0, 0.3), trig_test(0.5, 0.0), trig_test(2.0, 1.1)})
      CHECK(stein_chain_residual(u, tau, f) < 1e-3);
    CHECK(stein_chain_residual(u, tau, monomial_test(1)) < 1e-6);  // both sides zero
  }
}
