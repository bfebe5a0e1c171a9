#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/kernels.hpp"

using namespace steinlab;

namespace {

GridDensity unit_uniform(int n = 4096) { return uniform_1d(std::sqrt(3.0), n); }

GridDensity matched_mixture(int n = 4096) {
  return match_moments({FamilySpec::Kind::uniform_gauss_mixture, 0.05, n}, 4).density;
}

std::vector<TestFunction1D> identity_battery() {
  std::vector<TestFunction1D> fs;
  for (int n = 0; n <= 6; ++n) fs.push_back(monomial_test(n));
  for (double omega : {0.5, 1.0, 2.0}) fs.push_back(trig_test(omega, 0.3));
  return fs;
}

}  // namespace

TEST_CASE("uniform kernels match the closed forms") {
  const GridDensity u = unit_uniform();
  const KernelField t1 = kernel_1d_iterative(u, 1);
  const KernelField t2 = kernel_1d_iterative(u, 2);
  CHECK(kernel_sup_error(t1, u, [](double x) { return 0.5 * (1.0 - x * x); }) < 1e-6);
  CHECK(kernel_sup_error(t2, u, [](double x) { return x * x * x / 6.0 - 0.5 * x; }) < 1e-6);
  CHECK(discrepancy_squared(t1, u) == doctest::Approx(0.2).epsilon(5e-4));
  CHECK(discrepancy_squared(t2, u) == doctest::Approx(2.0 / 35.0).epsilon(2e-3));
}

TEST_CASE("gaussian kernels vanish") {
  // box wide enough that the missing tail mass phi(9.2), amplified through
  // the iterations as phi(b)(b-x)^{k-1}/p(x), stays below the target on the
  // mu-relevant region; the residual discrepancy is honest truncation error
  const GridDensity g = standard_gaussian(1, {-9.2, 9.2, 4712});
  for (int k : {1, 2, 3}) {
    const KernelField t = kernel_1d_iterative(g, k);
    CHECK(kernel_sup_error(t, g, [](double) { return 0.0; }) < 1e-8);
    CHECK(discrepancy(t, g) < 1e-6);
  }
}

TEST_CASE("stein identity holds for the full test battery") {
  const GridDensity u = unit_uniform();
  const GridDensity mix = matched_mixture();
  for (int k : {1, 2}) {
    const KernelField t = kernel_1d_iterative(u, k);
    for (const auto& f : identity_battery())
      CHECK(stein_identity_residual(t, u, f) < 1e-4);
  }
  for (int k : {1, 2, 3}) {
    const KernelField t = kernel_1d_iterative(mix, k);
    for (const auto& f : identity_battery())
      CHECK(stein_identity_residual(t, mix, f) < 1e-4);
  }
}

TEST_CASE("gaussian control: identity residual at machine-level") {
  const GridDensity g = standard_gaussian(1, {-8.5, 8.5, 4352});
  for (int k : {1, 2}) {
    const KernelField t = kernel_1d_iterative(g, k);
    for (const auto& f : identity_battery())
      CHECK(stein_identity_residual(t, g, f) < 1e-8);
  }
}

TEST_CASE("identity with constant test function is exact for centered measures") {
  const GridDensity u = unit_uniform();
  const KernelField t1 = kernel_1d_iterative(u, 1);
  CHECK(stein_identity_residual(t1, u, monomial_test(0)) < 1e-14);
}

TEST_CASE("iterative relation: both sides agree (quadrature oracle)") {
  const GridDensity u = unit_uniform();
  const KernelField t1 = kernel_1d_iterative(u, 1);
  const KernelField t2 = kernel_1d_iterative(u, 2);

  // f = x^3/6: both sides equal int tau_1 x^2/2 dmu = (E x^2 - E x^4)/4 = -1/5
  const Vec x = u.axis[0].nodes();
  Vec lhs_nodes(u.size()), rhs_nodes(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    lhs_nodes[i] = t2.scalar_at(i) * x[i];                      // D^2 (x^3/6) = x
    rhs_nodes[i] = t1.scalar_at(i) * 0.5 * x[i] * x[i];         // D^1 (x^3/6)
  }
  const double lhs = u.integrate(lhs_nodes);
  const double rhs = u.integrate(rhs_nodes);
  CHECK(lhs == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(rhs == doctest::Approx(-0.2).epsilon(1e-6));

  TestFunction1D cubic;
  cubic.name = "x^3/6";
  cubic.polynomial = true;
  cubic.deriv = [](double t, int j) {
    switch (j) {
      case 0: return t * t * t / 6.0;
      case 1: return 0.5 * t * t;
      case 2: return t;
      case 3: return 1.0;
      default: return 0.0;
    }
  };
  CHECK(iterative_consistency(t2, t1, u, cubic) < 1e-6);
  CHECK(iterative_consistency(t2, t1, u, monomial_test(2)) < 1e-10);  // both sides odd -> 0
  for (double omega : {0.5, 1.0, 2.0})
    CHECK(iterative_consistency(t2, t1, u, trig_test(omega, 0.1)) < 1e-6);
}

TEST_CASE("centering: matched measures vs skewed control") {
  const GridDensity u = unit_uniform();
  CHECK(centering_defect(kernel_1d_iterative(u, 1), u) < 1e-6);
  CHECK(centering_defect(kernel_1d_iterative(u, 2), u) < 1e-6);

  // centered unit-variance mixture with m3 != 0: int tau_2 dmu = m3/2
  Vec w(2), m(2), s(2);
  w << 0.3, 0.7;
  m << 1.0, -3.0 / 7.0;
  const double var = 1.0 - 0.3 - 0.7 * 9.0 / 49.0;
  s << std::sqrt(var), std::sqrt(var);
  const GridDensity skew = gaussian_mixture_1d(w, m, s, {-9.0, 9.0, 4096});
  const double m3 = moments(skew, 3).find(MultiIndex({3}))->mu_moment;
  const KernelField t2 = kernel_1d_iterative(skew, 2);
  CHECK(centering_defect(t2, skew) == doctest::Approx(std::abs(0.5 * m3)).epsilon(1e-4));
  CHECK(std::abs(m3) > 0.1);  // genuinely skewed
}

TEST_CASE("moment precondition is enforced") {
  const GridDensity g_wide = gaussian_1d(1.1, {-9.0, 9.0, 2048});
  CHECK_THROWS_AS(kernel_1d_iterative(g_wide, 2), MomentMismatch);
  GridDensity u = unit_uniform(512);
  u.p[200] = 0.0;  // loose moment gate so the density check is what fires
  CHECK_THROWS_AS(kernel_1d_iterative(u, 1, 1e-2), DensityZero);
}

TEST_CASE("grid refinement shrinks the kernel error by 3x or better") {
  const GridDensity ref_mu = smoothed_uniform_1d(0.1, 8193);
  const KernelField ref = kernel_1d_iterative(ref_mu, 2);
  auto err_at = [&](int n) {
    const GridDensity mu = smoothed_uniform_1d(0.1, n);
    const KernelField t = kernel_1d_iterative(mu, 2);
    const int stride = (ref_mu.ax().n - 1) / (n - 1);
    double worst = 0.0;
    const double floor = 1e-8 * mu.p.maxCoeff();
    for (int i = 1; i + 1 < n; ++i) {
      if (mu.p[i] < floor) continue;
      worst = std::max(worst, std::abs(t.scalar_at(i) - ref.scalar_at(i * stride)));
    }
    return worst;
  };
  const double e_coarse = err_at(1025);
  const double e_fine = err_at(2049);
  CHECK(e_fine * 3.0 <= e_coarse);
}

TEST_CASE("product kernel is diagonal with the factor kernels on the axes") {
  const GridDensity u = unit_uniform(513);
  const KernelField t1 = kernel_1d_iterative(u, 1);
  const KernelField prod = product_kernel(t1, t1);
  const GridDensity mu2 = product_density(u, u);
  CHECK(prod.dim == 2);
  CHECK(prod.num_nodes() == mu2.size());
  const Index node = 100 * 513 + 31;
  const SymTensor tn = prod.tensor_at(node);
  CHECK(tn.at({0, 0}) == doctest::Approx(t1.scalar_at(100)));
  CHECK(tn.at({1, 1}) == doctest::Approx(t1.scalar_at(31)));
  CHECK(tn.at({0, 1}) == 0.0);

  // identity transfer in d=2 for the degree-<=1 vector family; tolerance is
  // the h^2 moment discretization of the coarse product grid
  HermiteExpansion f = HermiteExpansion::zero(2, 2, 1);
  f.set_coef(MultiIndex({1, 0}), 0, 1.0);  // f = (x0, x0 + 2 x1)
  f.set_coef(MultiIndex({1, 0}), 1, 1.0);
  f.set_coef(MultiIndex({0, 1}), 1, 2.0);
  CHECK(stein_identity_residual(prod, mu2, f) < 1e-4);
}
