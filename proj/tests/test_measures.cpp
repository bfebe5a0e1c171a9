#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "steinlab/measures.hpp"

using namespace steinlab;

TEST_CASE("standard gaussian on the default grid") {
  const GridDensity g = standard_gaussian(1, {-8.0, 8.0, 4096});
  CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g.moment1d(2) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(g.moment1d(4) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(g.moment1d(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("narrow grid is rejected") {
  CHECK_THROWS_AS(standard_gaussian(1, GridAxis{-3.0, 3.0, 512}), std::invalid_argument);
}

TEST_CASE("uniform moments: closed forms") {
  const GridDensity u = uniform_1d(std::sqrt(3.0));
  const MomentReport rep = moments(u, 4);
  CHECK(rep.find(MultiIndex({2}))->mu_moment == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.find(MultiIndex({3}))->mu_moment == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(rep.find(MultiIndex({4}))->mu_moment == doctest::Approx(9.0 / 5.0).epsilon(1e-6));
}

TEST_CASE("gaussian product moments in d=2") {
  const GridDensity g2 = standard_gaussian(2, {-8.0, 8.0, 512});
  const MomentReport rep = moments(g2, 4);
  CHECK(rep.find(MultiIndex({1, 1}))->mu_moment == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(rep.find(MultiIndex({2, 2}))->mu_moment == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(rep.max_abs_diff(3) < 1e-5);
}

TEST_CASE("sample measure: seeded gaussian draws") {
  const SampleMeasure s = SampleMeasure::gaussian(1, 1000000, 20240601);
  const MomentReport rep = moments(s, 2);
  CHECK(std::abs(rep.find(MultiIndex({2}))->diff) < 5e-3);
  CHECK(std::abs(rep.find(MultiIndex({1}))->diff) < 5e-3);
}

TEST_CASE("gaussian moments reproduced to degree 6") {
  const GridDensity g = standard_gaussian(1, {-8.0, 8.0, 4096});
  CHECK(moments(g, 6).max_abs_diff(6) < 1e-6);
}

TEST_CASE("match_moments: symmetric family to degree 3") {
  const MatchResult r = match_moments({FamilySpec::Kind::symmetric_uniform, 0.0, 4096}, 3);
  const MomentReport rep = moments(r.density, 3);
  CHECK(rep.max_abs_diff(3) < 1e-6);
}

TEST_CASE("match_moments: uniform+gaussian mixture to degree 4") {
  // raw family: parameters must solve a^2/6 + s^2/2 = 1, a^4/10 + 3 s^4/2 = 3
  const MatchResult raw = match_moments({FamilySpec::Kind::uniform_gauss_mixture, 0.0, 8192}, 4);
  const double a = raw.params[0], s = raw.params[1];
  CHECK(a * a / 6.0 + s * s / 2.0 == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(std::pow(a, 4) / 10.0 + 1.5 * std::pow(s, 4) == doctest::Approx(3.0).epsilon(1e-11));

  // smoothed family: the grid re-measure meets the residual target
  const MatchResult sm = match_moments({FamilySpec::Kind::uniform_gauss_mixture, 0.05, 4096}, 4);
  const MomentReport rep = moments(sm.density, 4);
  CHECK(rep.max_abs_diff(4) < 1e-8);
}

TEST_CASE("match_moments: gaussian scale mixtures cannot reach m4 = 3") {
  CHECK_THROWS_AS(match_moments({FamilySpec::Kind::gaussian_scale_mixture, 0.0, 2048}, 4),
                  NoSolution);
}

TEST_CASE("poincare constant of the uniform: (2a/pi)^2") {
  const GridDensity u = uniform_1d(std::sqrt(3.0), 4096);
  const PoincareEstimate est = poincare_constant(u);
  const double exact = 12.0 / (M_PI * M_PI);
  CHECK(est.constant == doctest::Approx(exact).epsilon(1e-3));
  CHECK(est.residual < 1e-8);

  // second-order convergence: halving the spacing shrinks the error
  const double e1 = std::abs(poincare_constant(uniform_1d(std::sqrt(3.0), 513)).constant - exact);
  const double e2 = std::abs(poincare_constant(uniform_1d(std::sqrt(3.0), 1025)).constant - exact);
  CHECK(e2 < e1 / 2.0);
}

TEST_CASE("poincare constant of the gaussian is 1") {
  const GridDensity g = standard_gaussian(1, {-8.0, 8.0, 2048});
  CHECK(poincare_constant(g).constant == doctest::Approx(1.0).epsilon(1e-3));
  // refinement invariance
  const GridDensity g2 = standard_gaussian(1, {-8.0, 8.0, 4096});
  CHECK(std::abs(poincare_constant(g).constant - poincare_constant(g2).constant) < 1e-3);
}

TEST_CASE("smoothing: variance additivity and limits") {
  const GridDensity u = uniform_1d(std::sqrt(3.0), 4096);
  const GridDensity su = smooth(u, 0.1);
  CHECK(su.mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(su.variance() == doctest::Approx(1.01).epsilon(1e-6));

  // spike convolved with a unit gaussian is a gaussian
  GridDensity spike;
  spike.dim = 1;
  spike.axis[0] = {-0.02, 0.02, 41};
  spike.p = Vec::Zero(41);
  spike.p[20] = 1.0;
  spike.normalize();
  const GridDensity out = smooth(spike, 1.0);
  double worst = 0.0;
  for (Index i = 0; i < out.size(); ++i) {
    const double x = out.axis[0].node(static_cast<int>(i));
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    worst = std::max(worst, std::abs(out.p[i] - phi));
  }
  CHECK(worst < 2e-4);  // limited by the spike's own width

  // sigma -> 0 on a smooth density
  const GridDensity g = standard_gaussian(1, {-8.0, 8.0, 4096});
  const GridDensity gs = smooth(g, 0.01);
  double diff = 0.0;
  for (Index i = 0; i < g.size(); ++i)
    diff = std::max(diff, std::abs(gs.eval(g.axis[0].node(static_cast<int>(i))) - g.p[i]));
  CHECK(diff < 1e-4);
}

TEST_CASE("smoothed uniform has unit variance and positive tails") {
  const GridDensity su = smoothed_uniform_1d(0.05, 4096);
  CHECK(su.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(su.variance() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(su.p.minCoeff() > 0.0);
  CHECK(moments(su, 3).max_abs_diff(3) < 1e-10);
}

TEST_CASE("require_moments_match flags a skewed mixture at degree 3") {
  Vec w(2), m(2), s(2);
  w << 0.3, 0.7;
  m << 1.0, -3.0 / 7.0;
  const double var = 1.0 - 0.3 * 1.0 - 0.7 * (9.0 / 49.0);
  s << std::sqrt(var), std::sqrt(var);
  const GridDensity mix = gaussian_mixture_1d(w, m, s, {-9.0, 9.0, 4096});
  CHECK_NOTHROW(require_moments_match(mix, 2, 1e-6));
  CHECK_THROWS_AS(require_moments_match(mix, 3, 1e-6), MomentMismatch);
}

TEST_CASE("density zero nodes are rejected by the eigensolver") {
  GridDensity bad = uniform_1d(1.0, 128);
  bad.p[64] = 0.0;
  CHECK_THROWS_AS(poincare_constant(bad), DensityZero);
}
