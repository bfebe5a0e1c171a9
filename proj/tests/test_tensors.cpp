#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "steinlab/hermite.hpp"
#include "steinlab/multi_index.hpp"
#include "steinlab/quadrature.hpp"
#include "steinlab/sym_tensor.hpp"

using namespace steinlab;

namespace {

Vec pt(std::initializer_list<double> v) {
  Vec x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double t : v) x[i++] = t;
  return x;
}

// independent route: He_k(t) = (-1)^k P_k(t) with P_{k+1} = P_k' - t P_k,
// P_0 = 1, from differentiating e^{-t^2/2} exactly (polynomial coefficients)
double hermite_by_differentiation(int k, double t) {
  std::vector<double> p{1.0};
  for (int j = 0; j < k; ++j) {
    std::vector<double> next(p.size() + 1, 0.0);
    for (size_t m = 1; m < p.size(); ++m) next[m - 1] += m * p[m];  // P'
    for (size_t m = 0; m < p.size(); ++m) next[m + 1] -= p[m];      // -t P
    p = next;
  }
  double v = 0.0, tp = 1.0;
  for (double c : p) {
    v += c * tp;
    tp *= t;
  }
  return (k % 2 == 0 ? 1.0 : -1.0) * v;
}

// brute-force full-array expansion over all d^k ordered indices
void for_each_ordered(int order, int dim, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(order, 0);
  while (true) {
    fn(idx);
    int slot = order - 1;
    while (slot >= 0 && ++idx[slot] == dim) idx[slot--] = 0;
    if (slot < 0) break;
  }
}

double inner_bruteforce(const SymTensor& a, const SymTensor& b) {
  double s = 0.0;
  for_each_ordered(a.order, a.dim, [&](const std::vector<int>& idx) { s += a.at(idx) * b.at(idx); });
  return s;
}

SymTensor random_tensor(int order, int dim, std::mt19937_64& rng) {
  SymTensor t(order, dim);
  std::normal_distribution<double> dist;
  for (Index i = 0; i < t.values.size(); ++i) t.values[i] = dist(rng);
  return t;
}

}  // namespace

TEST_CASE("hermite recurrence basics") {
  CHECK(hermite_value(3, 2.0) == doctest::Approx(2.0));  // t^3 - 3t at 2
  CHECK(hermite_value(0, 5.0) == 1.0);
  CHECK(hermite_value(1, -1.5) == -1.5);
  CHECK(hermite_value(2, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("hermite matches symbolic differentiation for k <= 5") {
  for (int k = 0; k <= 5; ++k)
    for (double t : {-2.3, -0.7, 0.0, 0.4, 1.9, 3.5})
      CHECK(hermite_value(k, t) ==
            doctest::Approx(hermite_by_differentiation(k, t)).epsilon(1e-12));
}

TEST_CASE("multi-dimensional hermite product structure") {
  CHECK(hermite_eval(MultiIndex({2, 0}), pt({1.3, 0.2})) == doctest::Approx(1.3 * 1.3 - 1.0));
  CHECK(hermite_eval(MultiIndex({1, 1}), pt({1.3, 0.2})) == doctest::Approx(1.3 * 0.2));
}

TEST_CASE("gauss-hermite oracle: int He_2^2 dgamma = 2") {
  const QuadratureRule gh = gauss_hermite(64);
  double s = 0.0;
  for (Index q = 0; q < gh.nodes.size(); ++q) {
    const double h2 = hermite_value(2, gh.nodes[q]);
    s += gh.weights[q] * h2 * h2;
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(gh.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("hermite orthogonality under gauss-hermite quadrature, degrees <= 8") {
  const QuadratureRule gh = gauss_hermite(64);
  for (int d : {1, 2}) {
    const auto alphas = multi_indices_up_to(d, 8);
    // tensorized quadrature
    double worst = 0.0;
    for (size_t ia = 0; ia < alphas.size(); ++ia) {
      for (size_t ib = ia; ib < alphas.size(); ++ib) {
        double s = 0.0;
        if (d == 1) {
          for (Index q = 0; q < gh.nodes.size(); ++q)
            s += gh.weights[q] * hermite_value(alphas[ia][0], gh.nodes[q]) *
                 hermite_value(alphas[ib][0], gh.nodes[q]);
        } else {
          for (Index q0 = 0; q0 < gh.nodes.size(); ++q0) {
            double inner = 0.0;
            for (Index q1 = 0; q1 < gh.nodes.size(); ++q1)
              inner += gh.weights[q1] * hermite_value(alphas[ia][1], gh.nodes[q1]) *
                       hermite_value(alphas[ib][1], gh.nodes[q1]);
            s += gh.weights[q0] * hermite_value(alphas[ia][0], gh.nodes[q0]) *
                 hermite_value(alphas[ib][0], gh.nodes[q0]) * inner;
          }
        }
        const double expected = alphas[ia] == alphas[ib] ? multi_factorial(alphas[ia]) : 0.0;
        worst = std::max(worst, std::abs(s - expected));
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("hermite tensor values") {
  const SymTensor h1 = hermite_tensor(1, pt({0.3, -1.2}));
  CHECK(h1.at({0}) == doctest::Approx(0.3));
  CHECK(h1.at({1}) == doctest::Approx(-1.2));

  const SymTensor h2 = hermite_tensor(2, pt({0.0, 0.0}));
  CHECK(h2.at({0, 0}) == doctest::Approx(-1.0));
  CHECK(h2.at({1, 1}) == doctest::Approx(-1.0));
  CHECK(h2.at({0, 1}) == doctest::Approx(0.0));

  const SymTensor h3 = hermite_tensor(3, pt({1.0, 0.0}));
  CHECK(h3.at({0, 0, 0}) == doctest::Approx(-2.0));  // He_3(1) = 1 - 3
}

TEST_CASE("inner products and norms") {
  for (int d : {1, 2, 3}) CHECK(inner(SymTensor::identity(d), SymTensor::identity(d)) ==
                                doctest::Approx(static_cast<double>(d)));

  SymTensor a(2, 2);
  a.set({0, 1}, 1.0);
  CHECK(norm2_squared(a) == doctest::Approx(2.0));  // multiplicity of (0,1)

  const SymTensor h2 = hermite_tensor(2, pt({1.0, 1.0}));
  CHECK(inner(h2, SymTensor::identity(2)) == doctest::Approx(0.0));

  SymTensor b(2, 3);
  CHECK_THROWS(inner(a, b));
}

TEST_CASE("inner agrees with the brute-force ordered expansion") {
  std::mt19937_64 rng(7);
  for (int d : {1, 2, 3}) {
    for (int k : {1, 2, 3, 4}) {
      const SymTensor a = random_tensor(k, d, rng);
      const SymTensor b = random_tensor(k, d, rng);
      CHECK(inner(a, b) == doctest::Approx(inner_bruteforce(a, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tensor_apply: identity, zero, brute-force adjoint") {
  Vec y = pt({0.7, -0.4});
  const SymTensor idy = tensor_apply(SymTensor::identity(2), y);
  CHECK(idy.at({0}) == doctest::Approx(0.7));
  CHECK(idy.at({1}) == doctest::Approx(-0.4));

  const SymTensor z = tensor_apply(SymTensor::zeros(3, 2), y);
  CHECK(norm2_squared(z) == 0.0);

  std::mt19937_64 rng(11);
  for (int k : {1, 2, 3}) {
    const SymTensor a = random_tensor(k + 1, 2, rng);
    const SymTensor ay = tensor_apply(a, y);
    // <A y, B> == sum over ordered indices of A_{i..j} y_j B_{i..}
    const SymTensor b = random_tensor(k, 2, rng);
    double expected = 0.0;
    for_each_ordered(k + 1, 2, [&](const std::vector<int>& idx) {
      std::vector<int> head(idx.begin(), idx.end() - 1);
      expected += a.at(idx) * y[idx.back()] * b.at(head);
    });
    CHECK(inner(ay, b) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("symmetry round-trip through permuted indices") {
  std::mt19937_64 rng(3);
  SymTensor a(3, 3);
  std::vector<int> idx{2, 0, 1};
  a.set(idx, 5.5);
  std::sort(idx.begin(), idx.end());
  do {
    CHECK(a.at(idx) == 5.5);
  } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST_CASE("multi-index enumeration and order") {
  const auto deg3 = multi_indices_of_degree(2, 3);
  CHECK(deg3.size() == 4);  // C(2+3-1, 3)
  const auto all = multi_indices_up_to(2, 4);
  CHECK(all.size() == 15);
  for (size_t i = 0; i + 1 < all.size(); ++i) CHECK(graded_lex_less(all[i], all[i + 1]));
}

TEST_CASE("gaussian moments closed form") {
  CHECK(gaussian_moment(MultiIndex({4})) == doctest::Approx(3.0));
  CHECK(gaussian_moment(MultiIndex({2, 2})) == doctest::Approx(1.0));
  CHECK(gaussian_moment(MultiIndex({1, 3})) == 0.0);
  CHECK(gaussian_moment(MultiIndex({6})) == doctest::Approx(15.0));
}

TEST_CASE("sym index multiplicities sum to d^k") {
  for (int d : {1, 2, 3})
    for (int k : {1, 2, 3, 4, 5}) {
      const auto& set = sym_index_set(k, d);
      CHECK(set.multiplicity.sum() == doctest::Approx(std::pow(d, k)));
    }
}
