#pragma once

#include <string>
#include <vector>

#include "steinlab/types.hpp"

namespace steinlab {

/// Exponent vector (i_1,...,i_d) of a monomial / Hermite polynomial index.
/// Total degree is the sum of the entries. Ordering is graded lexicographic:
/// lower degree first, ties broken lexicographically.
struct MultiIndex {
  std::vector<int> e;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exps) : e(std::move(exps)) {}
  static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }
  static MultiIndex unit(int dim, int j) {
    MultiIndex a = zero(dim);
    a.e[j] = 1;
    return a;
  }

  int dim() const { return static_cast<int>(e.size()); }
  int degree() const {
    int s = 0;
    for (int v : e) s += v;
    return s;
  }
  int operator[](int j) const { return e[j]; }
  int& operator[](int j) { return e[j]; }

  bool operator==(const MultiIndex& o) const { return e == o.e; }

  /// alpha - e_j; caller must ensure alpha_j > 0.
  MultiIndex minus_unit(int j) const {
    MultiIndex a = *this;
    a.e[j] -= 1;
    return a;
  }
  MultiIndex plus_unit(int j) const {
    MultiIndex a = *this;
    a.e[j] += 1;
    return a;
  }

  std::string str() const {
    std::string s;
    for (int j = 0; j < dim(); ++j) {
      if (j) s += '.';
      s += std::to_string(e[j]);
    }
    return s;
  }
};

inline bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a.e < b.e;
}
inline bool operator<(const MultiIndex& a, const MultiIndex& b) { return graded_lex_less(a, b); }

/// All multi-indices in `dim` variables of total degree exactly `k`,
/// in graded-lex order.
inline std::vector<MultiIndex> multi_indices_of_degree(int dim, int k) {
  std::vector<MultiIndex> out;
  MultiIndex cur = MultiIndex::zero(dim);
  // lexicographic enumeration by recursion over coordinates
  auto rec = [&](auto&& self, int j, int rem) -> void {
    if (j == dim - 1) {
      cur.e[j] = rem;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= rem; ++v) {
      cur.e[j] = v;
      self(self, j + 1, rem - v);
    }
  };
  rec(rec, 0, k);
  return out;
}

/// All multi-indices of degree <= max_degree, graded-lex order.
inline std::vector<MultiIndex> multi_indices_up_to(int dim, int max_degree) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= max_degree; ++k) {
    auto level = multi_indices_of_degree(dim, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double double_factorial(int n) {  // n!! with (-1)!! = 0!! = 1
  double f = 1.0;
  for (int i = n; i >= 2; i -= 2) f *= i;
  return f;
}

/// Product over coordinates of alpha_j!.
inline double multi_factorial(const MultiIndex& a) {
  double f = 1.0;
  for (int v : a.e) f *= factorial(v);
  return f;
}

/// Moment of the standard Gaussian: E[prod x_j^{alpha_j}]
/// (0 for any odd exponent, else prod (alpha_j - 1)!!).
inline double gaussian_moment(const MultiIndex& a) {
  double m = 1.0;
  for (int v : a.e) {
    if (v % 2 == 1) return 0.0;
    m *= double_factorial(v - 1);
  }
  return m;
}

}  // namespace steinlab
