#include "steinlab/hermite_expansion.hpp"

#include <cmath>
#include <stdexcept>

namespace steinlab {

HermiteExpansion HermiteExpansion::zero(int dim, int components, int max_degree) {
  HermiteExpansion f;
  f.dim = dim;
  f.components = components;
  f.max_degree = max_degree;
  f.alphas = multi_indices_up_to(dim, max_degree);
  f.coef = Mat::Zero(static_cast<Index>(f.alphas.size()), components);
  return f;
}

int HermiteExpansion::position(const MultiIndex& alpha) const {
  if (alpha.degree() > max_degree) return -1;
  for (int i = 0; i < basis_size(); ++i)
    if (alphas[i] == alpha) return i;
  return -1;
}

double HermiteExpansion::coef_at(const MultiIndex& alpha, int comp) const {
  const int pos = position(alpha);
  return pos < 0 ? 0.0 : coef(pos, comp);
}

void HermiteExpansion::set_coef(const MultiIndex& alpha, int comp, double v) {
  const int pos = position(alpha);
  if (pos < 0) throw std::out_of_range("HermiteExpansion::set_coef: alpha outside basis");
  coef(pos, comp) = v;
}

namespace {

// per-coordinate He tables up to max_degree
Mat hermite_table(int dim, int max_degree, const Vec& x) {
  Mat t(max_degree + 1, dim);
  for (int j = 0; j < dim; ++j) t.col(j) = hermite_values(max_degree, x[j]);
  return t;
}

}  // namespace

Vec HermiteExpansion::eval(const Vec& x) const {
  if (x.size() != dim) throw std::invalid_argument("HermiteExpansion::eval: dim mismatch");
  const Mat table = hermite_table(dim, max_degree, x);
  Vec out = Vec::Zero(components);
  for (int i = 0; i < basis_size(); ++i) {
    double h = 1.0;
    for (int j = 0; j < dim; ++j) h *= table(alphas[i][j], j);
    out += h * coef.row(i).transpose();
  }
  return out;
}

double HermiteExpansion::eval_scalar(double x) const {
  Vec p(1);
  p[0] = x;
  return eval(p)[0];
}

double HermiteExpansion::deriv(const MultiIndex& beta, int comp, const Vec& x) const {
  const Mat table = hermite_table(dim, max_degree, x);
  double out = 0.0;
  for (int i = 0; i < basis_size(); ++i) {
    const double c = coef(i, comp);
    if (c == 0.0) continue;
    double term = c;
    bool ok = true;
    for (int j = 0; j < dim && ok; ++j) {
      const int a = alphas[i][j], b = beta[j];
      if (b > a) {
        ok = false;
        break;
      }
      // d^b He_a = a!/(a-b)! He_{a-b}
      double fall = 1.0;
      for (int m = a; m > a - b; --m) fall *= m;
      term *= fall * table(a - b, j);
    }
    if (ok) out += term;
  }
  return out;
}

double HermiteExpansion::deriv_scalar(double x, int j) const {
  MultiIndex beta(std::vector<int>{j});
  Vec p(1);
  p[0] = x;
  return deriv(beta, 0, p);
}

double inner_with_derivative(const SymTensor& tau, const HermiteExpansion& f, int k,
                             const Vec& x) {
  if (tau.order != k + 1 || tau.dim != f.dim)
    throw std::invalid_argument("inner_with_derivative: tensor order/dim mismatch");
  const auto& dset = sym_index_set(k, f.dim);
  double s = 0.0;
  for (int c = 0; c < f.components; ++c) {
    for (int e = 0; e < dset.size(); ++e) {
      const double df = f.deriv(dset.counts[e], c, x);
      if (df == 0.0) continue;
      s += dset.multiplicity[e] * tau.at_counts(dset.counts[e].plus_unit(c)) * df;
    }
  }
  return s;
}

double derivative_norm2(const HermiteExpansion& f, int k, const Vec& x) {
  const auto& dset = sym_index_set(k, f.dim);
  double s = 0.0;
  for (int c = 0; c < f.components; ++c)
    for (int e = 0; e < dset.size(); ++e) {
      const double df = f.deriv(dset.counts[e], c, x);
      s += dset.multiplicity[e] * df * df;
    }
  return s;
}

double stein_rhs_integrand(const HermiteExpansion& f, const Vec& x) {
  const Vec fx = f.eval(x);
  double s = x.head(f.components).dot(fx);
  for (int c = 0; c < f.components; ++c) s -= f.deriv(MultiIndex::unit(f.dim, c), c, x);
  return s;
}

SymTensor derivative_tensor_symmetrized(const HermiteExpansion& f, int order, const Vec& x,
                                        double* max_asymmetry) {
  if (f.components != f.dim)
    throw std::invalid_argument("derivative_tensor_symmetrized: needs vector field (components == dim)");
  SymTensor t(order + 1, f.dim);
  const auto& set = t.index_set();
  double asym = 0.0;
  for (int i = 0; i < set.size(); ++i) {
    const MultiIndex& m = set.counts[i];
    double val = 0.0, vmin = 0.0, vmax = 0.0;
    bool first = true;
    for (int c = 0; c < f.dim; ++c) {
      if (m[c] == 0) continue;
      const double v = f.deriv(m.minus_unit(c), c, x);
      val += (static_cast<double>(m[c]) / (order + 1)) * v;
      vmin = first ? v : std::min(vmin, v);
      vmax = first ? v : std::max(vmax, v);
      first = false;
    }
    asym = std::max(asym, vmax - vmin);
    t.values[i] = val;
  }
  if (max_asymmetry) *max_asymmetry = asym;
  return t;
}

HermiteExpansion apply_semigroup(const HermiteExpansion& f, double t) {
  HermiteExpansion out = f;
  for (int i = 0; i < out.basis_size(); ++i)
    out.coef.row(i) *= std::exp(-out.alphas[i].degree() * t);
  return out;
}

HermiteExpansion monomial_1d(int n) {
  HermiteExpansion f = HermiteExpansion::zero(1, 1, n);
  Vec c = Vec::Zero(n + 1);  // c[m] = coefficient of He_m
  c[0] = 1.0;
  for (int p = 0; p < n; ++p) {
    Vec next = Vec::Zero(n + 1);
    for (int m = 0; m <= std::min(p, n - 1); ++m) {
      if (c[m] == 0.0) continue;
      next[m + 1] += c[m];
      if (m >= 1) next[m - 1] += m * c[m];
    }
    c = next;
  }
  for (int m = 0; m <= n; ++m) f.coef(m, 0) = c[m];
  return f;
}

HermiteExpansion hermite_1d(int m, double scale) {
  HermiteExpansion f = HermiteExpansion::zero(1, 1, m);
  f.coef(m, 0) = scale;
  return f;
}

}  // namespace steinlab
