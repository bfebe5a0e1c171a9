#include "steinlab/hermite.hpp"

#include <stdexcept>

namespace steinlab {

double hermite_value(int m, double t) {
  double hm1 = 0.0, h = 1.0;  // He_{-1}, He_0
  for (int j = 0; j < m; ++j) {
    const double next = t * h - j * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

Vec hermite_values(int max_m, double t) {
  Vec h(max_m + 1);
  h[0] = 1.0;
  if (max_m >= 1) h[1] = t;
  for (int m = 1; m < max_m; ++m) h[m + 1] = t * h[m] - m * h[m - 1];
  return h;
}

double hermite_eval(const MultiIndex& alpha, const Vec& x) {
  if (alpha.dim() != x.size()) throw std::invalid_argument("hermite_eval: dim mismatch");
  double v = 1.0;
  for (int j = 0; j < alpha.dim(); ++j) v *= hermite_value(alpha[j], x[j]);
  return v;
}

SymTensor hermite_tensor(int k, const Vec& x) {
  if (k < 1) throw std::invalid_argument("hermite_tensor: k must be >= 1");
  SymTensor t(k, static_cast<int>(x.size()));
  const auto& set = t.index_set();
  for (int i = 0; i < set.size(); ++i) t.values[i] = hermite_eval(set.counts[i], x);
  return t;
}

}  // namespace steinlab
