#pragma once

#include "steinlab/multi_index.hpp"
#include "steinlab/sym_tensor.hpp"
#include "steinlab/types.hpp"

namespace steinlab {

/// Probabilists' Hermite polynomial He_m(t), by the three-term recurrence
/// He_{m+1} = t He_m - m He_{m-1}, He_0 = 1, He_1 = t.
double hermite_value(int m, double t);

/// He_0(t), ..., He_{max_m}(t) in one sweep.
Vec hermite_values(int max_m, double t);

/// Multidimensional Hermite polynomial H_alpha(x) = prod_j He_{alpha_j}(x_j).
double hermite_eval(const MultiIndex& alpha, const Vec& x);

/// Symmetric k-tensor collecting all degree-k Hermite polynomials: the entry
/// with repetition counts c equals H_c(x). k=1 gives x itself.
SymTensor hermite_tensor(int k, const Vec& x);

}  // namespace steinlab
