#pragma once

#include "steinlab/types.hpp"

namespace steinlab {

struct QuadratureRule {
  Vec nodes;
  Vec weights;
};

/// Gauss-Hermite rule for the standard Gaussian weight e^{-t^2/2}/sqrt(2 pi):
/// sum w_i f(x_i) ~ E[f(G)], exact for polynomials of degree <= 2n-1.
/// Computed by Golub-Welsch on the Jacobi matrix of the probabilists'
/// Hermite recurrence (off-diagonal sqrt(j)).
QuadratureRule gauss_hermite(int n);

/// Gauss-Legendre rule on [a, b]; weights sum to b - a.
QuadratureRule gauss_legendre(int n, double a, double b);

}  // namespace steinlab
