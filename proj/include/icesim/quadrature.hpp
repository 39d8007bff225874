#pragma once

#include <cmath>
#include <functional>

namespace icesim {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                        int max_depth = 50);

/// Pairwise (tree-order) sum; the reduction order depends only on the length.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace icesim
