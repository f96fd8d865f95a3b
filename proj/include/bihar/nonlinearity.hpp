#pragma once

#include <vector>

namespace bihar {

/// g(y) = (y+L)^p - L^p - p L^{p-1} y, the nonlinearity left after
/// subtracting the linearization about the singular solution.
struct Nonlinearity {
    double L = 0;
    double p = 0;
    /// taylor[j-2] = d_j, j = 2..order.
    std::vector<double> taylor;

    Nonlinearity(double L, double p, int order = 8);
    double operator()(double y) const;
};

/// Throws DomainError for y <= -L.
double g_eval(const Nonlinearity& nl, double y);

/// g written as L^p [expm1(p log1p(y/L)) - p y/L], which keeps the error
/// relative to the linear term even when |y| << L. No domain check.
double g_unchecked(double L, double p, double y);

/// d_j = C(p, j) L^{p-j} for j = 2..order.
std::vector<double> taylor_coeffs(double p, double L, int order);

/// Σ_{j=2}^{J} d_j y^j with d taken from taylor_coeffs.
double taylor_sum(const std::vector<double>& d, double y);

}  // namespace bihar
