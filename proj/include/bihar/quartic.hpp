#pragma once

namespace bihar {

/// Q4(a) = a(a+2)(a+2-n)(a+4-n), the symbol of |x|^{a+4} Δ² |x|^{-a}.
/// Evaluated as the product of its linear factors.
double q4_eval(int n, double alpha);

/// d/da Q4(a), product rule over the four factors.
double q4_derivative(int n, double alpha);

/// (n+4)/(n-4).
double sobolev_exponent(int n);

/// Dimension and exponent of Δ²φ = φ^p. The derived m = 4/(p-1) is always
/// recomputed from p.
class ProblemParams {
public:
    /// Throws InvalidParams unless n >= 5 and p > (n+4)/(n-4).
    ProblemParams(int n, double p);

    int n() const { return n_; }
    double p() const { return p_; }
    double m() const { return 4.0 / (p_ - 1.0); }

    /// λ* = m - (n-4)/2, the symmetry centre of the eigenvalue polynomial.
    double lambda_star() const { return m() - 0.5 * (n_ - 4); }

private:
    int n_;
    double p_;
};

}  // namespace bihar
