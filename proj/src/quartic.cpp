#include "bihar/quartic.hpp"

#include <cmath>
#include <string>

#include "bihar/errors.hpp"

namespace bihar {

double q4_eval(int n, double alpha)
{
    return alpha * (alpha + 2.0) * (alpha + 2.0 - n) * (alpha + 4.0 - n);
}

double q4_derivative(int n, double alpha)
{
    const double f0 = alpha, f1 = alpha + 2.0, f2 = alpha + 2.0 - n, f3 = alpha + 4.0 - n;
    return f1 * f2 * f3 + f0 * f2 * f3 + f0 * f1 * f3 + f0 * f1 * f2;
}

double sobolev_exponent(int n)
{
    return (n + 4.0) / (n - 4.0);
}

ProblemParams::ProblemParams(int n, double p) : n_(n), p_(p)
{
    if (n < 5)
        throw InvalidParams("dimension n must be at least 5 (got " + std::to_string(n) + ")");
    if (!std::isfinite(p) || !(p > sobolev_exponent(n)))
        throw InvalidParams("exponent p must exceed the Sobolev exponent (n+4)/(n-4) = " +
                            std::to_string(sobolev_exponent(n)) + " (got p = " +
                            std::to_string(p) + ")");
}

}  // namespace bihar
