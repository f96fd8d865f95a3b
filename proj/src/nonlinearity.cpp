#include "bihar/nonlinearity.hpp"

#include <cmath>

#include "bihar/errors.hpp"

namespace bihar {

double g_unchecked(double L, double p, double y)
{
    const double x = y / L;
    return std::pow(L, p) * (std::expm1(p * std::log1p(x)) - p * x);
}

Nonlinearity::Nonlinearity(double L_, double p_, int order) : L(L_), p(p_), taylor(taylor_coeffs(p_, L_, order)) {}

double Nonlinearity::operator()(double y) const
{
    return g_eval(*this, y);
}

double g_eval(const Nonlinearity& nl, double y)
{
    if (!(y > -nl.L)) throw DomainError("g(y) requires y > -L");
    return g_unchecked(nl.L, nl.p, y);
}

std::vector<double> taylor_coeffs(double p, double L, int order)
{
    if (order < 2) throw InvalidParams("taylor_coeffs: order must be at least 2");
    if (!(L > 0)) throw InvalidParams("taylor_coeffs: L must be positive");
    std::vector<double> d;
    double binom = p;  // C(p, 1)
    for (int j = 2; j <= order; ++j) {
        binom *= (p - (j - 1)) / j;
        d.push_back(binom * std::pow(L, p - j));
    }
    return d;
}

double taylor_sum(const std::vector<double>& d, double y)
{
    double acc = 0;
    for (std::size_t i = d.size(); i-- > 0;) acc = (acc + d[i]) * y;
    return acc * y;
}

}  // namespace bihar
