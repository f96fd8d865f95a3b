#include "bihar/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bihar/errors.hpp"
#include "bihar/roots.hpp"

namespace bihar {

double eigen_poly_eval(const ProblemParams& params, double lambda)
{
    const double m = params.m();
    return q4_eval(params.n(), m - lambda) - params.p() * q4_eval(params.n(), m);
}

double eigen_poly_derivative(const ProblemParams& params, double lambda)
{
    return -q4_derivative(params.n(), params.m() - lambda);
}

double singular_amplitude(const ProblemParams& params)
{
    const double q = q4_eval(params.n(), params.m());
    if (!(q > 0))
        throw InvalidParams("Q4(m) must be positive for the singular amplitude");
    return std::exp(std::log(q) / (params.p() - 1.0));
}

namespace {

// Walks outward from `from` in direction `dir` until 𝒫 turns positive.
double outer_bracket(const ProblemParams& params, double from, double dir, double step)
{
    for (int i = 0; i < 200; ++i) {
        const double x = from + dir * step;
        if (eigen_poly_eval(params, x) > 0) return x;
        step *= 2;
    }
    throw BracketNotFound("compute_spectrum: no outer bracket found");
}

}  // namespace

Spectrum compute_spectrum(const ProblemParams& params)
{
    const int n = params.n();
    const double ls = params.lambda_star();
    auto P = [&](double x) { return eigen_poly_eval(params, x); };
    auto dP = [&](double x) { return eigen_poly_derivative(params, x); };

    const double pq = params.p() * q4_eval(n, params.m());
    const double scale = q4_eval(n, 0.5 * (n - 4)) + std::abs(pq);
    const double p_star = P(ls);
    if (p_star < -kPcBand * scale)
        throw SubcriticalInput("p = " + std::to_string(params.p()) +
                               " is below p_c(" + std::to_string(n) +
                               "): the eigenvalue polynomial has a complex pair");

    Spectrum sp;
    sp.lambda_star = ls;
    sp.L = singular_amplitude(params);

    const double p0 = P(0.0), p2s = P(2 * ls);
    const double step = std::max(1.0, std::abs(ls));
    const double lo = outer_bracket(params, 2 * ls, -1.0, step);
    const double hi = outer_bracket(params, 0.0, 1.0, step);

    sp.lambdas[0] = bisect_newton(P, dP, lo, 2 * ls, P(lo), p2s).root;
    sp.lambdas[3] = bisect_newton(P, dP, 0.0, hi, p0, P(hi)).root;
    // 𝒫(λ*+t) = (t² - c²)(t² - n²/4) - pQ4(m) with c = (n-4)/2, so the
    // inner pair is λ* ± √T with T the small root of a quadratic in t².
    // Near the double root this beats bracketing 𝒫, which only locates
    // each root to about √eps.
    const double c2 = 0.25 * (n - 4) * (n - 4), h2 = 0.25 * n * n;
    const double big = 0.5 * ((c2 + h2) + std::sqrt((c2 - h2) * (c2 - h2) + 4 * pq));
    const double t_small = p_star > 0 ? std::sqrt(p_star / big) : 0.0;
    if (t_small < kCloseTol * std::abs(ls)) {
        sp.lambdas[1] = ls - t_small;
        sp.lambdas[2] = ls + t_small;
    } else {
        sp.lambdas[1] = bisect_newton(P, dP, 2 * ls, ls, p2s, p_star).root;
        sp.lambdas[2] = bisect_newton(P, dP, ls, 0.0, p_star, p0).root;
    }

    sp.symmetry_residual = std::max(std::abs(sp.lambdas[0] + sp.lambdas[3] - 2 * ls),
                                    std::abs(sp.lambdas[1] + sp.lambdas[2] - 2 * ls));

    if (std::abs(sp.lambdas[2] - sp.lambdas[1]) < kDegeneracyTol * std::abs(ls)) {
        sp.degenerate = true;
        const double half = 0.5 * (sp.lambdas[2] - sp.lambdas[1]);
        sp.lambdas[1] = ls - half;
        sp.lambdas[2] = ls + half;
    }

    double worst = 0;
    for (double l : sp.lambdas) worst = std::max(worst, std::abs(P(l)));
    sp.root_residual = worst / (1.0 + std::abs(pq));
    return sp;
}

}  // namespace bihar
