#include "bihar/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bihar/errors.hpp"
#include "bihar/quartic.hpp"
#include "bihar/roots.hpp"

namespace bihar {

namespace {

double pc_defect(int n, double p)
{
    return p * q4_eval(n, 4.0 / (p - 1.0)) - q4_eval(n, 0.5 * (n - 4));
}

double pc_defect_derivative(int n, double p)
{
    const double m = 4.0 / (p - 1.0);
    return q4_eval(n, m) - p * q4_derivative(n, m) * m / (p - 1.0);
}

}  // namespace

double compute_pc(int n)
{
    if (n < 5) throw InvalidParams("compute_pc: n must be at least 5");
    double a = sobolev_exponent(n) + 1e-3;
    double fa = pc_defect(n, a);
    double b = 2 * a;
    double fb = pc_defect(n, b);
    while (fb > 0) {
        if (b > kPcProbeLimit)
            throw NoPcValue("p_c = +inf for n = " + std::to_string(n) +
                            ": the defining inequality holds up to p = 1e6 (p_c is finite iff n >= 13)");
        a = b;
        fa = fb;
        b *= 2;
        fb = pc_defect(n, b);
    }
    return bisect_newton([n](double p) { return pc_defect(n, p); },
                         [n](double p) { return pc_defect_derivative(n, p); }, a, b, fa, fb)
        .root;
}

double rk_eval(int n, int k, double p)
{
    const double ratio = (k - 1.0) / (k + 1.0);
    if (p == 1.0) return 256.0 * std::pow(ratio, 4) - 256.0;
    const double m = 4.0 / (p - 1.0);
    const double d = p - 1.0;
    const double inner = q4_eval(n, ratio * m + (n - 4.0) / (k + 1.0)) - p * q4_eval(n, m);
    return d * d * d * d * inner;
}

double tail_limit(int n, int k)
{
    return q4_eval(n, (n - 4.0) / (k + 1.0)) - 8.0 * (n - 2.0) * (n - 4.0);
}

double f_quartic(int n, double k)
{
    if (k == -1.0) return 2.0 * std::pow(n - 4.0, 3);
    const double kp = k + 1.0;
    const double tail = q4_eval(n, (n - 4.0) / kp) - 8.0 * (n - 2.0) * (n - 4.0);
    return 2.0 * kp * kp * kp * kp / (n - 4.0) * tail;
}

int ladder_length_formula(int n)
{
    if (n <= 12) throw InvalidParams("ladder length is defined for n >= 13");
    // integer division is floor here since both numerators are positive
    return n <= 19 ? (n - 10) / 2 : (n - 9) / 2;
}

ParityReport parity_boundary_check(int n)
{
    if (n < 13 || n % 2 == 0)
        throw InvalidParams("parity boundary check needs odd n >= 13");
    ParityReport r;
    r.n = n;
    r.k = 0.5 * (n - 9);
    r.direct = f_quartic(n, r.k);
    const double nn = n;
    r.factored = 0.5 * (nn - 1) * (nn * nn * nn - 33 * nn * nn + 312 * nn - 892);
    r.rel_diff = std::abs(r.direct - r.factored) / std::max(1.0, std::abs(r.factored));
    r.agree = r.rel_diff < 1e-8;
    r.positive = r.direct > 0;
    r.expected_positive = n >= 20;
    return r;
}

int count_sign_changes(int n, int k, double from, double to, int points)
{
    int changes = 0;
    double prev = rk_eval(n, k, from);
    const double ratio = std::log(to / from);
    for (int i = 1; i < points; ++i) {
        const double p = from * std::exp(ratio * i / (points - 1));
        const double v = rk_eval(n, k, p);
        if (v != 0 && prev != 0 && (v > 0) != (prev > 0)) ++changes;
        if (v != 0) prev = v;
    }
    return changes;
}

CriticalLadder compute_ladder(int n, int uniqueness_grid)
{
    if (n <= 12) throw InvalidParams("compute_ladder: n must be at least 13");
    CriticalLadder lad;
    lad.n = n;
    lad.p_c = compute_pc(n);
    lad.rungs.push_back(lad.p_c);
    lad.tail_limits.push_back(tail_limit(n, 1));

    for (int k = 2;; ++k) {
        const double tl = tail_limit(n, k);
        lad.tail_limits.push_back(tl);
        const double at_pc = rk_eval(n, k, lad.p_c);
        if (!(at_pc < 0))
            throw LadderMismatch("R_" + std::to_string(k) + "(p_c) is not negative for n = " +
                                 std::to_string(n));
        if (tl <= 0) {
            const int extra = count_sign_changes(n, k, lad.p_c, kPcProbeLimit, uniqueness_grid);
            if (extra != 0)
                throw LadderMismatch("R_" + std::to_string(k) +
                                     " changes sign above p_c despite a non-positive tail limit");
            break;
        }
        double a = lad.p_c, fa = at_pc;
        double b = 2 * a, fb = rk_eval(n, k, b);
        while (fb <= 0) {
            if (b > 1e15) throw LadderMismatch("no upper bracket for rung " + std::to_string(k));
            a = b;
            fa = fb;
            b *= 2;
            fb = rk_eval(n, k, b);
        }
        const double pk = bisect([n, k](double p) { return rk_eval(n, k, p); }, a, b, fa, fb).root;
        const int changes = count_sign_changes(n, k, lad.p_c, std::max(kPcProbeLimit, 10 * pk),
                                               uniqueness_grid);
        if (changes != 1)
            throw LadderMismatch("R_" + std::to_string(k) + " has " + std::to_string(changes) +
                                 " sign changes above p_c for n = " + std::to_string(n));
        lad.rungs.push_back(pk);
    }
    lad.N = static_cast<int>(lad.rungs.size());
    const int formula = ladder_length_formula(n);
    if (lad.N != formula)
        throw LadderMismatch("computed ladder length " + std::to_string(lad.N) +
                             " differs from closed form " + std::to_string(formula) +
                             " for n = " + std::to_string(n));
    return lad;
}

}  // namespace bihar
