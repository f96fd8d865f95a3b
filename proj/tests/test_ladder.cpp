#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bihar/errors.hpp"
#include "bihar/ladder.hpp"
#include "bihar/quartic.hpp"
#include "bihar/spectrum.hpp"

using namespace bihar;

namespace {

// Expanded quartic in k obtained by clearing (k+1)^4 by hand:
// F(k) = 2(n-4) k (2k+n-2)((n-2)k+2) - 16(n-2)(k+1)^4.
double f_expanded(int n, double k)
{
    return 2.0 * (n - 4) * k * (2 * k + n - 2) * ((n - 2) * k + 2) -
           16.0 * (n - 2) * std::pow(k + 1, 4);
}

}  // namespace

TEST_CASE("p_c regression fixtures (50-digit reference)")
{
    CHECK(compute_pc(13) == doctest::Approx(28.172379819867102823).epsilon(1e-13));
    CHECK(compute_pc(14) == doctest::Approx(9.1248612608103623255).epsilon(1e-13));
    CHECK(compute_pc(20) == doctest::Approx(2.4845411272422598975).epsilon(1e-13));
    CHECK(compute_pc(30) == doctest::Approx(1.602208271617087293).epsilon(1e-13));
}

TEST_CASE("p_c is the defining equality and the spectrum degenerates there")
{
    for (int n = 13; n <= 60; ++n) {
        const double pc = compute_pc(n);
        CHECK(pc > sobolev_exponent(n));
        const double lhs = pc * q4_eval(n, 4.0 / (pc - 1.0));
        const double rhs = q4_eval(n, 0.5 * (n - 4));
        CHECK(std::abs(lhs - rhs) < 1e-8 * rhs);
        ProblemParams pp(n, pc);
        CHECK(std::abs(eigen_poly_eval(pp, pp.lambda_star())) < 1e-8 * rhs);
    }
}

TEST_CASE("p_c is the first sign change above the Sobolev exponent")
{
    for (int n : {13, 16, 31, 60}) {
        const double ps = sobolev_exponent(n), pc = compute_pc(n);
        for (int i = 1; i < 2000; ++i) {
            const double p = ps + (pc - ps) * i / 2000.0;
            CHECK(p * q4_eval(n, 4.0 / (p - 1)) > q4_eval(n, 0.5 * (n - 4)));
        }
    }
}

TEST_CASE("no finite p_c for n <= 12")
{
    CHECK_THROWS_AS(compute_pc(12), NoPcValue);
    CHECK_THROWS_AS(compute_pc(5), NoPcValue);
    CHECK_THROWS_AS(compute_pc(4), InvalidParams);
}

TEST_CASE("R_k anchor values")
{
    for (int n : {13, 18, 33}) {
        for (int k = 1; k <= 6; ++k) {
            const double r = (k - 1.0) / (k + 1.0);
            CHECK(rk_eval(n, k, 1.0) == doctest::Approx(256 * std::pow(r, 4) - 256));
            CHECK(rk_eval(n, k, 1.0) < 0);
            CHECK(rk_eval(n, k, -1.0) ==
                  doctest::Approx(16 * q4_eval(n, n / (k + 1.0) - 2)).epsilon(1e-12));
            const double pn = n / (n - 4.0);
            const double expect = std::pow(4.0 / (n - 4), 4) * q4_eval(n, k * (n - 4.0) / (k + 1));
            CHECK(rk_eval(n, k, pn) == doctest::Approx(expect).epsilon(1e-10));
            CHECK(rk_eval(n, k, pn) > 0);
        }
    }
}

TEST_CASE("R_k approaches the removable value at p = 1")
{
    for (int k : {1, 3}) {
        const double lim = rk_eval(15, k, 1.0);
        CHECK(rk_eval(15, k, 1.0 + 1e-6) == doctest::Approx(lim).epsilon(1e-4));
    }
}

TEST_CASE("tail limit values")
{
    CHECK(tail_limit(13, 1) == doctest::Approx(63.5625));
    // Q4(3) = 3·5·(−8)·(−6) = 720 for n = 13
    CHECK(q4_eval(13, 3.0) == 720.0);
    CHECK(tail_limit(13, 2) == doctest::Approx(-72.0));
    CHECK(tail_limit(13, 0) == doctest::Approx(-8.0 * 11 * 9));
    for (int n = 13; n <= 40; ++n)
        for (int k = 1; k <= n; ++k)
            CHECK((tail_limit(n, k) > 0) == (f_quartic(n, k) > 0));
}

TEST_CASE("tail limit is the p -> inf limit of R_k / p^4")
{
    for (int n = 13; n <= 40; n += 3)
        for (int k = 1; k <= 8; ++k) {
            const double tl = tail_limit(n, k);
            if (tl == 0) continue;
            const double p = 1e8;
            CHECK(std::abs(rk_eval(n, k, p) / std::pow(p, 4) - tl) < 1e-3 * std::abs(tl));
        }
}

TEST_CASE("F quartic closed forms")
{
    for (int n = 13; n <= 60; ++n) {
        const double x = n;
        CHECK(f_quartic(n, -1.0) == doctest::Approx(2 * std::pow(x - 4, 3)));
        CHECK(f_quartic(n, 1.0) ==
              doctest::Approx(2 * x * x * x - 8 * x * x - 256 * x + 512).epsilon(1e-12));
        const double hi = f_quartic(n, x / 2 - 5);
        CHECK(hi == doctest::Approx(2 * std::pow(x, 4) - 60 * std::pow(x, 3) + 608 * x * x -
                                    2336 * x + 2432)
                        .epsilon(1e-10));
        CHECK(hi > 0);
        const double lo = f_quartic(n, x / 2 - 4);
        CHECK(lo == doctest::Approx(-std::pow(x, 4) + 18 * std::pow(x, 3) - 124 * x * x + 416 * x -
                                    608)
                        .epsilon(1e-10));
        CHECK(lo < 0);
        for (double k : {-7.3, -0.999, -0.5, 0.0, 2.25, 11.0})
            CHECK(f_quartic(n, k) == doctest::Approx(f_expanded(n, k)).epsilon(1e-9));
    }
}

TEST_CASE("ladder length formula")
{
    CHECK(ladder_length_formula(13) == 1);
    CHECK(ladder_length_formula(19) == 4);
    CHECK(ladder_length_formula(20) == 5);
    CHECK(ladder_length_formula(21) == 6);
    CHECK_THROWS_AS(ladder_length_formula(12), InvalidParams);
}

TEST_CASE("parity boundary check")
{
    const ParityReport r13 = parity_boundary_check(13);
    CHECK(r13.factored == doctest::Approx(-1296.0));
    CHECK(r13.direct == doctest::Approx(-1296.0));
    CHECK(r13.ok());
    CHECK_FALSE(r13.positive);
    CHECK(parity_boundary_check(21).positive);
    CHECK_FALSE(parity_boundary_check(19).positive);
    for (int n = 13; n <= 61; n += 2) CHECK(parity_boundary_check(n).ok());
    CHECK_THROWS_AS(parity_boundary_check(14), InvalidParams);
}

TEST_CASE("ladder rungs (50-digit reference)")
{
    const CriticalLadder l13 = compute_ladder(13);
    CHECK(l13.N == 1);
    CHECK(l13.rungs.size() == 1);
    CHECK(l13.tail_limits.size() == 2);
    CHECK(l13.tail_limits[1] < 0);

    const CriticalLadder l20 = compute_ladder(20);
    const double ref20[] = {2.4845411272422598975, 2.7425472963942857042, 3.4110049881280023539,
                            5.0300393968226018401, 13.016552639689653841};
    REQUIRE(l20.N == 5);
    for (int i = 0; i < 5; ++i) CHECK(l20.rungs[i] == doctest::Approx(ref20[i]).epsilon(1e-11));

    const CriticalLadder l21 = compute_ladder(21);
    REQUIRE(l21.N == 6);
    CHECK(l21.rungs[5] == doctest::Approx(218.46677573470920786).epsilon(1e-10));
}

TEST_CASE("rungs satisfy lambda2 = k lambda3 and R_k(p_k) = 0")
{
    for (int n = 13; n <= 40; ++n) {
        const CriticalLadder lad = compute_ladder(n);
        CHECK(lad.N == ladder_length_formula(n));
        for (int k = 2; k <= lad.N; ++k) {
            const double pk = lad.rungs[k - 1];
            CHECK(pk > lad.rungs[k - 2]);
            CHECK(std::abs(rk_eval(n, k, pk)) < 1e-8 * std::pow(pk, 4));
            const Spectrum sp = compute_spectrum(ProblemParams(n, pk));
            CHECK(std::abs(sp.l2() - k * sp.l3()) < 1e-6 * std::abs(k * sp.l3()));
            CHECK(lad.tail_limits[k - 1] > 0);
        }
        CHECK(lad.tail_limits[lad.N] < 0);
    }
}

TEST_CASE("rung root count on a 1e4-point geometric grid")
{
    for (int n = 13; n <= 40; ++n) {
        const CriticalLadder lad = compute_ladder(n);
        for (int k = 2; k <= lad.N + 1; ++k) {
            const double top = k <= lad.N ? std::max(1e6, 10 * lad.rungs[k - 1]) : 1e6;
            CHECK(count_sign_changes(n, k, lad.p_c, top, 10000) == (k <= lad.N ? 1 : 0));
        }
    }
}
