#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "bihar/errors.hpp"
#include "bihar/ladder.hpp"
#include "bihar/quartic.hpp"
#include "bihar/spectrum.hpp"

using namespace bihar;

namespace {

// Roots of 𝒫 from the companion matrix of its expanded monomial form.
// Independent of the bracketed route in compute_spectrum.
std::array<double, 4> companion_roots(const ProblemParams& pp)
{
    const double m = pp.m();
    const int n = pp.n();
    const double a[4] = {m, m + 2, m + 2 - n, m + 4 - n};
    // ∏(a_i - λ) = λ^4 - e1 λ^3 + e2 λ^2 - e3 λ + e4
    double e1 = 0, e2 = 0, e3 = 0, e4 = a[0] * a[1] * a[2] * a[3];
    for (int i = 0; i < 4; ++i) {
        e1 += a[i];
        for (int j = i + 1; j < 4; ++j) {
            e2 += a[i] * a[j];
            for (int k = j + 1; k < 4; ++k) e3 += a[i] * a[j] * a[k];
        }
    }
    const double c[4] = {e4 - pp.p() * e4, -e3, e2, -e1};
    Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
    for (int i = 1; i < 4; ++i) C(i, i - 1) = 1;
    for (int i = 0; i < 4; ++i) C(i, 3) = -c[i];
    Eigen::EigenSolver<Eigen::Matrix4d> es(C);
    std::array<double, 4> r{};
    for (int i = 0; i < 4; ++i) r[i] = es.eigenvalues()[i].real();
    std::sort(r.begin(), r.end());
    return r;
}

}  // namespace

TEST_CASE("q4 factored values")
{
    CHECK(q4_eval(13, 0.0) == 0.0);
    CHECK(q4_eval(13, 9.0) == 0.0);
    CHECK(q4_eval(13, -2.0) == 0.0);
    CHECK(q4_eval(13, 11.0) == 0.0);
    CHECK(q4_eval(13, 2.0) == 504.0);  // 2·4·(−9)·(−7)
    CHECK(q4_eval(13, 4.5) == doctest::Approx(855.5625));
}

TEST_CASE("q4 sign on (0, n-4) and (-2, 0)")
{
    std::mt19937_64 rng(7);
    for (int n : {13, 20, 47}) {
        std::uniform_real_distribution<double> in(0.0, n - 4.0), neg(-2.0, 0.0);
        for (int i = 0; i < 100; ++i) {
            const double x = in(rng), y = neg(rng);
            if (x > 0 && x < n - 4) CHECK(q4_eval(n, x) > 0);
            if (y > -2 && y < 0) CHECK(q4_eval(n, y) < 0);
        }
    }
}

TEST_CASE("q4 derivative matches central difference")
{
    for (double a : {-3.0, 0.7, 4.5, 12.25}) {
        const double h = 1e-5;
        const double fd = (q4_eval(17, a + h) - q4_eval(17, a - h)) / (2 * h);
        CHECK(q4_derivative(17, a) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("params validation")
{
    CHECK_THROWS_AS(ProblemParams(4, 10.0), InvalidParams);
    CHECK_THROWS_AS(ProblemParams(13, 17.0 / 9.0), InvalidParams);
    CHECK_THROWS_AS(ProblemParams(13, 1.5), InvalidParams);
    ProblemParams pp(13, 3.0);
    CHECK(pp.m() == 2.0);
}

TEST_CASE("eigen polynomial symmetry and anchor values")
{
    const double pc = compute_pc(13);
    for (double p : {pc, pc + 0.5, pc + 7.0}) {
        ProblemParams pp(13, p);
        const double ls = pp.lambda_star();
        const double at0 = eigen_poly_eval(pp, 0.0);
        CHECK(at0 == doctest::Approx((1 - p) * q4_eval(13, pp.m())).epsilon(1e-14));
        CHECK(at0 < 0);
        CHECK(eigen_poly_eval(pp, 2 * ls) == doctest::Approx(at0).epsilon(1e-12));
        CHECK(eigen_poly_eval(pp, ls) >= -1e-9);
    }
}

TEST_CASE("reflection property about lambda*")
{
    std::mt19937_64 rng(11);
    for (int n : {13, 21, 40}) {
        const double pc = compute_pc(n);
        for (double dp : {0.0, 0.3, 5.0}) {
            ProblemParams pp(n, pc + dp);
            const double ls = pp.lambda_star();
            std::uniform_real_distribution<double> d(-3 * n, 3 * n);
            for (int i = 0; i < 100; ++i) {
                const double l = d(rng);
                const double a = eigen_poly_eval(pp, l), b = eigen_poly_eval(pp, 2 * ls - l);
                CHECK(std::abs(a - b) <= 1e-10 * (std::abs(a) + std::abs(b) + 1.0));
            }
        }
    }
}

TEST_CASE("spectrum at p_c + 1 for n = 13 matches high-precision fixture")
{
    // 50-digit reference roots of 𝒫 for n = 13, p = p_c(13) + 1.
    ProblemParams pp(13, compute_pc(13) + 1.0);
    const Spectrum sp = compute_spectrum(pp);
    CHECK(sp.l1() == doctest::Approx(-12.261439122250244232).epsilon(1e-12));
    CHECK(sp.l2() == doctest::Approx(-4.5475379362384024953).epsilon(1e-12));
    CHECK(sp.l3() == doctest::Approx(-4.1684959930515037527).epsilon(1e-12));
    CHECK(sp.l4() == doctest::Approx(3.5454051929603379839).epsilon(1e-12));
    CHECK(sp.lambda_star == doctest::Approx(-4.358016964644953124).epsilon(1e-13));
    CHECK(sp.L == doctest::Approx(1.1273057815759799913).epsilon(1e-13));
    CHECK_FALSE(sp.degenerate);
    CHECK(std::abs(sp.l1() + sp.l4() - 2 * sp.lambda_star) < 1e-9);
    CHECK(std::abs(sp.l2() + sp.l3() - 2 * sp.lambda_star) < 1e-9);
}

TEST_CASE("spectrum agrees with companion-matrix oracle")
{
    for (int n : {13, 17, 25, 60}) {
        const double pc = compute_pc(n);
        for (double dp : {0.05, 1.0, 20.0}) {
            ProblemParams pp(n, pc + dp);
            const Spectrum sp = compute_spectrum(pp);
            const auto ref = companion_roots(pp);
            for (int i = 0; i < 4; ++i)
                CHECK(sp.lambdas[i] == doctest::Approx(ref[i]).epsilon(1e-7));
        }
    }
}

TEST_CASE("ordering chain, residuals and amplitude")
{
    for (int n = 13; n <= 60; n += 3) {
        const double pc = compute_pc(n);
        for (double dp : {0.0, 1e-3, 0.7, 13.0, 50.0}) {
            ProblemParams pp(n, pc + dp);
            const Spectrum sp = compute_spectrum(pp);
            const double ls = sp.lambda_star;
            CHECK(sp.l1() < 2 * ls);
            CHECK(2 * ls < sp.l2());
            CHECK(sp.l2() <= ls);
            CHECK(ls <= sp.l3());
            CHECK(sp.l3() < 0);
            CHECK(0 < sp.l4());
            CHECK(sp.root_residual < 1e-9);
            CHECK(sp.L > 0);
            CHECK(std::pow(sp.L, pp.p() - 1) == doctest::Approx(q4_eval(n, pp.m())).epsilon(1e-10));
        }
    }
}

TEST_CASE("double root at p_c")
{
    for (int n = 13; n <= 60; ++n) {
        ProblemParams pp(n, compute_pc(n));
        const Spectrum sp = compute_spectrum(pp);
        CHECK(sp.degenerate);
        CHECK(std::abs(sp.l2() - sp.lambda_star) < 1e-6);
        CHECK(std::abs(sp.l3() - sp.l2()) < 1e-5 * std::abs(sp.lambda_star));
    }
}

TEST_CASE("subcritical input is rejected")
{
    const double pc = compute_pc(13);
    CHECK_THROWS_AS(compute_spectrum(ProblemParams(13, 0.5 * (17.0 / 9.0 + pc))), SubcriticalInput);
    // n <= 12 has no finite p_c: every admissible p is subcritical
    CHECK_THROWS_AS(compute_spectrum(ProblemParams(12, 5.0)), SubcriticalInput);
}

TEST_CASE("lambda* vanishes at the Sobolev exponent")
{
    for (int n : {13, 20}) {
        const double ps = sobolev_exponent(n);
        CHECK(std::abs(4.0 / (ps - 1) - 0.5 * (n - 4)) < 1e-13);
    }
}
