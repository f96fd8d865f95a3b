#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bihar/errors.hpp"
#include "bihar/ladder.hpp"
#include "bihar/radial.hpp"
#include "bihar/spectrum.hpp"

using namespace bihar;

namespace {

const RadialSolution& reference()
{
    static const RadialSolution sol = shoot(ProblemParams(13, compute_pc(13) + 0.5), 1.0);
    return sol;
}

}  // namespace

TEST_CASE("zero Laplacian at the origin blows up")
{
    const ProblemParams pp(13, compute_pc(13) + 0.5);
    const IntegrationResult res = integrate_radial(pp, 1.0, 0.0, 1e4);
    CHECK(res.outcome == Outcome::BlowUp);
    REQUIRE(res.event_r.has_value());
    CHECK(*res.event_r > 0);
}

TEST_CASE("a strongly negative Laplacian loses positivity")
{
    const ProblemParams pp(13, compute_pc(13) + 0.5);
    CHECK(integrate_radial(pp, 1.0, -100.0, 1e4).outcome == Outcome::SignLoss);
}

TEST_CASE("blow-up radius follows the scaling kappa^m phi(kappa r)")
{
    const ProblemParams pp(14, compute_pc(14) + 1.0);
    const double m = pp.m(), v0 = -0.01;
    const auto base = integrate_radial(pp, 1.0, v0, 1e4);
    REQUIRE(base.outcome == Outcome::BlowUp);
    for (double kappa : {0.5, 2.0}) {
        const auto scaled =
            integrate_radial(pp, std::pow(kappa, m), v0 * std::pow(kappa, m + 2), 1e4);
        REQUIRE(scaled.outcome == Outcome::BlowUp);
        CHECK(*scaled.event_r * kappa == doctest::Approx(*base.event_r).epsilon(1e-6));
    }
}

TEST_CASE("bad inputs")
{
    const ProblemParams pp(13, compute_pc(13) + 0.5);
    CHECK_THROWS_AS(shoot(pp, 0.0), InvalidParams);
    CHECK_THROWS_AS(integrate_radial(pp, -1.0, 0.0, 1e4), InvalidParams);
    ShootControls c;
    c.r_max = 1e-3;
    CHECK_THROWS_AS(integrate_radial(pp, 1.0, 0.0, c.r_max, c), InvalidParams);
}

TEST_CASE("shooting reaches the singular profile")
{
    const RadialSolution& sol = reference();
    // regression fixture
    CHECK(sol.v0 == doctest::Approx(-0.2668911534367562).epsilon(1e-10));
    CHECK(sol.r.back() >= 1e4);
    CHECK(std::abs(sol.W.back() / sol.L - 1) < 1e-8);
    CHECK(sol.error_estimate < 1e-8);
    for (std::size_t j = 0; j < sol.size(); ++j) {
        CHECK(sol.phi[j] > 0);
        CHECK(sol.Y[j] < 0);
        if (j > 0) CHECK(sol.Y[j] >= sol.Y[j - 1]);
        CHECK(sol.W[j] == doctest::Approx(std::pow(sol.r[j], sol.params.m()) * sol.phi[j]).epsilon(1e-12));
    }
    CHECK(emden_fowler_residual(sol) < 1e-4);
}

TEST_CASE("Emden-Fowler residual detects a perturbed profile")
{
    const RadialSolution& sol = reference();
    const double clean = emden_fowler_residual(sol);
    auto W = sol.W;
    for (std::size_t j = 0; j < W.size(); ++j) W[j] *= 1 + 1e-3 * std::sin(3 * sol.s[j]);
    CHECK(emden_fowler_residual(sol.params, sol.h, W) > 10 * clean);
    CHECK_THROWS_AS(emden_fowler_residual(sol.params, sol.h, std::vector<double>(10, 1.0)), GridTooCoarse);
}

TEST_CASE("direct and rescaled shooting agree")
{
    const ProblemParams pp(15, compute_pc(15) + 1.0);
    ShootControls c;
    const RadialSolution a = shoot(pp, 2.0, c);
    c.rescale_from_unit = false;
    const RadialSolution b = shoot(pp, 2.0, c);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); j += 50) CHECK(std::abs(a.phi[j] / b.phi[j] - 1) < 1e-5);
    CHECK(a.v0 == doctest::Approx(b.v0).epsilon(1e-8));
}

TEST_CASE("Y integral identity holds and is sensitive to lambda4")
{
    const RadialSolution& sol = reference();
    const Spectrum sp = compute_spectrum(sol.params);
    const double clean = y_integral_identity_check(sol, sp);
    CHECK(clean < 1e-3);
    IdentityOptions o;
    o.lambda4 = sp.l4() * 1.01;
    CHECK(y_integral_identity_check(sol, sp, o) > 10 * clean);
}

TEST_CASE("Z vanishes on a pure unstable mode")
{
    RadialSolution sol(ProblemParams(13, compute_pc(13) + 0.5));
    const double lam4 = 1.3;
    sol.h = 0.01;
    for (int j = 0; j < 200; ++j) {
        sol.s.push_back(j * sol.h);
        sol.Y.push_back(2.0 * std::exp(lam4 * j * sol.h));
    }
    populate_z(sol, lam4);
    REQUIRE(sol.Z.size() == sol.Y.size());
    CHECK(std::isnan(sol.Z[0]));
    for (std::size_t j = 2; j + 2 < sol.size(); ++j) CHECK(std::abs(sol.Z[j]) < 1e-8 * sol.Y[j]);
}
