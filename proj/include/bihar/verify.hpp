#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bihar/expansion.hpp"
#include "bihar/radial.hpp"
#include "bihar/spectrum.hpp"

namespace bihar::verify {

struct CheckResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0;
    double budget = 0;  ///< wall-clock limit in seconds, 0 for none
};

/// (n, p_c + dp) with α = 1.
struct ShootingCase {
    int n;
    double dp;
};

const std::vector<ShootingCase>& shooting_cases();

struct ShootingRun {
    ShootingCase c;
    double p = 0;
    Spectrum spec;
    Regime regime;
    std::optional<RadialSolution> sol;  ///< empty on failure
    double seconds = 0;
    std::string error;
};

/// The shooting cases, run concurrently on `jobs` threads.
std::vector<ShootingRun> run_shooting_cases(int jobs, const ShootControls& controls = {});

CheckResult spectral_identities(int jobs);
CheckResult double_root(int jobs);
CheckResult ladder_agreement(int jobs);
CheckResult sign_criterion(int jobs);
CheckResult sign_tables();
CheckResult shooting_convergence(const std::vector<ShootingRun>& runs);
CheckResult decay_rates(const std::vector<ShootingRun>& runs);
CheckResult expansion_fits(const std::vector<ShootingRun>& runs);
CheckResult identities(const std::vector<ShootingRun>& runs);

/// Residuals of the variation kernel against the forcing e^{μτ}:
/// closed_form compares the quadrature with Σβᵢ(e^{μs} - e^{λᵢ(s-s0)+μ s0})/(μ-λᵢ);
/// ode applies (∂-λ1)(∂-λ2)(∂-λ3) by 9-point stencils and compares with the
/// forcing. Both are normalised by the maximum of the reference.
struct KernelOracle {
    double closed_form = 0;
    double ode = 0;
};

KernelOracle kernel_oracle(const Spectrum& spec, double mu = -1.0, double h = 0.01, double span = 10.0);

/// Criteria 1-9 in order.
std::vector<CheckResult> acceptance_suite(int jobs);

/// Property checks that sit outside the numbered criteria.
std::vector<CheckResult> property_suite(int jobs);

/// "PASS [id] title: detail"; timings go to `timing` when non-null.
void print_results(std::ostream& out, const std::vector<CheckResult>& results, std::ostream* timing);

}  // namespace bihar::verify
