#pragma once

#include <array>

#include "bihar/quartic.hpp"

namespace bihar {

/// Real spectrum of the linearization about the singular solution.
struct Spectrum {
    double lambda_star = 0;
    /// λ1 < λ2 <= λ3 < 0 < λ4
    std::array<double, 4> lambdas{};
    /// Singular amplitude Q4(m)^{1/(p-1)}.
    double L = 0;
    bool degenerate = false;
    /// max(|λ1+λ4-2λ*|, |λ2+λ3-2λ*|) measured on the raw roots, before any
    /// symmetrisation.
    double symmetry_residual = 0;
    /// max_i |𝒫(λ_i)| / (1 + |p Q4(m)|).
    double root_residual = 0;

    double l1() const { return lambdas[0]; }
    double l2() const { return lambdas[1]; }
    double l3() const { return lambdas[2]; }
    double l4() const { return lambdas[3]; }
};

/// 𝒫(λ) = Q4(m-λ) - p Q4(m).
double eigen_poly_eval(const ProblemParams& params, double lambda);

/// d𝒫/dλ.
double eigen_poly_derivative(const ProblemParams& params, double lambda);

/// Q4(m)^{1/(p-1)}, via exp/log after checking Q4(m) > 0.
double singular_amplitude(const ProblemParams& params);

/// Relative band below which 𝒫(λ*) < 0 is still treated as the double root
/// at p_c rather than as subcritical input.
inline constexpr double kPcBand = 1e-12;

/// Relative gap |λ3-λ2|/|λ*| under which the pair is declared degenerate.
inline constexpr double kDegeneracyTol = 1e-6;
/// Below this half-gap (relative to |λ*|) the inner pair comes from the
/// even reduction of 𝒫 rather than from bracketing.
inline constexpr double kCloseTol = 1e-3;

/// Four real roots of 𝒫 by bisection on the brackets (-inf,2λ*), (2λ*,λ*],
/// [λ*,0), (0,inf). Throws SubcriticalInput when 𝒫(λ*) < 0.
Spectrum compute_spectrum(const ProblemParams& params);

}  // namespace bihar
