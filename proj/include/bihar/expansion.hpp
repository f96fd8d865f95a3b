#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bihar/ladder.hpp"
#include "bihar/radial.hpp"
#include "bihar/spectrum.hpp"

namespace bihar {

/// Variation-of-parameters form of (∂-λ1)(∂-λ2)(∂-λ3)Z = h from s0:
///
///   Z(s) = Σ αᵢ Eᵢ(s-s0) + Σ βᵢ ∫_{s0}^{s} Kᵢ(s-τ) h(τ) dτ
///
/// Nondegenerate: Eᵢ = Kᵢ = e^{λᵢ t} and βᵢ = 1/∏_{j≠i}(λᵢ-λⱼ).
/// Degenerate (λ2 = λ3 = μ): E = (e^{λ1 t}, e^{μt}, t e^{μt}), K = E, and
/// β = (1/(λ1-μ)², -1/(λ1-μ)², 1/(μ-λ1)).
struct VariationKernel {
    double s0 = 0;
    std::array<double, 3> lambdas{};
    std::array<double, 3> alphas{};
    std::array<double, 3> betas{};
    bool degenerate = false;

    /// Eᵢ(t) (also the convolution kernel Kᵢ).
    double basis(int i, double t) const;
};

/// βs from the spectrum; αs are zero until a representation fit fills them.
VariationKernel variation_kernel(const Spectrum& spec, double s0);

struct RepresentationOptions {
    std::optional<double> s_hi;
    bool zero_forcing = false;  ///< replace g(Y) by 0 (sensitivity runs)
    double max_condition = 1e12;
};

struct RepresentationResult {
    double deviation = 0;  ///< max|Z - Z_rep| / max|Z| on the window
    double condition = 0;  ///< of the column-scaled homogeneous design
    VariationKernel kernel;
    std::vector<double> reconstructed;  ///< NaN outside the window
};

/// Fits the αs of `kern` by least squares so that the representation matches
/// the grid Z from kern.s0 onwards. Throws IllConditioned above
/// max_condition, GridTooCoarse if the window holds fewer than 8 nodes.
RepresentationResult representation_check(const RadialSolution& sol, const Spectrum& spec,
                                          const VariationKernel& kern,
                                          const RepresentationOptions& opts = {});

enum class RegimeKind { A, B, C };

struct Regime {
    RegimeKind kind = RegimeKind::A;
    int k = 1;
};

std::string to_string(const Regime& r);

inline constexpr double kRungTol = 1e-4;

/// Throws SubcriticalInput when p < p_c - rung_tol.
Regime detect_regime(const ProblemParams& params, const CriticalLadder& ladder,
                     double rung_tol = kRungTol);

struct FitWindow {
    double s_lo = 0;
    double s_hi = 0;
};

struct FitOptions {
    /// Highest j kept among the e^{jλ3 s} terms of regime (a).
    int max_power = 4;
    int slope_blocks = 10;
    double slack = 0.15;  ///< times |λ3|
};

struct Coefficient {
    std::string name;
    double value = 0;
    /// hypot(stat_error, trunc_error)
    double std_error = 0;
    /// σ²(AᵀA)⁻¹ from the weighted residual.
    double stat_error = 0;
    /// Shift of the coefficient when the leading remainder term joins the basis.
    double trunc_error = 0;
    bool resolved = false;  ///< |value| > std_error
};

struct ExpansionFit {
    Regime regime;
    FitWindow window;
    std::vector<Coefficient> coefficients;  ///< a0 first
    double a0 = 0;
    double residual_slope = 0;
    double theoretical_slope = 0;
    double slope_bound = 0;  ///< theoretical_slope + slack·|λ3|
    double condition = 0;
    std::size_t nodes = 0;

    bool slope_ok() const { return residual_slope <= slope_bound; }
    const Coefficient& coefficient(const std::string& name) const;
};

/// Least-squares fit of r^m φ on the window with the regime's basis. Columns
/// use σ = s - s_lo and are scaled to unit maximum; the solve is an SVD.
/// Throws WindowTooShort or IllConditioned.
ExpansionFit fit_expansion(const RadialSolution& sol, const Spectrum& spec, const Regime& regime,
                           const FitWindow& window, const FitOptions& opts = {});

struct StabilityReport {
    ExpansionFit base, shifted;
    /// |Δcoefficient| / max(SE_base, SE_shifted), per coefficient.
    std::vector<double> ratios;
    double worst = 0;
    bool ok(double limit = 3.0) const { return worst < limit; }
};

/// Refits on the window moved right by shift_fraction of its width.
StabilityReport window_shift_stability(const RadialSolution& sol, const Spectrum& spec,
                                       const Regime& regime, const FitWindow& window,
                                       double shift_fraction = 0.1, const FitOptions& opts = {});

/// Least-squares slope of log|Y| (log|Y|/s when divide_by_s) over [s_lo, s_hi].
double decay_slope(const RadialSolution& sol, double s_lo, double s_hi, bool divide_by_s);

inline constexpr double kWindowOnset = 1e-3;
inline constexpr double kWindowWidth = 2.0;

/// Default fit window: starts at the first node with |Y| <= kWindowOnset·L
/// and spans kWindowWidth in s. Earlier the expansion is not yet asymptotic;
/// much later the remainder sinks below the solution's rounding level.
FitWindow default_window(const RadialSolution& sol, const Spectrum& spec);

}  // namespace bihar
