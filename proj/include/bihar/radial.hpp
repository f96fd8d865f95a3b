#pragma once

#include <optional>
#include <vector>

#include "bihar/quartic.hpp"
#include "bihar/spectrum.hpp"

namespace bihar {

/// Numerical controls for the radial integrator and the shooter. Lengths are
/// in the natural units of the α = 1 problem; a direct solve at another α
/// scales them by α^{-1/m}.
struct ShootControls {
    double rtol = 1e-13;          ///< integrator relative tolerance
    double r_start = 1e-4;        ///< Taylor seed radius
    double r_switch = 10.0;       ///< hand-over from the r chart to s = log r
    double r_max = 1e4;
    double ds = 1e-2;             ///< output grid spacing in s
    double s_start = -4.0;        ///< first output node
    /// BlowUp once φ > blowup_factor·α, or when the step size collapses
    /// with φ > α (for large p the singularity is too steep to reach the cap).
    double blowup_factor = 1e8;
    double v0_probe_lo = 1e-6;    ///< probe |Δφ(0)| on [lo, hi], geometric
    double v0_probe_hi = 1e3;
    int probes_per_decade = 10;
    int max_bisection = 200;
    /// Accepted relative spread |Y_a - Y_b| / |Y| between the two bracket
    /// orbits before the shooter re-targets the stable manifold.
    double stage_tol = 1e-9;
    double target_tol = 1e-2;     ///< required |r^m φ(r_max)/L - 1|
    bool rescale_from_unit = true;
};

enum class Outcome { Persisted, BlowUp, SignLoss };

const char* to_string(Outcome o);

/// A radial solution sampled on a uniform grid in s = log r.
struct RadialSolution {
    explicit RadialSolution(ProblemParams pp) : params(pp) {}

    ProblemParams params;
    double alpha = 1;
    double v0 = 0;
    double L = 0;
    double h = 0;  ///< grid spacing in s

    std::vector<double> s, r;
    std::vector<double> phi, dphi, lap, dlap;
    /// W = r^m φ and Y = W - L; dY, d2Y, d3Y are s-derivatives of Y taken
    /// from the integrator state.
    std::vector<double> W, Y, dY, d2Y, d3Y;
    /// Z = Y' - λ4 Y by a 5-point stencil; NaN on the two end nodes at each
    /// side, or everywhere when no real spectrum exists.
    std::vector<double> Z;

    // shooter diagnostics
    int stages = 0;
    int bisection_steps = 0;
    /// Estimated absolute error of r^m φ at the last node.
    double error_estimate = 0;
    std::vector<double> stage_starts;

    std::size_t size() const { return s.size(); }
};

struct IntegrationResult {
    Outcome outcome;
    /// Radius where the BlowUp/SignLoss threshold was crossed.
    std::optional<double> event_r;
    RadialSolution solution;
};

/// Integrates Δ²φ = φ^p from the regular start φ(0) = α, Δφ(0) = v0 to r_max.
/// The first-order radial system is used up to r_switch, then the
/// Emden-Fowler form in s = log r. Throws StepFailure when the step size
/// underflows with φ <= α.
IntegrationResult integrate_radial(const ProblemParams& params, double alpha, double v0,
                                   double r_max, const ShootControls& controls = {});

/// Entire positive solution with φ(0) = α, found by bisection on Δφ(0).
///
/// Bisection alone only pins Δφ(0) to rounding, and the unstable mode
/// (growth e^{λ4 s}) amplifies that error. So once the two bracket orbits
/// drift apart by stage_tol relative to |Y|, the shooter restarts from the
/// averaged state and bisects again along the unstable eigenvector. Each
/// restart extends the resolved range by about log(1/stage_tol)/(λ4-λ3).
///
/// Throws BracketNotFound, NoConvergence or StepFailure.
RadialSolution shoot(const ProblemParams& params, double alpha, const ShootControls& controls = {});

/// Fills sol.Z from sol.Y.
void populate_z(RadialSolution& sol, double lambda4);

/// max_i |Q4(m-∂s)W - W^p| / max W^p on interior nodes, with 9-point stencils.
/// Throws GridTooCoarse with fewer than 9 interior nodes.
double emden_fowler_residual(const ProblemParams& params, double h, const std::vector<double>& W);
double emden_fowler_residual(const RadialSolution& sol);

struct IdentityOptions {
    /// Override for λ4 in the kernel (sensitivity checks).
    std::optional<double> lambda4;
    /// Probe window in s; defaults to every node with a defined Z before
    /// the truncation point.
    std::optional<double> s_lo, s_hi;
    double truncation = 1e-12;
};

/// Compares Y(s) with -∫_s^∞ e^{λ4(s-τ)} Z(τ) dτ. The integral is truncated
/// where |Z| < truncation·max|Z| and closed with the pure e^{λ3 τ} tail.
/// Returns the max deviation over the window normalised by max|Y| there.
double y_integral_identity_check(const RadialSolution& sol, const Spectrum& spec,
                                 const IdentityOptions& opts = {});

}  // namespace bihar
