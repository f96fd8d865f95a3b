#include "bihar/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "bihar/convolution.hpp"
#include "bihar/errors.hpp"
#include "bihar/kernels.hpp"
#include "bihar/ladder.hpp"
#include "bihar/nonlinearity.hpp"
#include "bihar/quartic.hpp"
#include "bihar/stencil.hpp"

namespace bihar::verify {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// Runs `body`, which fills detail and returns pass/fail; library errors fail
// the check with their message.
CheckResult timed(std::string id, std::string title, double budget,
                  const std::function<bool(std::ostringstream&)>& body)
{
    CheckResult r{std::move(id), std::move(title), false, "", 0, budget};
    std::ostringstream detail;
    const auto t0 = Clock::now();
    try {
        r.passed = body(detail);
    } catch (const std::exception& e) {
        detail << "error: " << e.what();
        r.passed = false;
    }
    r.seconds = since(t0);
    if (budget > 0 && r.seconds > budget) {
        r.passed = false;
        detail << "; over the " << budget << " s budget";
    }
    r.detail = detail.str();
    return r;
}

const std::vector<double> kSpectrumOffsets = {0.0, 0.5, 5.0, 20.0, 50.0};

}  // namespace

const std::vector<ShootingCase>& shooting_cases()
{
    static const std::vector<ShootingCase> cases = {{13, 0.5}, {15, 1.0}, {13, 0.0}};
    return cases;
}

std::vector<ShootingRun> run_shooting_cases(int jobs, const ShootControls& controls)
{
    const auto& cases = shooting_cases();
    std::vector<ShootingRun> runs(cases.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
    for (std::size_t i = 0; i < cases.size(); ++i) {
        ShootingRun& run = runs[i];
        run.c = cases[i];
        const auto t0 = Clock::now();
        try {
            const CriticalLadder lad = compute_ladder(run.c.n);
            run.p = lad.p_c + run.c.dp;
            const ProblemParams pp(run.c.n, run.p);
            run.spec = compute_spectrum(pp);
            run.regime = detect_regime(pp, lad);
            run.sol.emplace(shoot(pp, 1.0, controls));
        } catch (const std::exception& e) {
            run.error = e.what();
        }
        run.seconds = since(t0);
    }
    return runs;
}

CheckResult spectral_identities(int jobs)
{
    return timed("1", "spectral identities", 5.0, [&](std::ostringstream& d) {
        const auto cells = spectrum_grid(13, 60, kSpectrumOffsets, jobs);
        double worst_res = 0, worst_sym = 0;
        int order_fail = 0;
        for (const auto& c : cells) {
            const Spectrum& s = c.spectrum;
            worst_res = std::max(worst_res, s.root_residual);
            worst_sym = std::max(worst_sym, s.symmetry_residual);
            const double ls = s.lambda_star;
            if (!(s.l1() < 2 * ls && 2 * ls < s.l2() && s.l2() <= ls && ls <= s.l3() && s.l3() < 0 &&
                  0 < s.l4()))
                ++order_fail;
        }
        d << cells.size() << " spectra, max |P(λ)| " << fmt("%.2e", worst_res) << ", max symmetry "
          << fmt("%.2e", worst_sym) << ", ordering failures " << order_fail;
        return worst_res < 1e-9 && worst_sym < 1e-9 && order_fail == 0;
    });
}

CheckResult double_root(int jobs)
{
    return timed("2", "double root at p_c", 5.0, [&](std::ostringstream& d) {
        const auto cells = spectrum_grid(13, 60, {0.0}, jobs);
        double worst = 0;
        for (const auto& c : cells)
            worst = std::max(worst, std::abs(c.spectrum.l2() - c.spectrum.l3()) / std::abs(c.spectrum.lambda_star));
        d << "max |λ2-λ3|/|λ*| over n=13..60: " << fmt("%.2e", worst);
        return worst < 1e-5;
    });
}

CheckResult ladder_agreement(int jobs)
{
    return timed("3", "ladder length and rung coincidence", 30.0, [&](std::ostringstream& d) {
        const auto rows = ladder_sweep(13, 60, jobs);
        int mismatches = 0;
        double worst = 0;
        for (const auto& r : rows) {
            if (!r.ok()) ++mismatches;
            for (std::size_t k = 1; k <= r.rungs.size(); ++k) {
                const Spectrum sp = compute_spectrum(ProblemParams(r.n, r.rungs[k - 1]));
                worst = std::max(worst, std::abs(sp.l2() - static_cast<double>(k) * sp.l3()) / std::abs(sp.l3()));
            }
        }
        d << rows.size() << " ladders, " << mismatches << " length mismatches, max |λ2-kλ3|/|λ3| "
          << fmt("%.2e", worst);
        return mismatches == 0 && worst < 1e-5 && rows.size() == 48;
    });
}

CheckResult sign_criterion(int jobs)
{
    return timed("4", "sign criterion equivalence", 10.0, [&](std::ostringstream& d) {
        const auto samples = sign_criterion_samples(200, 20240917, jobs);
        int mismatches = 0, banded = 0;
        for (const auto& s : samples) {
            if (s.rung_distance < 1e-6) {
                ++banded;
                continue;
            }
            if (!s.agree) ++mismatches;
        }
        d << samples.size() << " samples, " << banded << " inside the rung band, " << mismatches
          << " mismatches";
        return mismatches == 0;
    });
}

CheckResult sign_tables()
{
    return timed("5", "sign tables", 10.0, [&](std::ostringstream& d) {
        int fails = 0, checks = 0;
        const auto expect = [&](bool ok) {
            ++checks;
            if (!ok) ++fails;
        };
        for (int n = 13; n <= 60; ++n) {
            const double pc = compute_pc(n);
            const int N = ladder_length_formula(n);
            for (int k = 1; k <= N + 1; ++k) {
                expect(rk_eval(n, k, 1.0) < 0);
                expect(rk_eval(n, k, n / (n - 4.0)) > 0);
                // R_1(p_c) = 0 by the definition of p_c
                if (k >= 2)
                    expect(rk_eval(n, k, pc) < 0);
                else
                    expect(std::abs(rk_eval(n, k, pc)) <
                           1e-8 * std::pow(pc - 1, 4) * q4_eval(n, 0.5 * (n - 4)));
            }
            for (int k = 1; k <= n; ++k) {
                if (n <= 2 * (k + 1)) {
                    expect(rk_eval(n, k, -1.0) <= 0);
                    expect(rk_eval(n, k, -1.0 / 3.0) > 0);
                } else {
                    expect(rk_eval(n, k, -1.0) > 0);
                }
            }
            expect(f_quartic(n, 1.0 - 0.5 * n) < 0);
            expect(f_quartic(n, -1.0) > 0);
            expect(f_quartic(n, 0.0) < 0);
            expect(f_quartic(n, 1.0) > 0);
            expect(f_quartic(n, 0.5 * n - 5) > 0);
            expect(f_quartic(n, 0.5 * n - 4) < 0);
            if (n % 2 == 1) expect(parity_boundary_check(n).ok());
        }
        d << checks << " inequalities over n=13..60, " << fails << " failures";
        return fails == 0;
    });
}

CheckResult shooting_convergence(const std::vector<ShootingRun>& runs)
{
    CheckResult r{"6", "shooting convergence", true, "", 0, 120.0};
    std::ostringstream d;
    for (const auto& run : runs) {
        r.seconds = std::max(r.seconds, run.seconds);
        d << "n=" << run.c.n << " p=p_c+" << run.c.dp << ": ";
        if (!run.sol) {
            d << "error " << run.error << "; ";
            r.passed = false;
            continue;
        }
        const RadialSolution& s = *run.sol;
        bool neg = true, mono = true;
        for (std::size_t j = 0; j < s.size(); ++j) {
            neg = neg && s.Y[j] < 0;
            if (j) mono = mono && s.Y[j] >= s.Y[j - 1];
        }
        const double ratio = std::abs(s.W.back() / s.L - 1);
        const double ef = emden_fowler_residual(s);
        const bool ok = ratio < 1e-2 && s.r.back() >= 1e4 && neg && mono && ef < 1e-4 && run.seconds < 120;
        d << "|W/L-1| " << fmt("%.1e", ratio) << " at r " << fmt("%.0f", s.r.back()) << ", Y<0 " << neg
          << ", Y nondecreasing " << mono << ", EF residual " << fmt("%.1e", ef) << "; ";
        r.passed = r.passed && ok;
    }
    r.detail = d.str();
    return r;
}

namespace {

// last decade in r of the grid
std::pair<double, double> last_decade(const RadialSolution& s) { return {s.s.back() - std::log(10.0), s.s.back()}; }

}  // namespace

CheckResult decay_rates(const std::vector<ShootingRun>& runs)
{
    return timed("7", "decay rate", 0, [&](std::ostringstream& d) {
        bool ok = true;
        for (const auto& run : runs) {
            if (!run.sol) {
                d << "n=" << run.c.n << " missing solution; ";
                ok = false;
                continue;
            }
            const bool critical = run.regime.kind == RegimeKind::C;
            const auto [lo, hi] = last_decade(*run.sol);
            const double slope = decay_slope(*run.sol, lo, hi, critical);
            const double rel = std::abs(slope / run.spec.l3() - 1);
            d << "n=" << run.c.n << " p=p_c+" << run.c.dp << (critical ? " slope(|Y|/s) " : " slope(|Y|) ")
              << fmt("%.4f", slope) << " vs λ3 " << fmt("%.4f", run.spec.l3()) << "; ";
            ok = ok && rel < 0.1;
        }
        return ok;
    });
}

CheckResult expansion_fits(const std::vector<ShootingRun>& runs)
{
    return timed("8", "expansion fit", 0, [&](std::ostringstream& d) {
        bool ok = true;
        for (const auto& run : runs) {
            if (!run.sol) {
                d << "n=" << run.c.n << " missing solution; ";
                ok = false;
                continue;
            }
            const FitWindow w = default_window(*run.sol, run.spec);
            const StabilityReport st = window_shift_stability(*run.sol, run.spec, run.regime, w);
            const ExpansionFit& f = st.base;
            const double a0 = std::abs(f.a0 / run.sol->L - 1);
            d << "n=" << run.c.n << " p=p_c+" << run.c.dp << " regime " << to_string(run.regime) << " window ["
              << fmt("%.2f", w.s_lo) << "," << fmt("%.2f", w.s_hi) << "] |a0/L-1| " << fmt("%.1e", a0)
              << ", slope " << fmt("%.2f", f.residual_slope) << " <= " << fmt("%.2f", f.slope_bound)
              << ", shift " << fmt("%.2f", st.worst) << " SE; ";
            ok = ok && a0 < 1e-3 && f.slope_ok() && st.ok(3.0);
        }
        return ok;
    });
}

KernelOracle kernel_oracle(const Spectrum& spec, double mu, double h, double span)
{
    const VariationKernel k = variation_kernel(spec, 0.0);
    const auto n = static_cast<std::size_t>(std::llround(span / h)) + 1;
    std::vector<double> s(n), f(n), conv(n, 0.0), closed(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        s[j] = h * static_cast<double>(j);
        f[j] = std::exp(mu * s[j]);
    }
    for (int i = 0; i < 3; ++i) {
        const int power = (k.degenerate && i == 2) ? 1 : 0;
        const double lam = k.lambdas[i];
        const auto c = forward_convolution(f, h, 0, n - 1, lam, power);
        for (std::size_t j = 0; j < n; ++j) {
            conv[j] += k.betas[i] * c[j];
            const double d = mu - lam;
            // ∫_0^s t^power e^{λ t} e^{μ(s-t)} dt
            const double exact = power == 0
                                     ? (std::exp(mu * s[j]) - std::exp(lam * s[j])) / d
                                     : (std::exp(mu * s[j]) - std::exp(lam * s[j]) * (1 + d * s[j])) / (d * d);
            closed[j] += k.betas[i] * exact;
        }
    }
    KernelOracle out;
    double cmax = 0;
    for (std::size_t j = 0; j < n; ++j) {
        out.closed_form = std::max(out.closed_form, std::abs(conv[j] - closed[j]));
        cmax = std::max(cmax, std::abs(closed[j]));
    }
    out.closed_form /= cmax;

    // (∂-λ1)(∂-λ2)(∂-λ3) by chained first-derivative stencils
    std::vector<double> g = conv;
    const double lams[3] = {spec.l1(), spec.l2(), spec.l3()};
    for (double lam : lams) {
        const auto dg = derivative(g, h, 1, 4);
        for (std::size_t j = 0; j < n; ++j) g[j] = dg[j] - lam * g[j];
    }
    double fmax = 0;
    for (std::size_t j = 12; j + 12 < n; ++j) {
        out.ode = std::max(out.ode, std::abs(g[j] - f[j]));
        fmax = std::max(fmax, std::abs(f[j]));
    }
    out.ode /= fmax;
    return out;
}

CheckResult identities(const std::vector<ShootingRun>& runs)
{
    return timed("9", "representation and integral identities", 0, [&](std::ostringstream& d) {
        bool ok = true;
        for (const auto& run : runs) {
            if (!run.sol) {
                d << "n=" << run.c.n << " missing solution; ";
                ok = false;
                continue;
            }
            const auto rep = representation_check(*run.sol, run.spec, variation_kernel(run.spec, 0.0));
            const double yid = y_integral_identity_check(*run.sol, run.spec);
            const KernelOracle ko = kernel_oracle(run.spec);
            d << "n=" << run.c.n << " p=p_c+" << run.c.dp << " representation " << fmt("%.1e", rep.deviation)
              << ", Y identity " << fmt("%.1e", yid) << ", kernel " << fmt("%.1e", ko.closed_form) << "/"
              << fmt("%.1e", ko.ode) << "; ";
            ok = ok && rep.deviation < 1e-3 && yid < 1e-3 && ko.closed_form < 1e-8 && ko.ode < 1e-8;
        }
        return ok;
    });
}

std::vector<CheckResult> acceptance_suite(int jobs)
{
    std::vector<CheckResult> out;
    out.push_back(spectral_identities(jobs));
    out.push_back(double_root(jobs));
    out.push_back(ladder_agreement(jobs));
    out.push_back(sign_criterion(jobs));
    out.push_back(sign_tables());
    const auto runs = run_shooting_cases(jobs);
    out.push_back(shooting_convergence(runs));
    out.push_back(decay_rates(runs));
    out.push_back(expansion_fits(runs));
    out.push_back(identities(runs));
    return out;
}

std::vector<CheckResult> property_suite(int jobs)
{
    std::vector<CheckResult> out;

    out.push_back(timed("P1", "Taylor coefficients against g", 0, [&](std::ostringstream& d) {
        std::mt19937_64 rng(5);
        const double L = 1.3;
        int fails = 0;
        for (double p : {7.6, 8.5, 10.9}) {
            const auto dj = taylor_coeffs(p, L, 7);
            const std::vector<double> d6(dj.begin(), dj.end() - 1);
            std::uniform_real_distribution<double> u(-L / 2, L / 2);
            for (int i = 0; i < 100; ++i) {
                const double y = u(rng);
                const double err = std::abs(g_unchecked(L, p, y) - taylor_sum(d6, y));
                if (err > 2 * std::abs(dj.back()) * std::pow(std::abs(y), 7) + 1e-15 * std::pow(L, p)) ++fails;
            }
        }
        for (int p : {2, 3, 5}) {
            const auto dj = taylor_coeffs(p, L, 8);
            for (std::size_t j = static_cast<std::size_t>(p) - 1; j < dj.size(); ++j)
                if (dj[j] != 0) ++fails;
        }
        d << fails << " violations";
        return fails == 0;
    }));

    out.push_back(timed("P2", "regime (a) exponent ordering", 0, [&](std::ostringstream& d) {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(std::log(1e-2), std::log(300.0));
        int fails = 0, samples = 0;
        for (int n = 13; n <= 40; ++n) {
            const CriticalLadder lad = compute_ladder(n);
            for (int i = 0; i < 10; ++i) {
                const ProblemParams pp(n, lad.p_c + std::exp(u(rng)));
                const Regime reg = detect_regime(pp, lad);
                if (reg.kind != RegimeKind::A) continue;
                const Spectrum s = compute_spectrum(pp);
                const double k = reg.k;
                ++samples;
                if (!(s.l1() < s.l2() + s.l3() && s.l2() + s.l3() < (k + 1) * s.l3() &&
                      (k + 1) * s.l3() < s.l2() && s.l2() < k * s.l3() && k * s.l3() < 0))
                    ++fails;
            }
        }
        d << samples << " samples, " << fails << " failures";
        return fails == 0;
    }));

    out.push_back(timed("P3", "N nondecreasing and parity flip at n = 20", 0, [&](std::ostringstream& d) {
        const auto rows = ladder_sweep(13, 60, jobs);
        bool mono = true, flip = true;
        for (std::size_t i = 1; i < rows.size(); ++i) mono = mono && rows[i].N >= rows[i - 1].N;
        for (const auto& r : rows) flip = flip && ((r.parity > 0) == (r.n >= 20));
        d << "monotone " << mono << ", flip " << flip;
        return mono && flip;
    }));

    out.push_back(timed("P4", "scale covariance of shooting", 0, [&](std::ostringstream& d) {
        const ProblemParams pp(13, compute_pc(13) + 0.5);
        ShootControls c;
        const RadialSolution a = shoot(pp, 3.0, c);
        c.rescale_from_unit = false;
        const RadialSolution b = shoot(pp, 3.0, c);
        double worst = 0;
        for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a.phi[j] / b.phi[j] - 1));
        d << "max relative φ difference " << fmt("%.1e", worst);
        return worst < 1e-5;
    }));

    out.push_back(timed("P5", "integrator tolerance consistency", 0, [&](std::ostringstream& d) {
        const ProblemParams pp(13, compute_pc(13) + 0.5);
        ShootControls c;
        const RadialSolution a = shoot(pp, 1.0, c);
        c.rtol *= 0.5;
        const RadialSolution b = shoot(pp, 1.0, c);
        const double diff = std::abs(a.W.back() - b.W.back());
        d << "change " << fmt("%.1e", diff) << " vs estimate " << fmt("%.1e", a.error_estimate);
        return diff < a.error_estimate;
    }));

    return out;
}

void print_results(std::ostream& out, const std::vector<CheckResult>& results, std::ostream* timing)
{
    for (const auto& r : results) {
        out << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << ": " << r.detail << '\n';
        if (timing) {
            *timing << "  [" << r.id << "] " << fmt("%.2f", r.seconds) << " s";
            if (r.budget > 0) *timing << " (budget " << r.budget << " s)";
            *timing << '\n';
        }
    }
}

}  // namespace bihar::verify
