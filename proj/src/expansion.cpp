#include "bihar/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "bihar/convolution.hpp"
#include "bihar/errors.hpp"
#include "bihar/nonlinearity.hpp"

namespace bihar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t first_at_or_after(const std::vector<double>& s, double x)
{
    return static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), x) - s.begin());
}

// one basis column: s^power · e^{exponent·s}
struct Term {
    std::string name;
    int power = 0;
    double exponent = 0;
};

std::vector<Term> regime_terms(const Spectrum& spec, const Regime& regime, const FitOptions& opts)
{
    const double l2 = spec.l2(), l3 = spec.l3();
    std::vector<Term> t{{"a0", 0, 0.0}};
    const auto a = [](int j) { return "a" + std::to_string(j); };
    switch (regime.kind) {
    case RegimeKind::A:
        for (int j = 1; j <= std::min(regime.k + 1, opts.max_power); ++j) t.push_back({a(j), 0, j * l3});
        t.push_back({"b1", 0, l2});
        break;
    case RegimeKind::B:
        for (int j = 1; j <= regime.k - 1; ++j) t.push_back({a(j), 0, j * l3});
        t.push_back({"b1", 1, regime.k * l3});
        t.push_back({a(regime.k), 0, regime.k * l3});
        break;
    case RegimeKind::C:
        t.push_back({"b1", 1, l3});
        t.push_back({"a1", 0, l3});
        t.push_back({"b2", 2, 2 * l3});
        break;
    }
    return t;
}

}  // namespace

double VariationKernel::basis(int i, double t) const
{
    if (degenerate && i == 2) return t * std::exp(lambdas[1] * t);
    return std::exp(lambdas[i] * t);
}

VariationKernel variation_kernel(const Spectrum& spec, double s0)
{
    VariationKernel k;
    k.s0 = s0;
    k.lambdas = {spec.l1(), spec.l2(), spec.l3()};
    k.degenerate = spec.degenerate;
    if (k.degenerate) {
        const double mu = spec.l2(), d = spec.l1() - mu;
        k.lambdas[2] = mu;
        k.betas = {1 / (d * d), -1 / (d * d), -1 / d};
    } else {
        for (int i = 0; i < 3; ++i) {
            double prod = 1;
            for (int j = 0; j < 3; ++j)
                if (j != i) prod *= k.lambdas[i] - k.lambdas[j];
            k.betas[i] = 1 / prod;
        }
    }
    return k;
}

RepresentationResult representation_check(const RadialSolution& sol, const Spectrum& spec,
                                          const VariationKernel& kern,
                                          const RepresentationOptions& opts)
{
    const std::size_t n = sol.size();
    std::size_t j0 = first_at_or_after(sol.s, kern.s0 - 0.5 * sol.h);
    while (j0 < n && !std::isfinite(sol.Z[j0])) ++j0;
    std::size_t j1 = j0;
    while (j1 + 1 < n && std::isfinite(sol.Z[j1 + 1]) && (!opts.s_hi || sol.s[j1 + 1] <= *opts.s_hi))
        ++j1;
    if (j0 >= n || j1 < j0 + 8) throw GridTooCoarse("representation window holds fewer than 8 nodes");

    RepresentationResult res;
    res.kernel = kern;
    res.kernel.s0 = sol.s[j0];
    const double s0 = res.kernel.s0;

    std::vector<double> h(n, 0.0);
    if (!opts.zero_forcing)
        for (std::size_t j = j0; j <= j1; ++j) h[j] = g_unchecked(sol.L, sol.params.p(), sol.Y[j]);

    std::vector<double> particular(n, 0.0);
    for (int i = 0; i < 3; ++i) {
        const int power = (kern.degenerate && i == 2) ? 1 : 0;
        const double lam = kern.degenerate && i == 2 ? kern.lambdas[1] : kern.lambdas[i];
        const auto conv = forward_convolution(h, sol.h, j0, j1, lam, power);
        for (std::size_t j = j0; j <= j1; ++j) particular[j] += kern.betas[i] * conv[j];
    }

    const auto rows = static_cast<Eigen::Index>(j1 - j0 + 1);
    Eigen::MatrixXd A(rows, 3);
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t j = j0 + static_cast<std::size_t>(r);
        for (int i = 0; i < 3; ++i) A(r, i) = res.kernel.basis(i, sol.s[j] - s0);
        b(r) = sol.Z[j] - particular[j];
    }
    Eigen::Vector3d scale;
    for (int i = 0; i < 3; ++i) {
        scale(i) = A.col(i).cwiseAbs().maxCoeff();
        A.col(i) /= scale(i);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    res.condition = sv(0) / sv(sv.size() - 1);
    if (!(res.condition <= opts.max_condition))
        throw IllConditioned("homogeneous design has condition number " + std::to_string(res.condition));
    const Eigen::Vector3d x = svd.solve(b).cwiseQuotient(scale);
    for (int i = 0; i < 3; ++i) res.kernel.alphas[i] = x(i);

    res.reconstructed.assign(n, kNaN);
    double dev = 0, zmax = 0;
    for (std::size_t j = j0; j <= j1; ++j) {
        double z = particular[j];
        for (int i = 0; i < 3; ++i) z += x(i) * res.kernel.basis(i, sol.s[j] - s0);
        res.reconstructed[j] = z;
        dev = std::max(dev, std::abs(z - sol.Z[j]));
        zmax = std::max(zmax, std::abs(sol.Z[j]));
    }
    res.deviation = dev / zmax;
    (void)spec;
    return res;
}

std::string to_string(const Regime& r)
{
    switch (r.kind) {
    case RegimeKind::A: return "a(k=" + std::to_string(r.k) + ")";
    case RegimeKind::B: return "b(k=" + std::to_string(r.k) + ")";
    case RegimeKind::C: return "c";
    }
    return "?";
}

Regime detect_regime(const ProblemParams& params, const CriticalLadder& ladder, double rung_tol)
{
    const double p = params.p();
    if (p < ladder.p_c - rung_tol)
        throw SubcriticalInput("p = " + std::to_string(p) + " lies below p_c = " +
                               std::to_string(ladder.p_c));
    if (std::abs(p - ladder.p_c) < rung_tol) return {RegimeKind::C, 1};
    for (int k = 2; k <= ladder.N; ++k)
        if (std::abs(p - ladder.rungs[k - 1]) < rung_tol) return {RegimeKind::B, k};
    int k = 0;
    for (double pk : ladder.rungs)
        if (pk < p) ++k;
    return {RegimeKind::A, std::max(k, 1)};
}

const Coefficient& ExpansionFit::coefficient(const std::string& name) const
{
    for (const auto& c : coefficients)
        if (c.name == name) return c;
    throw InvalidParams("no coefficient named " + name);
}

namespace {

struct WeightedSolve {
    std::vector<double> coef;  // plain s-basis coefficients
    std::vector<double> stat_se;
    Eigen::VectorXd resid;     // unweighted Y - fit
    double condition = 0;
};

// Least squares for Y on rows j0..j0+rows-1 with columns s^q e^{λ(s - s_lo)}
// scaled to unit maximum and rows weighted by e^{-θ(s - s_lo)}.
WeightedSolve weighted_solve(const RadialSolution& sol, std::size_t j0, Eigen::Index rows,
                             const std::vector<Term>& terms, double s_lo, double theta)
{
    const auto P = static_cast<Eigen::Index>(terms.size());
    Eigen::MatrixXd A(rows, P);
    Eigen::VectorXd b(rows), w(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double s = sol.s[j0 + static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < P; ++c)
            A(r, c) = std::pow(s, terms[c].power) * std::exp(terms[c].exponent * (s - s_lo));
        w(r) = std::exp(-theta * (s - s_lo));
        b(r) = sol.Y[j0 + static_cast<std::size_t>(r)];
    }
    Eigen::VectorXd scale(P);
    for (Eigen::Index c = 0; c < P; ++c) {
        scale(c) = A.col(c).cwiseAbs().maxCoeff();
        A.col(c) /= scale(c);
    }
    const Eigen::MatrixXd Aw = w.asDiagonal() * A;
    const Eigen::VectorXd bw = w.cwiseProduct(b);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aw, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    WeightedSolve out;
    out.condition = sv(0) / sv(P - 1);
    if (!(out.condition < 1e14))
        throw IllConditioned("expansion basis has condition number " + std::to_string(out.condition));
    const Eigen::VectorXd x = svd.solve(bw);
    const double sigma2 = (bw - Aw * x).squaredNorm() / static_cast<double>(rows - P);
    const Eigen::MatrixXd Vs = svd.matrixV() * sv.cwiseInverse().asDiagonal();
    const Eigen::VectorXd var = (Vs * Vs.transpose()).diagonal() * sigma2;
    for (Eigen::Index c = 0; c < P; ++c) {
        const double back = std::exp(-terms[c].exponent * s_lo) / scale(c);
        out.coef.push_back(x(c) * back);
        out.stat_se.push_back(std::sqrt(var(c)) * std::abs(back));
    }
    out.resid = b - A * x;
    return out;
}

double slope_of_block_maxima(const RadialSolution& sol, std::size_t j0, const Eigen::VectorXd& resid,
                             int blocks)
{
    const Eigen::Index rows = resid.size(), half = rows / 2;
    const Eigen::Index per = std::max<Eigen::Index>(1, (rows - half) / std::max(2, blocks));
    std::vector<double> bs, bl;
    for (Eigen::Index start = half; start + per <= rows; start += per) {
        Eigen::Index arg = start;
        for (Eigen::Index r = start; r < start + per; ++r)
            if (std::abs(resid(r)) > std::abs(resid(arg))) arg = r;
        if (resid(arg) == 0) continue;
        bs.push_back(sol.s[j0 + static_cast<std::size_t>(arg)]);
        bl.push_back(std::log(std::abs(resid(arg))));
    }
    if (bs.size() < 2) throw WindowTooShort("too few residual blocks for a slope estimate");
    const double k = static_cast<double>(bs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        sx += bs[i];
        sy += bl[i];
        sxx += bs[i] * bs[i];
        sxy += bs[i] * bl[i];
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace

ExpansionFit fit_expansion(const RadialSolution& sol, const Spectrum& spec, const Regime& regime,
                           const FitWindow& window, const FitOptions& opts)
{
    const auto terms = regime_terms(spec, regime, opts);
    const auto P = static_cast<Eigen::Index>(terms.size());
    if (!(window.s_hi > window.s_lo)) throw WindowTooShort("fit window is empty");
    const std::size_t j0 = first_at_or_after(sol.s, window.s_lo);
    std::size_t j1 = first_at_or_after(sol.s, window.s_hi);
    if (j1 >= sol.size() || sol.s[j1] > window.s_hi) --j1;
    if (j0 >= sol.size() || j1 < j0 || static_cast<Eigen::Index>(j1 - j0 + 1) < 4 * (P + 1))
        throw WindowTooShort("fit window holds too few nodes for " + std::to_string(P) + " terms");

    ExpansionFit fit;
    fit.regime = regime;
    fit.window = window;
    fit.nodes = j1 - j0 + 1;
    const auto rows = static_cast<Eigen::Index>(fit.nodes);

    // Rows are weighted by e^{-θ(s - s_lo)} with θ the remainder exponent:
    // a complete basis leaves an O(1) weighted residual, a missing slower
    // term shows up as growth.
    const double theta = regime.kind == RegimeKind::C ? 2 * spec.l3() : spec.l2() + spec.l3();
    const WeightedSolve base = weighted_solve(sol, j0, rows, terms, window.s_lo, theta);
    fit.condition = base.condition;

    // The residual is the smooth remainder rather than noise, so the
    // statistical error alone understates the spread. Adding the leading
    // remainder term and refitting measures the truncation error.
    auto augmented = terms;
    augmented.push_back({"remainder", regime.kind == RegimeKind::A ? 0 : 1, theta});
    std::vector<double> trunc(terms.size(), 0.0);
    try {
        const WeightedSolve aug = weighted_solve(sol, j0, rows, augmented, window.s_lo, theta);
        for (std::size_t c = 0; c < terms.size(); ++c) trunc[c] = std::abs(aug.coef[c] - base.coef[c]);
    } catch (const IllConditioned&) {
        // remainder term collinear with the basis: statistical error only
    }

    for (std::size_t c = 0; c < terms.size(); ++c) {
        Coefficient co{terms[c].name, base.coef[c], std::hypot(base.stat_se[c], trunc[c]),
                       base.stat_se[c], trunc[c], false};
        co.resolved = std::abs(co.value) > co.std_error;
        fit.coefficients.push_back(co);
    }
    fit.a0 = sol.L + fit.coefficients[0].value;
    fit.coefficients[0].value = fit.a0;

    fit.residual_slope = slope_of_block_maxima(sol, j0, base.resid, opts.slope_blocks);
    fit.theoretical_slope = theta;
    fit.slope_bound = fit.theoretical_slope + opts.slack * std::abs(spec.l3());
    return fit;
}

StabilityReport window_shift_stability(const RadialSolution& sol, const Spectrum& spec,
                                       const Regime& regime, const FitWindow& window,
                                       double shift_fraction, const FitOptions& opts)
{
    StabilityReport rep{fit_expansion(sol, spec, regime, window, opts), {}, {}, 0};
    const double d = shift_fraction * (window.s_hi - window.s_lo);
    rep.shifted = fit_expansion(sol, spec, regime, {window.s_lo + d, window.s_hi + d}, opts);
    for (std::size_t i = 0; i < rep.base.coefficients.size(); ++i) {
        const auto& a = rep.base.coefficients[i];
        const auto& b = rep.shifted.coefficients[i];
        const double se = std::max(a.std_error, b.std_error);
        const double ratio = std::abs(a.value - b.value) / se;
        rep.ratios.push_back(ratio);
        rep.worst = std::max(rep.worst, ratio);
    }
    return rep;
}

double decay_slope(const RadialSolution& sol, double s_lo, double s_hi, bool divide_by_s)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
    for (std::size_t j = 0; j < sol.size(); ++j) {
        const double s = sol.s[j];
        if (s < s_lo || s > s_hi || sol.Y[j] == 0) continue;
        double y = std::log(std::abs(sol.Y[j]));
        if (divide_by_s) y -= std::log(s);
        sx += s;
        sy += y;
        sxx += s * s;
        sxy += s * y;
        k += 1;
    }
    if (k < 3 || (divide_by_s && s_lo <= 0)) throw WindowTooShort("decay-slope window is too short");
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

FitWindow default_window(const RadialSolution& sol, const Spectrum& spec)
{
    (void)spec;
    std::size_t j = 0;
    while (j < sol.size() && std::abs(sol.Y[j]) > kWindowOnset * sol.L) ++j;
    if (j == sol.size()) throw WindowTooShort("|Y| never drops below the fit onset");
    const double s_lo = sol.s[j];
    const double s_hi = std::min(s_lo + kWindowWidth, sol.s.back() - 0.5);
    if (!(s_hi > s_lo + 0.5 * kWindowWidth)) throw WindowTooShort("grid ends too close to the fit onset");
    return {s_lo, s_hi};
}

}  // namespace bihar
