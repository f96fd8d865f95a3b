#include "bihar/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include <boost/numeric/odeint.hpp>

#include "bihar/convolution.hpp"
#include "bihar/errors.hpp"
#include "bihar/nonlinearity.hpp"
#include "bihar/stencil.hpp"

namespace bihar {

const char* to_string(Outcome o)
{
    switch (o) {
    case Outcome::Persisted: return "persisted";
    case Outcome::BlowUp: return "blow-up";
    case Outcome::SignLoss: return "sign-loss";
    }
    return "?";
}

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 4>;

// φ, φ', Δφ, (Δφ)' at a node
using RQuant = std::array<double, 4>;

struct Node {
    State y;  // Y, Y', Y'', Y'''
    RQuant rq;
};

// Which side of the stable manifold a trajectory leaves on. Over: W crosses
// L (blow-up side); Under: W turns down (sign-loss side).
enum class Verdict { Undecided, Over, Under };

struct Model {
    int n;
    double p, m, L;
    double alpha;  // φ(0)
    double r_start, r_switch, s_switch;
    double blow_limit;
    double rtol;
    // Y'''' = e1 Y''' - e2 Y'' + e3 Y' - (1-p) e4 Y + g(Y)
    double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
    // elementary symmetric functions of λ1, λ2, λ3; q(∂)Y with
    // q(λ) = (λ-λ1)(λ-λ2)(λ-λ3) isolates the unstable component
    std::array<double, 3> stable_sym{};
    bool has_spectrum = false;

    Model(const ProblemParams& pp, double alpha_, const ShootControls& c)
        : n(pp.n()), p(pp.p()), m(pp.m()), L(singular_amplitude(pp)), alpha(alpha_)
    {
        const double ell = std::pow(alpha, -1.0 / m);
        r_start = c.r_start * ell;
        r_switch = c.r_switch * ell;
        s_switch = std::log(r_switch);
        blow_limit = c.blowup_factor * alpha;
        rtol = c.rtol;
        const double a[4] = {m, m + 2, m + 2 - n, m + 4 - n};
        e4 = a[0] * a[1] * a[2] * a[3];
        for (int i = 0; i < 4; ++i) {
            e1 += a[i];
            for (int j = i + 1; j < 4; ++j) {
                e2 += a[i] * a[j];
                for (int k = j + 1; k < 4; ++k) e3 += a[i] * a[j] * a[k];
            }
        }
    }

    // odd extension so that trajectories may be followed through u = 0
    double power(double u) const { return u >= 0 ? std::pow(u, p) : -std::pow(-u, p); }

    void r_rhs(const State& x, State& dx, double r) const
    {
        dx[0] = x[1];
        dx[1] = x[2] - (n - 1) * x[1] / r;
        dx[2] = x[3];
        dx[3] = power(x[0]) - (n - 1) * x[3] / r;
    }

    double g(double Y) const
    {
        if (L + Y > 0) return g_unchecked(L, p, Y);
        const double Lp = std::pow(L, p);
        return power(L + Y) - Lp - p * Lp / L * Y;
    }

    void s_rhs(const State& y, State& dy, double) const
    {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = y[3];
        dy[3] = e1 * y[3] - e2 * y[2] + e3 * y[1] - (1 - p) * e4 * y[0] + g(y[0]);
    }

    State seed(double v0, double r) const
    {
        const double ap = std::pow(alpha, p);
        const double nn = n;
        return {alpha + v0 * r * r / (2 * nn) + ap * std::pow(r, 4) / (8 * nn * (nn + 2)),
                v0 * r / nn + ap * r * r * r / (2 * nn * (nn + 2)), v0 + ap * r * r / (2 * nn),
                ap * r / nn};
    }

    State r_to_y(const State& x, double r) const
    {
        const double u = x[0], w = x[1], v = x[2], z = x[3];
        const double u2 = v - (n - 1) * w / r;
        const double u3 = z - (n - 1) * (u2 / r - w / (r * r));
        const double d1 = r * w, d2 = r * w + r * r * u2, d3 = r * w + 3 * r * r * u2 + r * r * r * u3;
        const double rm = std::pow(r, m);
        return {rm * u - L, rm * (m * u + d1), rm * (m * m * u + 2 * m * d1 + d2),
                rm * (m * m * m * u + 3 * m * m * d1 + 3 * m * d2 + d3)};
    }

    void set_spectrum(const Spectrum& sp)
    {
        const double a = sp.l1(), b = sp.l2(), c = sp.l3();
        stable_sym = {a + b + c, a * b + b * c + c * a, a * b * c};
        has_spectrum = true;
    }

    double unstable_component(const State& y) const
    {
        return y[3] - stable_sym[0] * y[2] + stable_sym[1] * y[1] - stable_sym[2] * y[0];
    }

    RQuant y_to_r(const State& y, double s) const
    {
        const double W = L + y[0];
        const double a = -m, b = n - 2 - m, c = -m - 2;
        return {std::exp(-m * s) * W, std::exp(-(m + 1) * s) * (y[1] - m * W),
                std::exp(-(m + 2) * s) * (y[2] + (a + b) * y[1] + a * b * W),
                std::exp(-(m + 3) * s) *
                    (y[3] + (a + b + c) * y[2] + (a * b + b * c + c * a) * y[1] + a * b * c * W)};
    }
};

struct Grid {
    double s_first;
    double h;
    std::size_t count;
    double at(std::size_t j) const { return s_first + h * static_cast<double>(j); }
};

struct Run {
    std::vector<Node> nodes;
    Outcome outcome = Outcome::Persisted;
    Verdict verdict = Verdict::Undecided;
    std::optional<double> event_s;
};

enum class Mode {
    Classify,  // stop at the first verdict; nothing recorded
    Record,    // record nodes; stop at the first verdict
    Faithful   // record nodes; stop only at a true BlowUp/SignLoss event
};

constexpr double kMinStepFactor = 1e-14;

// Adaptive stepping from t to t_end. `check(t_prev, x_prev, t, x)` runs after
// every accepted step and returns true to stop.
template <class Sys, class Check>
bool advance(Sys&& sys, State& x, double& t, double t_end, double& dt, double rtol, Check&& check)
{
    auto stepper = odeint::make_controlled(1e-300, rtol, odeint::runge_kutta_fehlberg78<State>());
    while (t < t_end) {
        const bool landing = dt >= t_end - t;
        double step = landing ? t_end - t : dt;
        const State x_prev = x;
        const double t_prev = t;
        if (stepper.try_step(sys, x, t, step) == odeint::fail) {
            dt = step;
            if (dt < kMinStepFactor * std::abs(t) || dt < 1e-250)
                throw StepFailure("integrator step underflow at t = " + std::to_string(t));
            continue;
        }
        if (landing) t = t_end;
        else dt = step;
        if (!std::isfinite(x[0]) || !std::isfinite(x[3]))
            throw StepFailure("non-finite state at t = " + std::to_string(t));
        if (check(t_prev, x_prev, t, x)) return true;
    }
    return false;
}

// Locates the first time in (t_prev, t] where `event` holds by bisection on
// single fixed RK78 steps from x_prev.
template <class Sys, class Event>
double refine_event(Sys&& sys, const State& x_prev, double t_prev, double t, Event&& event)
{
    odeint::runge_kutta_fehlberg78<State> rk;
    double lo = 0, hi = t - t_prev;
    for (int i = 0; i < 60 && hi - lo > 1e-12 * std::max(1.0, std::abs(t)); ++i) {
        const double mid = 0.5 * (lo + hi);
        State x = x_prev;
        rk.do_step(sys, x, t_prev, mid);
        if (event(t_prev + mid, x)) hi = mid;
        else lo = mid;
    }
    return t_prev + hi;
}

class Integrator {
public:
    Integrator(const Model& model, Grid grid, double horizon)
        : md_(model), grid_(grid), horizon_(horizon)
    {
    }

    Run from_origin(double v0, Mode mode) const
    {
        Run run;
        const auto rsys = [this](const State& x, State& dx, double r) { md_.r_rhs(x, dx, r); };
        State x = md_.seed(v0, md_.r_start);
        double r = md_.r_start, dr = 1e-2 * md_.r_start;
        std::size_t j = 0;
        const bool record = mode != Mode::Classify;

        const auto node_from_r = [&](const State& xs, double rr) {
            return Node{md_.r_to_y(xs, rr), RQuant{xs[0], xs[1], xs[2], xs[3]}};
        };
        // nodes inside the seed radius come straight from the Taylor start
        while (j < grid_.count && std::exp(grid_.at(j)) <= md_.r_start) {
            if (record) {
                const double rr = std::exp(grid_.at(j));
                run.nodes.push_back(node_from_r(md_.seed(v0, rr), rr));
            }
            ++j;
        }

        bool stop = false;
        const auto check = [&](double r0, const State& x0, double r1, const State& x1) {
            return inspect_r(run, mode, rsys, r0, x0, r1, x1);
        };
        try {
            while (!stop && j < grid_.count && grid_.at(j) <= md_.s_switch) {
                const double rj = std::exp(grid_.at(j));
                stop = advance(rsys, x, r, rj, dr, md_.rtol, check);
                if (!stop && record) run.nodes.push_back(node_from_r(x, rj));
                if (!stop) ++j;
            }
            if (!stop) stop = advance(rsys, x, r, md_.r_switch, dr, md_.rtol, check);
        } catch (const StepFailure&) {
            if (!singular(mode, x[0])) throw;
            run.outcome = Outcome::BlowUp;
            run.event_s = std::log(r);
            return run;
        }
        if (stop) return run;
        return continue_s(std::move(run), md_.r_to_y(x, md_.r_switch), md_.s_switch, j, mode);
    }

    // Continues from state y at s = grid node j0 (already recorded by the
    // caller); records nodes j0+1, ...
    Run from_state(const State& y, std::size_t j0, Mode mode) const
    {
        return continue_s(Run{}, y, grid_.at(j0), j0 + 1, mode);
    }

private:
    // For large p the blow-up is so abrupt that φ cannot reach blow_limit
    // in double precision before the step size collapses; a collapse with φ
    // above its starting value is that singularity.
    bool singular(Mode mode, double phi) const { return mode == Mode::Faithful && phi > md_.alpha; }

    template <class Sys>
    bool inspect_r(Run& run, Mode mode, Sys&& sys, double r0, const State& x0, double r1,
                   const State& x1) const
    {
        const double u = x1[0];
        if (mode == Mode::Faithful) {
            if (u < 0) {
                run.outcome = Outcome::SignLoss;
                run.event_s = std::log(refine_event(sys, x0, r0, r1,
                                                    [](double, const State& x) { return x[0] < 0; }));
                return true;
            }
            if (u > md_.blow_limit) {
                run.outcome = Outcome::BlowUp;
                run.event_s = std::log(refine_event(
                    sys, x0, r0, r1, [this](double, const State& x) { return x[0] > md_.blow_limit; }));
                return true;
            }
            return false;
        }
        const double rm = std::pow(r1, md_.m);
        if (rm * u > md_.L || u > md_.blow_limit) {
            run.verdict = Verdict::Over;
            return true;
        }
        if (u < 0 || md_.m * u + r1 * x1[1] < 0) {
            run.verdict = Verdict::Under;
            return true;
        }
        return false;
    }

    Run continue_s(Run run, State y, double s, std::size_t j, Mode mode) const
    {
        const auto ssys = [this](const State& x, State& dx, double t) { md_.s_rhs(x, dx, t); };
        const bool record = mode != Mode::Classify;
        double ds = 0.1 * grid_.h;
        const auto check = [&](double s0, const State& y0, double s1, const State& y1) {
            const double W = md_.L + y1[0];
            if (mode == Mode::Faithful) {
                const auto sign_event = [this](double, const State& yy) { return md_.L + yy[0] < 0; };
                const auto blow_event = [this](double t, const State& yy) {
                    return std::exp(-md_.m * t) * (md_.L + yy[0]) > md_.blow_limit;
                };
                if (W < 0) {
                    run.outcome = Outcome::SignLoss;
                    run.event_s = refine_event(ssys, y0, s0, s1, sign_event);
                    return true;
                }
                if (std::exp(-md_.m * s1) * W > md_.blow_limit) {
                    run.outcome = Outcome::BlowUp;
                    run.event_s = refine_event(ssys, y0, s0, s1, blow_event);
                    return true;
                }
                return false;
            }
            if (y1[0] > 0) {
                run.verdict = Verdict::Over;
                return true;
            }
            if (y1[1] < 0) {
                run.verdict = Verdict::Under;
                return true;
            }
            return false;
        };
        try {
            for (; j < grid_.count; ++j) {
                const double sj = grid_.at(j);
                if (advance(ssys, y, s, sj, ds, md_.rtol, check)) return run;
                if (record) run.nodes.push_back(Node{y, md_.y_to_r(y, sj)});
            }
        } catch (const StepFailure&) {
            if (!singular(mode, std::exp(-md_.m * s) * (md_.L + y[0]))) throw;
            run.outcome = Outcome::BlowUp;
            run.event_s = s;
            return run;
        }
        if (mode == Mode::Classify || mode == Mode::Record) {
            // past the grid: keep going until the trajectory commits
            if (advance(ssys, y, s, horizon_, ds, md_.rtol, check)) return run;
            if (md_.has_spectrum) {
                const double c4 = md_.unstable_component(y);
                if (c4 != 0) run.verdict = c4 > 0 ? Verdict::Over : Verdict::Under;
            }
        }
        return run;
    }

    const Model& md_;
    Grid grid_;
    double horizon_;
};

Grid make_grid(const ShootControls& c, double s_offset)
{
    if (!(c.ds > 0)) throw InvalidParams("grid spacing ds must be positive");
    if (!(c.r_max > 0)) throw InvalidParams("r_max must be positive");
    const double s_max = std::log(c.r_max);
    if (!(s_max > c.s_start)) throw InvalidParams("r_max must exceed exp(s_start)");
    const auto count = static_cast<std::size_t>(std::ceil((s_max - c.s_start) / c.ds - 1e-9)) + 1;
    return Grid{c.s_start + s_offset, c.ds, count};
}

RadialSolution assemble(const ProblemParams& pp, const Model& md, const Grid& grid,
                        const std::vector<Node>& nodes, std::size_t lead, double s_shift,
                        double alpha_out)
{
    RadialSolution sol(pp);
    sol.alpha = alpha_out;
    sol.L = md.L;
    sol.h = grid.h;
    const double m = pp.m();
    // φ_α(r) = α φ_1(α^{1/m} r): r-derivative k picks up α^{1+k/m}
    const double scale = alpha_out / md.alpha;
    const double kfac = std::pow(scale, 1.0 / m);
    for (std::size_t j = lead; j < nodes.size(); ++j) {
        const double s = grid.at(j) - s_shift;
        const Node& nd = nodes[j];
        sol.s.push_back(s);
        sol.r.push_back(std::exp(s));
        sol.phi.push_back(scale * nd.rq[0]);
        sol.dphi.push_back(scale * kfac * nd.rq[1]);
        sol.lap.push_back(scale * kfac * kfac * nd.rq[2]);
        sol.dlap.push_back(scale * kfac * kfac * kfac * nd.rq[3]);
        sol.W.push_back(md.L + nd.y[0]);
        sol.Y.push_back(nd.y[0]);
        sol.dY.push_back(nd.y[1]);
        sol.d2Y.push_back(nd.y[2]);
        sol.d3Y.push_back(nd.y[3]);
    }
    sol.Z.assign(sol.size(), std::numeric_limits<double>::quiet_NaN());
    return sol;
}

Node average(const Node& a, const Node& b)
{
    Node out;
    for (int i = 0; i < 4; ++i) {
        out.y[i] = 0.5 * (a.y[i] + b.y[i]);
        out.rq[i] = 0.5 * (a.rq[i] + b.rq[i]);
    }
    return out;
}

double spread(const Node& a, const Node& b)
{
    const double scale = std::max(std::abs(a.y[0]), std::abs(b.y[0]));
    return scale == 0 ? 0 : std::abs(a.y[0] - b.y[0]) / scale;
}

// Bisection on a monotone one-parameter family with Over at `over` and Under
// at `under`, until the two ends are neighbouring doubles.
template <class Classify>
std::pair<double, double> bisect_verdict(Classify&& classify, double over, double under,
                                         int max_steps, int& steps)
{
    for (int i = 0; i < max_steps; ++i) {
        const double mid = over + 0.5 * (under - over);
        if (mid == over || mid == under) return {over, under};
        ++steps;
        const Verdict v = classify(mid);
        if (v == Verdict::Undecided)
            throw NoConvergence("trajectory did not leave the stable manifold before the horizon");
        if (v == Verdict::Over) over = mid;
        else under = mid;
    }
    const double gap = std::abs(under - over);
    if (gap > 8 * std::numeric_limits<double>::epsilon() * std::max(std::abs(over), std::abs(under)))
        throw NoConvergence("bisection did not collapse the bracket in " + std::to_string(max_steps) +
                            " steps");
    return {over, under};
}

}  // namespace

IntegrationResult integrate_radial(const ProblemParams& params, double alpha, double v0,
                                   double r_max, const ShootControls& controls)
{
    if (!(alpha > 0)) throw InvalidParams("alpha must be positive");
    ShootControls c = controls;
    c.r_max = r_max;
    const Model md(params, alpha, c);
    const Grid grid = make_grid(c, 0.0);
    const Integrator integ(md, grid, grid.at(grid.count - 1));
    Run run = integ.from_origin(v0, Mode::Faithful);
    RadialSolution sol = assemble(params, md, grid, run.nodes, 0, 0.0, alpha);
    sol.v0 = v0;
    try {
        populate_z(sol, compute_spectrum(params).l4());
    } catch (const SubcriticalInput&) {
        // no real spectrum: Z stays NaN
    }
    IntegrationResult res{run.outcome, std::nullopt, std::move(sol)};
    if (run.event_s) res.event_r = std::exp(*run.event_s);
    return res;
}

RadialSolution shoot(const ProblemParams& params, double alpha, const ShootControls& controls)
{
    if (!(alpha > 0)) throw InvalidParams("alpha must be positive");
    const Spectrum spec = compute_spectrum(params);
    const double m = params.m();
    const double unit_alpha = controls.rescale_from_unit ? 1.0 : alpha;
    // W_α(s) = W_1(s + log(α)/m)
    const double shift = controls.rescale_from_unit ? std::log(alpha) / m : 0.0;
    Model md(params, unit_alpha, controls);
    md.set_spectrum(spec);
    // Output nodes sit at s_start + shift in the integration chart. When they
    // begin beyond the natural core scale of the model the grid is extended
    // backwards so that the first stage still starts near the origin.
    const Grid out = make_grid(controls, shift);
    const double natural_start = controls.s_start - std::log(unit_alpha) / m;
    std::size_t lead = 0;
    if (out.s_first > natural_start)
        lead = static_cast<std::size_t>(std::ceil((out.s_first - natural_start) / out.h));
    const Grid grid{out.s_first - out.h * static_cast<double>(lead), out.h, out.count + lead};
    const double horizon = std::max(grid.at(grid.count - 1), md.s_switch + 25.0) +
                           40.0 / (spec.l4() - spec.l3());
    const Integrator integ(md, grid, horizon);

    // bracket on v0 < 0: less negative values blow up, more negative lose sign
    const double vscale = std::pow(unit_alpha, 1.0 + 2.0 / m);
    const auto classify_v0 = [&](double v0) { return integ.from_origin(v0, Mode::Classify).verdict; };
    const int decades = static_cast<int>(std::ceil(std::log10(controls.v0_probe_hi / controls.v0_probe_lo)));
    const int probes = decades * controls.probes_per_decade;
    double over = 0, under = 0;
    bool found = false;
    Verdict prev = Verdict::Undecided;
    double prev_v = 0;
    for (int i = 0; i <= probes && !found; ++i) {
        const double v = -vscale * controls.v0_probe_lo *
                         std::pow(10.0, static_cast<double>(i) / controls.probes_per_decade);
        const Verdict vd = classify_v0(v);
        if (prev == Verdict::Over && vd == Verdict::Under) {
            over = prev_v;
            under = v;
            found = true;
        }
        prev = vd;
        prev_v = v;
    }
    if (!found)
        throw BracketNotFound("no blow-up/sign-loss transition for Δφ(0) in [-" +
                              std::to_string(vscale * controls.v0_probe_hi) + ", -" +
                              std::to_string(vscale * controls.v0_probe_lo) + "]");

    int steps = 0;
    std::tie(over, under) = bisect_verdict(classify_v0, over, under, controls.max_bisection, steps);

    std::vector<Node> nodes;
    std::vector<double> stage_starts;
    double spread_sum = 0;

    // accepts nodes from two bracket runs while they agree to stage_tol
    const auto accept = [&](const Run& a, const Run& b) {
        const std::size_t k = std::min(a.nodes.size(), b.nodes.size());
        std::size_t taken = 0;
        double worst = 0;
        for (; taken < k; ++taken) {
            const double sp = spread(a.nodes[taken], b.nodes[taken]);
            if (sp > controls.stage_tol) break;
            worst = std::max(worst, sp);
            nodes.push_back(average(a.nodes[taken], b.nodes[taken]));
        }
        spread_sum += worst;
        return taken;
    };

    stage_starts.push_back(grid.at(0));
    if (accept(integ.from_origin(over, Mode::Record), integ.from_origin(under, Mode::Record)) == 0)
        throw NoConvergence("shooting orbit could not be resolved past the first node");

    const double l4 = spec.l4();
    const State v4 = {1.0, l4, l4 * l4, l4 * l4 * l4};
    int stage_count = 1;
    while (nodes.size() < grid.count) {
        const std::size_t j0 = nodes.size() - 1;
        const State base = nodes.back().y;
        const double size = std::abs(base[0]);
        const auto perturbed = [&](double c) {
            State y = base;
            for (int i = 0; i < 4; ++i) y[i] += c * size * v4[i];
            return y;
        };
        const auto classify_c = [&](double c) { return integ.from_state(perturbed(c), j0, Mode::Classify).verdict; };
        double delta = 16 * controls.stage_tol;
        while (!(classify_c(delta) == Verdict::Over && classify_c(-delta) == Verdict::Under)) {
            delta *= 4;
            if (delta > 1.0)
                throw NoConvergence("lost the stable manifold at s = " + std::to_string(grid.at(j0)));
        }
        const auto [c_over, c_under] = bisect_verdict(classify_c, delta, -delta, controls.max_bisection, steps);
        stage_starts.push_back(grid.at(j0));
        const std::size_t taken = accept(integ.from_state(perturbed(c_over), j0, Mode::Record),
                                         integ.from_state(perturbed(c_under), j0, Mode::Record));
        if (taken == 0)
            throw NoConvergence("shooting stalled at s = " + std::to_string(grid.at(j0)) +
                                " (stage tolerance too tight for double precision)");
        ++stage_count;
    }

    RadialSolution sol = assemble(params, md, grid, nodes, lead, shift, alpha);
    sol.v0 = 0.5 * (over + under) * std::pow(alpha / unit_alpha, 1.0 + 2.0 / m);
    sol.stages = stage_count;
    sol.bisection_steps = steps;
    for (double& s0 : stage_starts) s0 -= shift;
    sol.stage_starts = std::move(stage_starts);
    sol.error_estimate = std::abs(sol.Y.back()) * (spread_sum + stage_count * controls.stage_tol) +
                         4 * std::numeric_limits<double>::epsilon() * sol.L;
    populate_z(sol, l4);

    for (std::size_t j = 0; j < sol.size(); ++j)
        if (!(sol.phi[j] > 0))
            throw NoConvergence("shooting orbit lost positivity at r = " + std::to_string(sol.r[j]));
    const double final_ratio = sol.W.back() / sol.L - 1.0;
    if (!(std::abs(final_ratio) < controls.target_tol))
        throw NoConvergence("r^m φ(r_max)/L - 1 = " + std::to_string(final_ratio) +
                            " misses the target tolerance; r_max is too small for this alpha");
    return sol;
}

void populate_z(RadialSolution& sol, double lambda4)
{
    sol.Z = derivative(sol.Y, sol.h, 1, 2);
    for (std::size_t j = 0; j < sol.Z.size(); ++j) sol.Z[j] -= lambda4 * sol.Y[j];
}

double emden_fowler_residual(const ProblemParams& params, double h, const std::vector<double>& W)
{
    constexpr int half = 4;
    if (W.size() < 9 + 2 * half)
        throw GridTooCoarse("Emden-Fowler residual needs at least 9 interior nodes");
    const int n = params.n();
    const double m = params.m(), p = params.p();
    const double a[4] = {m, m + 2, m + 2 - n, m + 4 - n};
    double e1 = 0, e2 = 0, e3 = 0;
    for (int i = 0; i < 4; ++i) {
        e1 += a[i];
        for (int j = i + 1; j < 4; ++j) {
            e2 += a[i] * a[j];
            for (int k = j + 1; k < 4; ++k) e3 += a[i] * a[j] * a[k];
        }
    }
    const double e4 = q4_eval(n, m);
    // Q4(m - ∂) = ∂^4 - e1 ∂^3 + e2 ∂^2 - e3 ∂ + e4
    const auto d1 = derivative(W, h, 1, half), d2 = derivative(W, h, 2, half),
               d3 = derivative(W, h, 3, half), d4 = derivative(W, h, 4, half);
    double worst = 0, scale = 0;
    for (std::size_t j = half; j + half < W.size(); ++j) {
        const double wp = std::pow(std::max(W[j], 0.0), p);
        const double lhs = d4[j] - e1 * d3[j] + e2 * d2[j] - e3 * d1[j] + e4 * W[j];
        worst = std::max(worst, std::abs(lhs - wp));
        scale = std::max(scale, wp);
    }
    return worst / scale;
}

double emden_fowler_residual(const RadialSolution& sol)
{
    return emden_fowler_residual(sol.params, sol.h, sol.W);
}

double y_integral_identity_check(const RadialSolution& sol, const Spectrum& spec,
                                 const IdentityOptions& opts)
{
    const double l4 = opts.lambda4.value_or(spec.l4());
    const double l3 = spec.l3();
    const std::size_t n = sol.size();
    std::size_t first = 0;
    while (first < n && !std::isfinite(sol.Z[first])) ++first;
    std::size_t last = first;
    double zmax = 0;
    for (std::size_t j = first; j < n && std::isfinite(sol.Z[j]); ++j) {
        zmax = std::max(zmax, std::abs(sol.Z[j]));
        last = j;
    }
    if (last - first < 8) throw GridTooCoarse("identity check needs a resolved Z range");
    std::size_t trunc = first;
    for (std::size_t j = first; j <= last; ++j)
        if (std::abs(sol.Z[j]) >= opts.truncation * zmax) trunc = j;

    const auto integral = backward_convolution(sol.Z, sol.h, first, trunc, l4);
    const double z_end = sol.Z[trunc], s_end = sol.s[trunc];

    std::size_t lo = first, hi = trunc;
    if (opts.s_lo) while (lo < hi && sol.s[lo] < *opts.s_lo) ++lo;
    if (opts.s_hi) while (hi > lo && sol.s[hi] > *opts.s_hi) --hi;
    double dev = 0, ymax = 0;
    for (std::size_t j = lo; j <= hi; ++j) {
        const double tail = z_end * std::exp(l4 * (sol.s[j] - s_end)) / (l4 - l3);
        const double predicted = -(integral[j] + tail);
        dev = std::max(dev, std::abs(predicted - sol.Y[j]));
        ymax = std::max(ymax, std::abs(sol.Y[j]));
    }
    return ymax == 0 ? dev : dev / ymax;
}

}  // namespace bihar
