#include "bihar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <omp.h>

#include "bihar/errors.hpp"
#include "bihar/ladder.hpp"

namespace bihar {

SweepRow sweep_row(int n)
{
    SweepRow row;
    row.n = n;
    row.N_formula = ladder_length_formula(n);
    row.parity = f_quartic(n, 0.5 * (n - 9));
    try {
        const CriticalLadder lad = compute_ladder(n);
        row.p_c = lad.p_c;
        row.N = lad.N;
        row.rungs = lad.rungs;
    } catch (const LadderMismatch& e) {
        row.p_c = compute_pc(n);
        row.error = e.what();
    }
    return row;
}

std::vector<SweepRow> ladder_sweep(int n_lo, int n_hi, int jobs, const RowSink& sink,
                                   const std::atomic<bool>* cancel)
{
    std::vector<SweepRow> out;
    if (n_hi < n_lo) return out;
    out.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
    bool stopped = false;
#pragma omp parallel for ordered schedule(dynamic) num_threads(std::max(1, jobs))
    for (int n = n_lo; n <= n_hi; ++n) {
        const bool skip = cancel && cancel->load();
        SweepRow row;
        if (!skip) row = sweep_row(n);
#pragma omp ordered
        {
            if (skip || (cancel && cancel->load())) stopped = true;
            if (!stopped) {
                out.push_back(row);
                if (sink) sink(out.back());
            }
        }
    }
    return out;
}

std::vector<SweepRow> ladder_sweep_serial(int n_lo, int n_hi)
{
    std::vector<SweepRow> out;
    for (int n = n_lo; n <= n_hi; ++n) out.push_back(sweep_row(n));
    return out;
}

namespace {

std::vector<std::pair<int, double>> grid_points(int n_lo, int n_hi, const std::vector<double>& offsets)
{
    std::vector<std::pair<int, double>> pts;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double pc = compute_pc(n);
        for (double d : offsets) pts.emplace_back(n, pc + d);
    }
    return pts;
}

struct Draw {
    int n, k;
    double p;
};

std::vector<Draw> sign_draws(int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dn(13, 60), dk(1, 8);
    std::uniform_real_distribution<double> dlog(std::log(1e-3), std::log(500.0));
    std::vector<Draw> d;
    for (int i = 0; i < count; ++i) {
        const int n = dn(rng), k = dk(rng);
        d.push_back({n, k, std::exp(dlog(rng))});
    }
    return d;
}

SignSample evaluate(const Draw& d, const CriticalLadder& lad)
{
    SignSample s;
    s.n = d.n;
    s.k = d.k;
    s.p = lad.p_c + d.p;
    s.rk = rk_eval(d.n, d.k, s.p);
    const Spectrum sp = compute_spectrum(ProblemParams(d.n, s.p));
    s.gap = d.k * sp.l3() - sp.l2();
    s.rung_distance = std::numeric_limits<double>::infinity();
    for (double pk : lad.rungs) s.rung_distance = std::min(s.rung_distance, std::abs(s.p - pk) / pk);
    s.agree = (s.rk > 0) == (s.gap > 0) && s.rk != 0 && s.gap != 0;
    return s;
}

}  // namespace

std::vector<SpectrumCell> spectrum_grid(int n_lo, int n_hi, const std::vector<double>& offsets, int jobs)
{
    const auto pts = grid_points(n_lo, n_hi, offsets);
    std::vector<SpectrumCell> out(pts.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
    for (std::size_t i = 0; i < pts.size(); ++i)
        out[i] = {pts[i].first, pts[i].second, compute_spectrum(ProblemParams(pts[i].first, pts[i].second))};
    return out;
}

std::vector<SpectrumCell> spectrum_grid_serial(int n_lo, int n_hi, const std::vector<double>& offsets)
{
    std::vector<SpectrumCell> out;
    for (const auto& [n, p] : grid_points(n_lo, n_hi, offsets))
        out.push_back({n, p, compute_spectrum(ProblemParams(n, p))});
    return out;
}

std::vector<SignSample> sign_criterion_samples(int count, std::uint64_t seed, int jobs)
{
    const auto draws = sign_draws(count, seed);
    std::vector<CriticalLadder> ladders(48);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
    for (int n = 13; n <= 60; ++n) ladders[static_cast<std::size_t>(n - 13)] = compute_ladder(n);
    std::vector<SignSample> out(draws.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
    for (std::size_t i = 0; i < draws.size(); ++i)
        out[i] = evaluate(draws[i], ladders[static_cast<std::size_t>(draws[i].n - 13)]);
    return out;
}

std::vector<SignSample> sign_criterion_samples_serial(int count, std::uint64_t seed)
{
    std::vector<SignSample> out;
    std::vector<CriticalLadder> ladders;
    for (int n = 13; n <= 60; ++n) ladders.push_back(compute_ladder(n));
    for (const Draw& d : sign_draws(count, seed))
        out.push_back(evaluate(d, ladders[static_cast<std::size_t>(d.n - 13)]));
    return out;
}

}  // namespace bihar
