#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bihar/spectrum.hpp"

namespace bihar {

/// One row of the ladder sweep table.
struct SweepRow {
    int n = 0;
    double p_c = 0;
    int N = 0;
    int N_formula = 0;
    std::vector<double> rungs;
    /// F((n-9)/2); changes sign between n = 19 and n = 20.
    double parity = 0;
    std::string error;  ///< empty unless the ladder check failed

    bool ok() const { return error.empty() && N == N_formula; }
};

SweepRow sweep_row(int n);

using RowSink = std::function<void(const SweepRow&)>;

/// Rows for n_lo..n_hi, computed on `jobs` threads and delivered to `sink` in
/// input order as soon as each prefix is complete. When *cancel becomes true
/// no further rows are delivered; the returned prefix is complete.
std::vector<SweepRow> ladder_sweep(int n_lo, int n_hi, int jobs, const RowSink& sink = {},
                                   const std::atomic<bool>* cancel = nullptr);
std::vector<SweepRow> ladder_sweep_serial(int n_lo, int n_hi);

/// Spectra on the grid n × (p_c + offsets[i]); row-major in n.
struct SpectrumCell {
    int n = 0;
    double p = 0;
    Spectrum spectrum;
};

std::vector<SpectrumCell> spectrum_grid(int n_lo, int n_hi, const std::vector<double>& offsets, int jobs);
std::vector<SpectrumCell> spectrum_grid_serial(int n_lo, int n_hi, const std::vector<double>& offsets);

/// Random (n, p, k) triples for the sign-criterion check: sign R_k(p) against
/// sign(kλ3 - λ2).
struct SignSample {
    int n = 0;
    int k = 0;
    double p = 0;
    double rk = 0;
    double gap = 0;        ///< kλ3 - λ2
    double rung_distance;  ///< min over rungs |p - p_j| / p_j
    bool agree = false;
};

std::vector<SignSample> sign_criterion_samples(int count, std::uint64_t seed, int jobs);
std::vector<SignSample> sign_criterion_samples_serial(int count, std::uint64_t seed);

}  // namespace bihar
