#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "bihar/expansion.hpp"
#include "bihar/kernels.hpp"
#include "bihar/ladder.hpp"
#include "bihar/radial.hpp"
#include "bihar/spectrum.hpp"

namespace bihar {

using Json = nlohmann::ordered_json;

/// %.17g: enough digits for an exact round trip.
std::string format_double(double x);
/// Exact inverse of format_double; also accepts nan/inf. Throws InvalidParams.
double parse_double(const std::string& text);

/// Columns s, r, phi, W, Y, Z; one row per node.
void write_solution_csv(std::ostream& os, const RadialSolution& sol);

struct SolutionTable {
    std::vector<std::string> header;
    std::vector<std::array<double, 6>> rows;
};

SolutionTable read_solution_csv(std::istream& is);

/// Columns n, p_c, N, N_formula, parity, rungs (rungs joined by ';').
void write_sweep_header(std::ostream& os);
void write_sweep_row(std::ostream& os, const SweepRow& row);
std::vector<SweepRow> read_sweep_csv(std::istream& is);

Json to_json(const Spectrum& sp);
Json to_json(const CriticalLadder& lad);
Json to_json(const ExpansionFit& fit);

/// v0, final r^m φ/L, monotonicity and residual diagnostics.
Json solution_summary(const RadialSolution& sol);

}  // namespace bihar
