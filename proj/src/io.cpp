#include "bihar/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "bihar/errors.hpp"

namespace bihar {

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& text)
{
    double x = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last) throw InvalidParams("not a number: '" + text + "'");
    return x;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(line);
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

void write_solution_csv(std::ostream& os, const RadialSolution& sol)
{
    os << "s,r,phi,W,Y,Z\n";
    for (std::size_t j = 0; j < sol.size(); ++j)
        os << format_double(sol.s[j]) << ',' << format_double(sol.r[j]) << ',' << format_double(sol.phi[j])
           << ',' << format_double(sol.W[j]) << ',' << format_double(sol.Y[j]) << ','
           << format_double(sol.Z[j]) << '\n';
}

SolutionTable read_solution_csv(std::istream& is)
{
    SolutionTable t;
    std::string line;
    if (!std::getline(is, line)) throw InvalidParams("empty solution file");
    t.header = split(line, ',');
    if (t.header.size() != 6) throw InvalidParams("solution file needs 6 columns");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) throw InvalidParams("malformed solution row: " + line);
        std::array<double, 6> row{};
        for (int i = 0; i < 6; ++i) row[i] = parse_double(f[i]);
        t.rows.push_back(row);
    }
    return t;
}

void write_sweep_header(std::ostream& os) { os << "n,p_c,N,N_formula,parity,rungs\n"; }

void write_sweep_row(std::ostream& os, const SweepRow& row)
{
    os << row.n << ',' << format_double(row.p_c) << ',' << row.N << ',' << row.N_formula << ','
       << format_double(row.parity) << ',';
    for (std::size_t i = 0; i < row.rungs.size(); ++i) os << (i ? ";" : "") << format_double(row.rungs[i]);
    os << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream& is)
{
    std::vector<SweepRow> rows;
    std::string line;
    if (!std::getline(is, line)) throw InvalidParams("empty sweep file");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) throw InvalidParams("malformed sweep row: " + line);
        SweepRow r;
        r.n = std::stoi(f[0]);
        r.p_c = parse_double(f[1]);
        r.N = std::stoi(f[2]);
        r.N_formula = std::stoi(f[3]);
        r.parity = parse_double(f[4]);
        if (!f[5].empty())
            for (const auto& x : split(f[5], ';')) r.rungs.push_back(parse_double(x));
        rows.push_back(r);
    }
    return rows;
}

Json to_json(const Spectrum& sp)
{
    return Json{{"lambda_star", sp.lambda_star},
                {"lambda", {sp.l1(), sp.l2(), sp.l3(), sp.l4()}},
                {"L", sp.L},
                {"degenerate", sp.degenerate},
                {"symmetry_residual", sp.symmetry_residual},
                {"root_residual", sp.root_residual}};
}

Json to_json(const CriticalLadder& lad)
{
    return Json{{"n", lad.n},
                {"p_c", lad.p_c},
                {"N", lad.N},
                {"N_formula", ladder_length_formula(lad.n)},
                {"rungs", lad.rungs},
                {"tail_limits", lad.tail_limits}};
}

Json to_json(const ExpansionFit& fit)
{
    Json coeffs = Json::array();
    for (const auto& c : fit.coefficients)
        coeffs.push_back({{"name", c.name},
                          {"value", c.value},
                          {"std_error", c.std_error},
                          {"stat_error", c.stat_error},
                          {"trunc_error", c.trunc_error},
                          {"resolved", c.resolved}});
    return Json{{"regime", to_string(fit.regime)},
                {"window", {fit.window.s_lo, fit.window.s_hi}},
                {"nodes", fit.nodes},
                {"a0", fit.a0},
                {"coefficients", coeffs},
                {"residual_slope", fit.residual_slope},
                {"theoretical_slope", fit.theoretical_slope},
                {"slope_bound", fit.slope_bound},
                {"slope_ok", fit.slope_ok()},
                {"condition", fit.condition}};
}

Json solution_summary(const RadialSolution& sol)
{
    bool negative = true, nondecreasing = true;
    for (std::size_t j = 0; j < sol.size(); ++j) {
        negative = negative && sol.Y[j] < 0;
        if (j > 0) nondecreasing = nondecreasing && sol.Y[j] >= sol.Y[j - 1];
    }
    return Json{{"n", sol.params.n()},
                {"p", sol.params.p()},
                {"alpha", sol.alpha},
                {"v0", sol.v0},
                {"L", sol.L},
                {"r_max", sol.r.back()},
                {"final_ratio", sol.W.back() / sol.L},
                {"error_estimate", sol.error_estimate},
                {"Y_negative", negative},
                {"Y_nondecreasing", nondecreasing},
                {"emden_fowler_residual", emden_fowler_residual(sol)},
                {"stages", sol.stages},
                {"bisection_steps", sol.bisection_steps},
                {"nodes", sol.size()}};
}

}  // namespace bihar
