#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "bihar/errors.hpp"
#include "bihar/expansion.hpp"
#include "bihar/io.hpp"
#include "bihar/kernels.hpp"
#include "bihar/ladder.hpp"
#include "bihar/radial.hpp"
#include "bihar/spectrum.hpp"
#include "bihar/verify.hpp"

using namespace bihar;

namespace {

enum Exit { kOk = 0, kInput = 2, kVerify = 3, kNumeric = 4, kInterrupted = 130 };

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

struct Options {
    int n = 13;
    std::string p = "pc";
    double alpha = 1.0;
    double r_max = 1e4;
    std::vector<double> window;
    std::vector<int> n_range{13, 60};
    std::string scope = "all";
    std::string out;
    std::string format;  ///< csv for sweep tables, json for reports unless given
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    // tolerances
    double tol_integrator = ShootControls{}.rtol;
    double tol_stage = ShootControls{}.stage_tol;
    double tol_target = ShootControls{}.target_tol;
    double tol_fit = FitOptions{}.slack;
    double tol_rung = kRungTol;
};

// "pc", "pc+0.5", "pc-1e-3" or a plain number
double resolve_p(int n, const std::string& text)
{
    if (text.rfind("pc", 0) == 0) {
        const double pc = compute_pc(n);
        const std::string rest = text.substr(2);
        if (rest.empty()) return pc;
        if (rest[0] != '+' && rest[0] != '-') throw InvalidParams("cannot read p = '" + text + "'");
        const double d = parse_double(rest.substr(1));
        return rest[0] == '+' ? pc + d : pc - d;
    }
    return parse_double(text);
}

ShootControls controls(const Options& o)
{
    ShootControls c;
    c.rtol = o.tol_integrator;
    c.stage_tol = o.tol_stage;
    c.target_tol = o.tol_target;
    c.r_max = o.r_max;
    return c;
}

void validate(const Options& o)
{
    for (double t : {o.tol_integrator, o.tol_stage, o.tol_target, o.tol_fit, o.tol_rung})
        if (!(t > 0)) throw InvalidParams("tolerances must be positive");
    if (!(o.r_max > 10)) throw InvalidParams("--r-max must exceed 10");
    if (!(o.alpha > 0)) throw InvalidParams("--alpha must be positive");
    if (o.jobs < 1) throw InvalidParams("--jobs must be at least 1");
}

// Output goes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw InvalidParams("cannot open '" + path + "' for writing");
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }
    bool to_file() const { return file_ != nullptr; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void emit_report(const Options& o, const Json& js)
{
    Sink sink(o.out);
    if (o.format == "json") {
        sink.os() << js.dump(2) << '\n';
        return;
    }
    sink.os() << "key,value\n";
    // arrays are joined by ';' as in the sweep table
    const auto cell = [](const Json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (!v.is_array()) return v.dump();
        std::string out;
        for (const auto& e : v) out += (out.empty() ? "" : ";") + e.dump();
        return out;
    };
    for (const auto& [k, v] : js.items()) sink.os() << k << ',' << cell(v) << '\n';
}

int cmd_spectrum(const Options& o)
{
    if (o.n <= 12 && o.p.rfind("pc", 0) == 0) {
        std::cerr << "n = " << o.n << ": p_c is infinite for n <= 12 (the defining inequality never reverses), "
                  << "so every p above the Sobolev exponent is subcritical\n";
        return kInput;
    }
    const ProblemParams pp(o.n, resolve_p(o.n, o.p));
    Spectrum sp;
    try {
        sp = compute_spectrum(pp);
    } catch (const SubcriticalInput& e) {
        std::cerr << e.what() << "\n";
        if (o.n <= 12)
            std::cerr << "hint: p_c is infinite for n <= 12, so no real spectrum exists at any p\n";
        else
            std::cerr << "hint: real spectra need p >= p_c(" << o.n << ") = " << format_double(compute_pc(o.n)) << "\n";
        return kInput;
    }
    Json js{{"n", o.n}, {"p", pp.p()}};
    js.update(to_json(sp));
    emit_report(o, js);
    return kOk;
}

int cmd_critical(const Options& o)
{
    if (o.n <= 12) {
        std::cerr << "n = " << o.n << ": p_c is infinite for n <= 12, so there is no critical ladder\n";
        Json js{{"n", o.n}, {"p_c", "inf"}, {"N", 0}};
        emit_report(o, js);
        return kOk;
    }
    Json js;
    bool ok = true;
    try {
        js = to_json(compute_ladder(o.n));
    } catch (const LadderMismatch& e) {
        js = Json{{"n", o.n}, {"N_formula", ladder_length_formula(o.n)}, {"ladder_error", e.what()}};
        ok = false;
    }
    if (o.n % 2 == 1) {
        const ParityReport pr = parity_boundary_check(o.n);
        js["parity_factored"] = pr.factored;
        js["parity_direct"] = pr.direct;
        js["parity_ok"] = pr.ok();
        ok = ok && pr.ok();
    }
    js["N_matches_formula"] = ok && js.contains("N") && js["N"] == js["N_formula"];
    emit_report(o, js);
    return ok ? kOk : kVerify;
}

int cmd_solve(const Options& o)
{
    const ProblemParams pp(o.n, resolve_p(o.n, o.p));
    const RadialSolution sol = shoot(pp, o.alpha, controls(o));
    Sink sink(o.out);
    write_solution_csv(sink.os(), sol);
    (sink.to_file() ? std::cout : std::cerr) << solution_summary(sol).dump(2) << '\n';
    return kOk;
}

int cmd_expand(const Options& o)
{
    const ProblemParams pp(o.n, resolve_p(o.n, o.p));
    const CriticalLadder lad = compute_ladder(o.n);
    const Regime reg = detect_regime(pp, lad, o.tol_rung);
    const Spectrum sp = compute_spectrum(pp);
    const RadialSolution sol = shoot(pp, o.alpha, controls(o));
    FitWindow w = default_window(sol, sp);
    if (!o.window.empty()) {
        if (o.window.size() != 2 || !(o.window[1] > o.window[0]) || o.window[0] < sol.s.front() ||
            o.window[1] > sol.s.back())
            throw InvalidParams("--window must be lo,hi inside the resolved range [" + format_double(sol.s.front()) +
                                ", " + format_double(sol.s.back()) + "]");
        w = {o.window[0], o.window[1]};
    }
    FitOptions fo;
    fo.slack = o.tol_fit;
    const StabilityReport st = window_shift_stability(sol, sp, reg, w, 0.1, fo);
    if (o.format == "csv") {
        Sink sink(o.out);
        sink.os() << "name,value,std_error,stat_error,trunc_error,resolved\n";
        for (const auto& c : st.base.coefficients)
            sink.os() << c.name << ',' << format_double(c.value) << ',' << format_double(c.std_error) << ','
                      << format_double(c.stat_error) << ',' << format_double(c.trunc_error) << ',' << c.resolved
                      << '\n';
        return kOk;
    }
    Json js{{"n", o.n}, {"p", pp.p()}, {"alpha", o.alpha}, {"L", sol.L}};
    js["fit"] = to_json(st.base);
    js["window_shift"] = {{"shifted_window", {st.shifted.window.s_lo, st.shifted.window.s_hi}},
                          {"ratios", st.ratios},
                          {"worst", st.worst},
                          {"ok", st.ok()}};
    emit_report(o, js);
    return kOk;
}

int cmd_verify(const Options& o)
{
    std::vector<verify::CheckResult> results;
    if (o.scope == "acceptance" || o.scope == "all") results = verify::acceptance_suite(o.jobs);
    if (o.scope == "properties" || o.scope == "all") {
        auto more = verify::property_suite(o.jobs);
        results.insert(results.end(), more.begin(), more.end());
    }
    Sink sink(o.out);
    verify::print_results(sink.os(), results, &std::cerr);
    for (const auto& r : results)
        if (!r.passed) return kVerify;
    return kOk;
}

int cmd_sweep(const Options& o)
{
    if (o.n_range.size() != 2 || o.n_range[0] < 13 || o.n_range[1] > 200 || o.n_range[0] > o.n_range[1])
        throw InvalidParams("--n-range must be lo,hi with 13 <= lo <= hi <= 200");
    std::signal(SIGINT, on_sigint);
    Sink sink(o.out);
    std::ostream& os = sink.os();
    Json rows = Json::array();
    if (o.format == "csv") write_sweep_header(os);
    os.flush();
    const auto got = ladder_sweep(
        o.n_range[0], o.n_range[1], o.jobs,
        [&](const SweepRow& r) {
            if (o.format == "csv") {
                write_sweep_row(os, r);
                os.flush();
            } else {
                rows.push_back({{"n", r.n},
                                {"p_c", r.p_c},
                                {"N", r.N},
                                {"N_formula", r.N_formula},
                                {"parity", r.parity},
                                {"rungs", r.rungs}});
            }
        },
        &g_interrupted);
    if (o.format == "json") os << rows.dump(2) << '\n';
    os.flush();
    if (g_interrupted) {
        std::cerr << "interrupted after " << got.size() << " rows\n";
        return kInterrupted;
    }
    for (const auto& r : got)
        if (!r.ok()) return kVerify;
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Radial entire solutions of the biharmonic Lane-Emden equation"};
    app.set_config("--config", "", "TOML or INI file with option defaults");
    app.require_subcommand(1);
    Options o;

    const auto add_np = [&](CLI::App* sub) {
        sub->add_option("--n", o.n, "dimension")->required();
        sub->add_option("--p", o.p, "exponent: a number, pc, or pc+<offset>")->capture_default_str();
    };
    const auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", o.out, "output file (default stdout)");
    };
    const auto add_shoot = [&](CLI::App* sub) {
        sub->add_option("--alpha", o.alpha, "φ(0)")->capture_default_str();
        sub->add_option("--r-max", o.r_max)->capture_default_str();
        sub->add_option("--tol-integrator", o.tol_integrator)->capture_default_str();
        sub->add_option("--tol-stage", o.tol_stage)->capture_default_str();
        sub->add_option("--tol-target", o.tol_target)->capture_default_str();
    };
    const auto add_jobs = [&](CLI::App* sub) { sub->add_option("--jobs", o.jobs)->capture_default_str(); };

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the linearization at the singular solution");
    add_np(spectrum);
    add_format(spectrum);

    auto* critical = app.add_subcommand("critical", "p_c and the critical ladder for one n");
    critical->add_option("--n", o.n)->required();
    add_format(critical);

    auto* solve = app.add_subcommand("solve", "shoot for the entire solution and dump it as CSV");
    add_np(solve);
    add_shoot(solve);
    solve->add_option("--out", o.out, "CSV dump (default stdout; the summary then goes to stderr)");

    auto* expand = app.add_subcommand("expand", "fit the asymptotic expansion to a shooting run");
    add_np(expand);
    add_shoot(expand);
    add_format(expand);
    expand->add_option("--window", o.window, "fit window lo,hi in s = log r")->delimiter(',')->expected(2);
    expand->add_option("--tol-fit", o.tol_fit, "residual slope slack in units of |λ3|")->capture_default_str();
    expand->add_option("--tol-rung", o.tol_rung, "relative distance treated as on a rung")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run the acceptance and property checks");
    verify->add_option("--scope", o.scope)->check(CLI::IsMember({"acceptance", "properties", "all"}))->capture_default_str();
    verify->add_option("--out", o.out, "report file (default stdout)");
    add_jobs(verify);

    auto* sweep = app.add_subcommand("sweep", "ladder table over a range of n");
    sweep->add_option("--n-range", o.n_range, "lo,hi")->delimiter(',')->expected(2)->capture_default_str();
    add_format(sweep);
    add_jobs(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInput;
    }
    if (o.format.empty()) o.format = sweep->parsed() ? "csv" : "json";

    try {
        validate(o);
        if (spectrum->parsed()) return cmd_spectrum(o);
        if (critical->parsed()) return cmd_critical(o);
        if (solve->parsed()) return cmd_solve(o);
        if (expand->parsed()) return cmd_expand(o);
        if (verify->parsed()) return cmd_verify(o);
        if (sweep->parsed()) return cmd_sweep(o);
    } catch (const InvalidParams& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const SubcriticalInput& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const NoPcValue& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const WindowTooShort& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const LadderMismatch& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kVerify;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}
