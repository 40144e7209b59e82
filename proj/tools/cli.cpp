// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace randstep::cli {

namespace {

int default_workers()
{
    unsigned const hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int parse_int(std::string const& s, char const* what)
{
    int v = 0;
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw UsageError(std::string("invalid ") + what + " '" + s + "'");
    }
    return v;
}

struct RunOptions {
    std::string problem;
    std::string schemes;
    std::string n_range;
    double lambda = 2.0;
    int K = 10;
    double R = 10.0;
    double ptilde = 4.0;
    int dof = 127;
    int mc = 200;
    std::uint64_t seed = kDefaultMasterSeed;
    std::string error_mode = "final";
    int workers = default_workers();
    std::string out;
    std::string svg;
};

struct RatesOptions {
    std::string in;
    std::string schemes;
    std::string window;
    std::string error_mode = "final";
    std::string out;
};

struct FigureCliOptions {
    std::string scale = "desk";
    std::uint64_t seed = kDefaultMasterSeed;
    int workers = default_workers();
    std::string out;
    std::string rates_out;
    std::string svg;
};

ErrorMode parse_error_mode(std::string const& s)
{
    if (s == "final") return ErrorMode::FinalTime;
    if (s == "max") return ErrorMode::MaxOverGrid;
    throw UsageError("--error-mode must be 'final' or 'max', got '" + s + "'");
}

// RANDSTEP_SEED, when set, takes precedence over --seed.
std::uint64_t resolve_seed(std::uint64_t flag_value)
{
    char const* env = std::getenv("RANDSTEP_SEED");
    if (env == nullptr || *env == '\0') return flag_value;
    std::string const s(env);
    std::uint64_t v = 0;
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw UsageError("RANDSTEP_SEED must be a decimal unsigned integer, got '" + s + "'");
    }
    return v;
}

std::ofstream open_output(std::string const& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    return f;
}

std::string join_schemes(std::vector<StepScheme> const& schemes)
{
    std::string s;
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        if (i) s += ',';
        s += scheme_id(schemes[i]);
    }
    return s;
}

std::vector<int> exponents_of(RateWindow w)
{
    std::vector<int> v;
    for (int n = w.lo; n <= w.hi; ++n) v.push_back(n);
    return v;
}

void add_seed_flags(CLI::App* sub, std::uint64_t& seed, int& workers)
{
    sub->add_option("--seed", seed,
                    "Master seed (decimal); RANDSTEP_SEED overrides it when set")
        ->capture_default_str();
    sub->add_option("--workers", workers, "Worker threads for Monte Carlo replicas")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

int run_ode(RunOptions const& o, std::ostream& out)
{
    if (o.problem != "prothero-robinson") {
        throw UsageError("ode: unknown problem '" + o.problem + "' (expected prothero-robinson)");
    }
    auto const schemes = parse_scheme_list(o.schemes);
    RateWindow const range = parse_range(o.n_range);
    ErrorMode const mode = parse_error_mode(o.error_mode);
    std::uint64_t const seed = resolve_seed(o.seed);
    if (o.mc < 1) throw UsageError("--mc must be at least 1");

    ProtheroRobinsonSpec const pr{o.lambda, SawtoothSpec{o.K, SawtoothAmplitude::Ode}};
    pr.sawtooth.validate();
    ExperimentSpec spec;
    OdeBenchmark bench;
    bench.problem = make_prothero_robinson(pr);
    bench.exact = [s = pr.sawtooth](double t) { return Vector::Constant(1, sawtooth_g(s, t)); };
    spec.benchmark = std::move(bench);
    spec.schemes = schemes;
    spec.step_exponents = exponents_of(range);
    spec.mc_replicas = o.mc;
    spec.master_seed = seed;
    spec.workers = o.workers;
    spec.validate();

    out << "config: command=ode problem=" << o.problem << " lambda=" << o.lambda << " K=" << o.K
        << " scheme=" << join_schemes(schemes) << " n=" << range.lo << ':' << range.hi
        << " mc=" << o.mc << " seed=" << seed << " error-mode=" << o.error_mode
        << " workers=" << o.workers << " out=" << o.out
        << (o.svg.empty() ? "" : " svg=" + o.svg) << '\n';
    for (StepScheme s : schemes) {
        if (is_implicit(s) &&
            check_step_restriction(std::ldexp(1.0, -range.lo), o.lambda) ==
                StepRestriction::StabilityWarning) {
            out << "warning: k*nu >= 1/4 at k = 2^-" << range.lo << " for " << scheme_id(s) << '\n';
        }
    }

    ErrorTable const table = run_mc(spec);
    auto file = open_output(o.out);
    write_error_table(file, table);
    if (!o.svg.empty()) emit_svg_loglog(table, o.svg, mode);
    out << "wrote " << table.rows.size() << " rows to " << o.out << '\n';
    return kExitOk;
}

int run_pde(RunOptions const& o, std::ostream& out)
{
    if (o.problem != "semilinear-heat") {
        throw UsageError("pde: unknown problem '" + o.problem + "' (expected semilinear-heat)");
    }
    auto const schemes = parse_scheme_list(o.schemes);
    RateWindow const range = parse_range(o.n_range);
    ErrorMode const mode = parse_error_mode(o.error_mode);
    std::uint64_t const seed = resolve_seed(o.seed);
    if (o.mc < 1) throw UsageError("--mc must be at least 1");
    if (o.dof < 1) throw UsageError("--dof must be at least 1");

    ExperimentSpec spec;
    PdeBenchmark bench;
    bench.problem = make_semilinear_heat(SawtoothSpec{o.K, SawtoothAmplitude::Pde},
                                         TruncatedPowerSpec{o.R, o.ptilde});
    bench.mesh_dof = o.dof;
    spec.benchmark = std::move(bench);
    spec.schemes = schemes;
    spec.step_exponents = exponents_of(range);
    spec.mc_replicas = o.mc;
    spec.master_seed = seed;
    spec.workers = o.workers;
    spec.validate();

    out << "config: command=pde problem=" << o.problem << " K=" << o.K << " R=" << o.R
        << " ptilde=" << o.ptilde << " dof=" << o.dof << " scheme=" << join_schemes(schemes)
        << " n=" << range.lo << ':' << range.hi << " mc=" << o.mc << " seed=" << seed
        << " error-mode=" << o.error_mode << " workers=" << o.workers << " out=" << o.out
        << (o.svg.empty() ? "" : " svg=" + o.svg) << '\n';

    ErrorTable const table = run_mc(spec);
    auto file = open_output(o.out);
    write_error_table(file, table);
    if (!o.svg.empty()) emit_svg_loglog(table, o.svg, mode);
    out << "wrote " << table.rows.size() << " rows to " << o.out << '\n';
    return kExitOk;
}

int run_residual(RunOptions const& o, std::ostream& out)
{
    if (o.problem != "prothero-robinson") {
        throw UsageError("residual: unknown problem '" + o.problem +
                         "' (expected prothero-robinson)");
    }
    RateWindow const range = parse_range(o.n_range);
    std::uint64_t const seed = resolve_seed(o.seed);
    if (o.mc < 1) throw UsageError("--mc must be at least 1");
    ProtheroRobinsonSpec const pr{o.lambda, SawtoothSpec{o.K, SawtoothAmplitude::Ode}};
    pr.sawtooth.validate();
    OdeBenchmark bench;
    bench.problem = make_prothero_robinson(pr);
    bench.exact = [s = pr.sawtooth](double t) { return Vector::Constant(1, sawtooth_g(s, t)); };

    out << "config: command=residual problem=" << o.problem << " lambda=" << o.lambda
        << " K=" << o.K << " n=" << range.lo << ':' << range.hi << " mc=" << o.mc
        << " seed=" << seed << " out=" << o.out << '\n';

    auto const rows = residual_study(bench, range, o.mc, seed, 1 << o.K);
    auto file = open_output(o.out);
    file << "n,k,rms_residual,mean_residual\n";
    std::vector<double> ks, rms, mean;
    for (auto const& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%.16e,%.16e,%.16e\n", r.exponent, r.step_size,
                      r.rms_residual, r.mean_residual);
        file << buf;
        ks.push_back(r.step_size);
        rms.push_back(r.rms_residual);
        mean.push_back(r.mean_residual);
    }
    if (rows.size() >= 2) {
        out << "slope rms_residual: " << fit_loglog(ks, rms).slope << '\n';
        out << "slope mean_residual: " << fit_loglog(ks, mean).slope << '\n';
    }
    return kExitOk;
}

int run_rates(RatesOptions const& o, std::ostream& out)
{
    auto const schemes = parse_scheme_list(o.schemes);
    RateWindow const window = parse_range(o.window);
    ErrorMode const mode = parse_error_mode(o.error_mode);
    std::ifstream in(o.in, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + o.in + "' for reading");
    ErrorTable const table = read_error_table(in);

    out << "config: command=rates in=" << o.in << " scheme=" << join_schemes(schemes)
        << " window=" << window.lo << ':' << window.hi << " error-mode=" << o.error_mode
        << " out=" << (o.out.empty() ? "-" : o.out) << '\n';

    std::vector<RateFit> fits;
    for (StepScheme s : schemes) fits.push_back(fit_rate(table, s, window, mode));
    if (o.out.empty()) {
        write_rate_fits(out, fits);
    } else {
        auto file = open_output(o.out);
        write_rate_fits(file, fits);
    }
    return kExitOk;
}

int run_figure(std::string const& which, FigureCliOptions const& o, std::ostream& out)
{
    Scale scale = Scale::Desk;
    if (o.scale == "paper") {
        scale = Scale::Paper;
    } else if (o.scale != "desk") {
        throw UsageError("--scale must be 'desk' or 'paper', got '" + o.scale + "'");
    }
    FigureOptions const fo{scale, resolve_seed(o.seed), o.workers};
    std::string const rates_out = o.rates_out.empty() ? o.out + ".rates.csv" : o.rates_out;
    out << "config: command=" << which << " scale=" << o.scale << " seed=" << fo.master_seed
        << " workers=" << fo.workers << " out=" << o.out << " rates-out=" << rates_out
        << (o.svg.empty() ? "" : " svg=" + o.svg) << '\n';

    FigureResult fig;
    if (which == "fig1-left") {
        fig = reproduce_fig1_left(fo);
    } else if (which == "fig1-right") {
        fig = reproduce_fig1_right(fo);
    } else {
        fig = reproduce_fig2(fo);
    }
    {
        auto file = open_output(o.out);
        write_error_table(file, fig.table);
    }
    {
        auto file = open_output(rates_out);
        write_rate_fits(file, fig.fits);
    }
    if (!o.svg.empty()) {
        // Exploded explicit-scheme errors are omitted from the chart.
        ErrorTable plotted;
        for (auto const& r : fig.table.rows) {
            if (std::isfinite(r.rms_error_final) && r.rms_error_final > 0 && r.rms_error_final < 1e3) {
                plotted.rows.push_back(r);
            }
        }
        emit_svg_loglog(plotted, o.svg);
    }
    for (auto const& f : fig.fits) {
        out << "fit " << scheme_id(f.scheme) << " n=" << f.window.lo << ':' << f.window.hi
            << " slope=" << f.slope << '\n';
    }
    return kExitOk;
}

}  // namespace

RateWindow parse_range(std::string const& text)
{
    auto const colon = text.find(':');
    RateWindow w;
    if (colon == std::string::npos) {
        w.lo = w.hi = parse_int(text, "range");
    } else {
        w.lo = parse_int(text.substr(0, colon), "range start");
        w.hi = parse_int(text.substr(colon + 1), "range end");
    }
    if (w.hi < w.lo) throw UsageError("range '" + text + "' is empty");
    if (w.lo < 0) throw UsageError("range '" + text + "' has a negative exponent");
    return w;
}

std::vector<StepScheme> parse_scheme_list(std::string const& text)
{
    std::vector<StepScheme> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            StepScheme const s = parse_scheme(item);
            if (std::find(out.begin(), out.end(), s) != out.end()) {
                throw UsageError("scheme '" + item + "' listed twice");
            }
            out.push_back(s);
        } catch (IndexError const& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("no scheme given");
    return out;
}

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Randomized backward Euler experiments for time-irregular evolution equations",
                 "randstep"};
    app.require_subcommand(1);

    RunOptions ode_opts;
    RunOptions pde_opts;
    pde_opts.K = 7;
    pde_opts.mc = 50;
    RunOptions res_opts;
    res_opts.K = 8;
    res_opts.mc = 1000;
    RatesOptions rates_opts;
    FigureCliOptions fig_opts[3];
    char const* const fig_names[3] = {"fig1-left", "fig1-right", "fig2"};

    auto* ode = app.add_subcommand("ode", "Prothero-Robinson ODE error table over a step-size sweep");
    ode->add_option("--problem", ode_opts.problem, "Problem id: prothero-robinson")->required();
    ode->add_option("--scheme", ode_opts.schemes, "Comma list of rbe, be, rfe")->required();
    ode->add_option("--lambda", ode_opts.lambda, "Stiffness parameter lambda")->capture_default_str();
    ode->add_option("--K", ode_opts.K, "Sawtooth half period p = 2^-K")->capture_default_str();
    ode->add_option("--n", ode_opts.n_range, "Step exponents lo:hi, k = 2^-n")->required();
    ode->add_option("--mc", ode_opts.mc, "Monte Carlo replicas")->capture_default_str();
    add_seed_flags(ode, ode_opts.seed, ode_opts.workers);
    ode->add_option("--error-mode", ode_opts.error_mode, "final or max (used for --svg)")
        ->capture_default_str();
    ode->add_option("--out", ode_opts.out, "Error table CSV")->required();
    ode->add_option("--svg", ode_opts.svg, "Optional log-log SVG chart");

    auto* pde = app.add_subcommand("pde", "Semilinear heat equation error table");
    pde->add_option("--problem", pde_opts.problem, "Problem id: semilinear-heat")->required();
    pde->add_option("--scheme", pde_opts.schemes, "Comma list of rbe, be")->required();
    pde->add_option("--K", pde_opts.K, "Oscillation half period P = 2^-K")->capture_default_str();
    pde->add_option("--R", pde_opts.R, "Cap R of the truncated power")->capture_default_str();
    pde->add_option("--ptilde", pde_opts.ptilde, "Power of the truncated power")->capture_default_str();
    pde->add_option("--dof", pde_opts.dof, "Interior finite element nodes")->capture_default_str();
    pde->add_option("--n", pde_opts.n_range, "Step exponents lo:hi, k = 2^-n")->required();
    pde->add_option("--mc", pde_opts.mc, "Monte Carlo replicas")->capture_default_str();
    add_seed_flags(pde, pde_opts.seed, pde_opts.workers);
    pde->add_option("--error-mode", pde_opts.error_mode, "final or max (used for --svg)")
        ->capture_default_str();
    pde->add_option("--out", pde_opts.out, "Error table CSV")->required();
    pde->add_option("--svg", pde_opts.svg, "Optional log-log SVG chart");

    auto* res = app.add_subcommand("residual", "Local residual scaling of the exact solution");
    res->add_option("--problem", res_opts.problem, "Problem id: prothero-robinson")->required();
    res->add_option("--lambda", res_opts.lambda, "Stiffness parameter lambda")->capture_default_str();
    res->add_option("--K", res_opts.K, "Sawtooth half period p = 2^-K")->capture_default_str();
    res->add_option("--n", res_opts.n_range, "Step exponents lo:hi, k = 2^-n")->required();
    res->add_option("--mc", res_opts.mc, "Monte Carlo replicas")->capture_default_str();
    res->add_option("--seed", res_opts.seed,
                    "Master seed (decimal); RANDSTEP_SEED overrides it when set")
        ->capture_default_str();
    res->add_option("--out", res_opts.out, "Residual table CSV")->required();

    auto* rates = app.add_subcommand("rates", "Fit convergence rates to an error table");
    rates->add_option("--in", rates_opts.in, "Error table CSV")->required();
    rates->add_option("--scheme", rates_opts.schemes, "Comma list of schemes to fit")->required();
    rates->add_option("--window", rates_opts.window, "Exponent window lo:hi")->required();
    rates->add_option("--error-mode", rates_opts.error_mode, "final or max")->capture_default_str();
    rates->add_option("--out", rates_opts.out, "Rate CSV (default: standard output)");

    CLI::App* figs[3];
    for (int i = 0; i < 3; ++i) {
        figs[i] = app.add_subcommand(fig_names[i], std::string("Reproduce ") + fig_names[i] +
                                                       " at desk or paper scale");
        figs[i]->add_option("--scale", fig_opts[i].scale, "desk or paper")->capture_default_str();
        add_seed_flags(figs[i], fig_opts[i].seed, fig_opts[i].workers);
        figs[i]->add_option("--out", fig_opts[i].out, "Error table CSV")->required();
        figs[i]->add_option("--rates-out", fig_opts[i].rates_out,
                            "Rate CSV (default: <out>.rates.csv)");
        figs[i]->add_option("--svg", fig_opts[i].svg, "Optional log-log SVG chart");
    }

    std::vector<char const*> argv;
    argv.reserve(args.size());
    for (auto const& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (ode->parsed()) return run_ode(ode_opts, out);
        if (pde->parsed()) return run_pde(pde_opts, out);
        if (res->parsed()) return run_residual(res_opts, out);
        if (rates->parsed()) return run_rates(rates_opts, out);
        for (int i = 0; i < 3; ++i) {
            if (figs[i]->parsed()) return run_figure(fig_names[i], fig_opts[i], out);
        }
    } catch (NumericalError const& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace randstep::cli
