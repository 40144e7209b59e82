// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#include "randstep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "randstep/error.hpp"

namespace randstep {

namespace {

struct ReplicaOutcome {
    double error_final = 0.0;
    double error_max = 0.0;
    double mean_iterations = 0.0;
    std::exception_ptr failure;
};

double mean_of(std::vector<int> const& v)
{
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (int x : v) s += x;
    return s / static_cast<double>(v.size());
}

ReplicaOutcome run_replica(OdeBenchmark const& bench, TimeGrid const& grid,
                           StepScheme scheme, SeedSpec seed, NewtonConfig const& cfg)
{
    NodeStream stream = make_stream(seed);
    Trajectory const traj = solve(bench.problem, grid, scheme, stream, cfg);
    ReplicaOutcome out;
    out.error_final = (traj.states.back() - bench.exact(grid.final_time())).norm();
    for (int n = 0; n <= grid.steps(); ++n) {
        out.error_max = std::max(out.error_max, (traj.states[n] - bench.exact(grid.node(n))).norm());
    }
    out.mean_iterations = mean_of(traj.newton_iterations);
    return out;
}

ReplicaOutcome run_replica(PdeBenchmark const& bench, FemSystem const& sys,
                           TimeGrid const& grid, StepScheme scheme, SeedSpec seed,
                           NewtonConfig const& cfg)
{
    NodeStream stream = make_stream(seed);
    PdeTrajectory const traj = pde_solve(bench.problem, sys, grid, scheme, stream, cfg);
    auto const& exact = *bench.problem.exact;
    auto error_at = [&](int n) {
        double const t = grid.node(n);
        return fem::l2_error(sys.mesh, traj.fields[n], [&](double x) { return exact(t, x); });
    };
    ReplicaOutcome out;
    out.error_final = error_at(grid.steps());
    for (int n = 0; n <= grid.steps(); ++n) out.error_max = std::max(out.error_max, error_at(n));
    out.mean_iterations = mean_of(traj.newton_iterations);
    return out;
}

// Re-raises a replica failure with experiment context, keeping the
// numerical/non-numerical distinction used for CLI exit codes.
[[noreturn]] void rethrow_with_context(std::exception_ptr failure, std::string const& context)
{
    try {
        std::rethrow_exception(failure);
    } catch (NonConvergence const& e) {
        throw NonConvergence(context + ": " + e.what());
    } catch (StepRestrictionViolated const& e) {
        throw StepRestrictionViolated(context + ": " + e.what());
    } catch (SingularMatrix const& e) {
        throw SingularMatrix(context + ": " + e.what());
    } catch (NumericalError const& e) {
        throw NumericalError(context + ": " + e.what());
    } catch (DomainError const& e) {
        throw DomainError(context + ": " + e.what());
    } catch (Error const& e) {
        throw IndexError(context + ": " + e.what());
    }
}

template <class Task>
std::vector<ReplicaOutcome> run_parallel(int replicas, int workers, Task const& task)
{
    std::vector<ReplicaOutcome> outcomes(replicas);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next.fetch_add(1); r < replicas; r = next.fetch_add(1)) {
            try {
                outcomes[r] = task(r);
            } catch (...) {
                outcomes[r].failure = std::current_exception();
            }
        }
    };
    int const threads = std::max(1, std::min(workers, replicas));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return outcomes;
}

std::string format_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

}  // namespace

void ExperimentSpec::validate() const
{
    if (schemes.empty()) throw IndexError("ExperimentSpec: no schemes given");
    if (step_exponents.empty()) throw IndexError("ExperimentSpec: no step exponents given");
    for (std::size_t i = 1; i < step_exponents.size(); ++i) {
        if (step_exponents[i] <= step_exponents[i - 1]) {
            throw IndexError("ExperimentSpec: step exponents must be strictly increasing");
        }
    }
    if (step_exponents.front() < 0 || step_exponents.back() > 30) {
        throw IndexError("ExperimentSpec: step exponents must lie in [0, 30]");
    }
    if (mc_replicas < 1) throw IndexError("ExperimentSpec: mc_replicas must be >= 1");
    if (workers < 1) throw IndexError("ExperimentSpec: workers must be >= 1");
    newton.validate();
    if (auto const* pde = std::get_if<PdeBenchmark>(&benchmark)) {
        if (!pde->problem.exact) throw IndexError("ExperimentSpec: PDE benchmark needs an exact solution");
        if (pde->mesh_dof < 1) throw IndexError("ExperimentSpec: mesh_dof must be >= 1");
        for (StepScheme s : schemes) {
            if (!is_implicit(s)) {
                throw IndexError("ExperimentSpec: scheme " + std::string(scheme_id(s)) +
                                 " is not available for PDE benchmarks");
            }
        }
    } else {
        auto const& ode = std::get<OdeBenchmark>(benchmark);
        if (!ode.exact) throw IndexError("ExperimentSpec: ODE benchmark needs an exact solution");
    }
}

int ErrorRow::exponent() const
{
    return static_cast<int>(std::lround(-std::log2(step_size)));
}

std::vector<ErrorRow> ErrorTable::rows_for(StepScheme scheme) const
{
    std::vector<ErrorRow> out;
    for (auto const& r : rows) {
        if (r.scheme == scheme) out.push_back(r);
    }
    return out;
}

ErrorTable run_mc(ExperimentSpec const& spec)
{
    spec.validate();
    double const T = std::visit([](auto const& b) { return b.problem.final_time; }, spec.benchmark);

    std::optional<FemSystem> sys;
    if (auto const* pde = std::get_if<PdeBenchmark>(&spec.benchmark)) {
        sys.emplace(fem::Mesh{pde->mesh_dof});
    }

    ErrorTable table;
    for (StepScheme scheme : spec.schemes) {
        for (int n : spec.step_exponents) {
            double const steps_real = std::ldexp(T, n);
            if (steps_real != std::floor(steps_real) || steps_real < 1) {
                throw IndexError("run_mc: T * 2^n must be a positive integer");
            }
            TimeGrid const grid(T, static_cast<int>(steps_real));
            int const runs = is_randomized(scheme) ? spec.mc_replicas : 1;

            auto task = [&](int r) {
                SeedSpec const seed{spec.master_seed, static_cast<std::uint64_t>(r)};
                if (auto const* ode = std::get_if<OdeBenchmark>(&spec.benchmark)) {
                    return run_replica(*ode, grid, scheme, seed, spec.newton);
                }
                return run_replica(std::get<PdeBenchmark>(spec.benchmark), *sys, grid, scheme,
                                   seed, spec.newton);
            };
            std::vector<ReplicaOutcome> const outcomes = run_parallel(runs, spec.workers, task);

            // Ordered reduction.
            double sum_sq_final = 0.0;
            double sum_sq_max = 0.0;
            double sum_iter = 0.0;
            for (int r = 0; r < runs; ++r) {
                auto const& o = outcomes[r];
                if (o.failure) {
                    rethrow_with_context(o.failure, "scheme " + std::string(scheme_id(scheme)) +
                                                        ", k = 2^-" + std::to_string(n) +
                                                        ", replica " + std::to_string(r));
                }
                sum_sq_final += o.error_final * o.error_final;
                sum_sq_max += o.error_max * o.error_max;
                sum_iter += o.mean_iterations;
            }
            double const mean_sq = sum_sq_final / runs;

            ErrorRow row;
            row.scheme = scheme;
            row.steps = grid.steps();
            row.step_size = grid.step_size();
            row.replicas = spec.mc_replicas;
            row.rms_error_final = std::sqrt(mean_sq);
            row.rms_error_max = std::sqrt(sum_sq_max / runs);
            row.mean_newton_iters = sum_iter / runs;

            if (!is_randomized(scheme)) {
                row.mc_stderr_final = 0.0;
            } else if (runs < 2) {
                row.mc_stderr_final = std::numeric_limits<double>::quiet_NaN();
            } else {
                // Delta method: se(sqrt(m)) = se(m) / (2 sqrt(m)).
                double var = 0.0;
                for (int r = 0; r < runs; ++r) {
                    double const d = outcomes[r].error_final * outcomes[r].error_final - mean_sq;
                    var += d * d;
                }
                var /= (runs - 1);
                double const se_mean_sq = std::sqrt(var / runs);
                row.mc_stderr_final = row.rms_error_final > 0
                                          ? se_mean_sq / (2.0 * row.rms_error_final)
                                          : 0.0;
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

RateFit fit_loglog(std::vector<double> const& step_sizes, std::vector<double> const& values)
{
    if (step_sizes.size() != values.size() || step_sizes.size() < 2) {
        throw FitError("fit: need at least two (k, value) pairs");
    }
    std::size_t const n = values.size();
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(values[i] > 0) || !(step_sizes[i] > 0) || !std::isfinite(values[i])) {
            throw FitError("fit: non-positive or non-finite value in window");
        }
        x[i] = std::log2(step_sizes[i]);
        y[i] = std::log2(values[i]);
    }
    double xm = 0.0;
    double ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (sxx == 0.0) throw FitError("fit: all step sizes coincide");
    RateFit fit{StepScheme::RandomizedBackwardEuler, {}, 0.0, 0.0, 0.0};
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double const e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

RateFit fit_rate(ErrorTable const& table, StepScheme scheme, RateWindow window,
                 ErrorMode mode, bool clamp_nonpositive)
{
    std::vector<double> ks;
    std::vector<double> es;
    for (auto const& row : table.rows) {
        if (row.scheme != scheme) continue;
        int const n = row.exponent();
        if (n < window.lo || n > window.hi) continue;
        double e = mode == ErrorMode::FinalTime ? row.rms_error_final : row.rms_error_max;
        if (!(e > 0)) {
            if (!clamp_nonpositive) {
                throw FitError("fit_rate: non-positive error for " + std::string(scheme_id(scheme)) +
                               " at k = 2^-" + std::to_string(n));
            }
            e = 1e-30;
        }
        ks.push_back(row.step_size);
        es.push_back(e);
    }
    if (ks.size() < 2) {
        throw FitError("fit_rate: window [" + std::to_string(window.lo) + ", " +
                       std::to_string(window.hi) + "] holds fewer than two rows for " +
                       std::string(scheme_id(scheme)));
    }
    RateFit fit = fit_loglog(ks, es);
    fit.scheme = scheme;
    fit.window = window;
    return fit;
}

void write_error_table(std::ostream& out, ErrorTable const& table)
{
    out << "scheme,N,k,replicas,rms_error_final,rms_error_max,mc_stderr_final,mean_newton_iters\n";
    for (auto const& r : table.rows) {
        out << scheme_id(r.scheme) << ',' << r.steps << ',' << format_real(r.step_size) << ','
            << r.replicas << ',' << format_real(r.rms_error_final) << ','
            << format_real(r.rms_error_max) << ',' << format_real(r.mc_stderr_final) << ','
            << format_real(r.mean_newton_iters) << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(std::string const& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_real(std::string const& s)
{
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (std::exception const&) {
        throw IndexError("error table: malformed number '" + s + "'");
    }
    if (pos != s.size()) throw IndexError("error table: malformed number '" + s + "'");
    return v;
}

int parse_int(std::string const& s)
{
    int v = 0;
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw IndexError("error table: malformed integer '" + s + "'");
    }
    return v;
}

}  // namespace

ErrorTable read_error_table(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw IndexError("error table: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "scheme,N,k,replicas,rms_error_final,rms_error_max,mc_stderr_final,mean_newton_iters") {
        throw IndexError("error table: unexpected header '" + line + "'");
    }
    ErrorTable table;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto const cells = split_csv_line(line);
        if (cells.size() != 8) {
            throw IndexError("error table: line " + std::to_string(lineno) + " has " +
                             std::to_string(cells.size()) + " fields, expected 8");
        }
        ErrorRow r;
        r.scheme = parse_scheme(cells[0]);
        r.steps = parse_int(cells[1]);
        r.step_size = parse_real(cells[2]);
        r.replicas = parse_int(cells[3]);
        r.rms_error_final = parse_real(cells[4]);
        r.rms_error_max = parse_real(cells[5]);
        r.mc_stderr_final = parse_real(cells[6]);
        r.mean_newton_iters = parse_real(cells[7]);
        table.rows.push_back(r);
    }
    return table;
}

void write_rate_fits(std::ostream& out, std::vector<RateFit> const& fits)
{
    out << "scheme,window_lo,window_hi,slope,intercept,residual\n";
    for (auto const& f : fits) {
        out << scheme_id(f.scheme) << ',' << f.window.lo << ',' << f.window.hi << ','
            << format_real(f.slope) << ',' << format_real(f.intercept) << ','
            << format_real(f.residual) << '\n';
    }
}

namespace {

std::vector<int> exponent_range(int lo, int hi)
{
    std::vector<int> v;
    for (int n = lo; n <= hi; ++n) v.push_back(n);
    return v;
}

OdeBenchmark prothero_robinson_benchmark(double lambda, int K)
{
    ProtheroRobinsonSpec const pr{lambda, SawtoothSpec{K, SawtoothAmplitude::Ode}};
    OdeBenchmark b;
    b.problem = make_prothero_robinson(pr);
    b.exact = [s = pr.sawtooth](double t) { return Vector::Constant(1, sawtooth_g(s, t)); };
    return b;
}

// Pre-resolution exponents n <= K - 2, resolved exponents n >= K.
void fit_windows(FigureResult& fig, std::vector<StepScheme> const& fitted)
{
    int const K = fig.sawtooth_exponent;
    fig.pre_window = {fig.spec.step_exponents.front(), K - 2};
    fig.post_window = {K, fig.spec.step_exponents.back()};
    for (StepScheme s : fitted) {
        fig.fits.push_back(fit_rate(fig.table, s, fig.pre_window));
        fig.fits.push_back(fit_rate(fig.table, s, fig.post_window));
    }
}

}  // namespace

FigureResult reproduce_fig1_left(FigureOptions const& options)
{
    bool const desk = options.scale == Scale::Desk;
    FigureResult fig;
    fig.sawtooth_exponent = desk ? 10 : 12;
    fig.spec.benchmark = prothero_robinson_benchmark(2.0, fig.sawtooth_exponent);
    fig.spec.schemes = {StepScheme::RandomizedBackwardEuler, StepScheme::ClassicalBackwardEuler};
    fig.spec.step_exponents = desk ? exponent_range(4, 12) : exponent_range(5, 14);
    fig.spec.mc_replicas = desk ? 200 : 1000;
    fig.spec.master_seed = options.master_seed;
    fig.spec.workers = options.workers;
    fig.table = run_mc(fig.spec);
    fit_windows(fig, fig.spec.schemes);
    return fig;
}

FigureResult reproduce_fig1_right(FigureOptions const& options)
{
    bool const desk = options.scale == Scale::Desk;
    FigureResult fig;
    fig.sawtooth_exponent = desk ? 10 : 12;
    fig.spec.benchmark = prothero_robinson_benchmark(-1000.0, fig.sawtooth_exponent);
    fig.spec.schemes = {StepScheme::RandomizedBackwardEuler, StepScheme::RandomizedForwardEuler};
    fig.spec.step_exponents = desk ? exponent_range(5, 12) : exponent_range(5, 14);
    fig.spec.mc_replicas = desk ? 200 : 1000;
    fig.spec.master_seed = options.master_seed;
    fig.spec.workers = options.workers;
    fig.table = run_mc(fig.spec);
    int const K = fig.sawtooth_exponent;
    fig.pre_window = {fig.spec.step_exponents.front(), K - 2};
    fig.post_window = {K, fig.spec.step_exponents.back()};
    // The forward scheme blows up on coarse grids; only the implicit one is fitted.
    fig.fits.push_back(fit_rate(fig.table, StepScheme::RandomizedBackwardEuler, fig.post_window));
    return fig;
}

FigureResult reproduce_fig2(FigureOptions const& options)
{
    bool const desk = options.scale == Scale::Desk;
    FigureResult fig;
    fig.sawtooth_exponent = desk ? 7 : 9;
    PdeBenchmark bench;
    bench.problem = make_semilinear_heat(SawtoothSpec{fig.sawtooth_exponent, SawtoothAmplitude::Pde},
                                         TruncatedPowerSpec{10.0, 4.0});
    bench.mesh_dof = desk ? 127 : 500;
    fig.spec.benchmark = std::move(bench);
    fig.spec.schemes = {StepScheme::RandomizedBackwardEuler, StepScheme::ClassicalBackwardEuler};
    fig.spec.step_exponents = desk ? exponent_range(3, 9) : exponent_range(4, 11);
    fig.spec.mc_replicas = desk ? 50 : 200;
    fig.spec.master_seed = options.master_seed;
    fig.spec.workers = options.workers;
    fig.table = run_mc(fig.spec);
    fit_windows(fig, fig.spec.schemes);
    return fig;
}

std::vector<ResidualRow> residual_study(OdeBenchmark const& bench, RateWindow exponents,
                                        int replicas, std::uint64_t master_seed,
                                        int panels_per_unit)
{
    if (replicas < 1) throw IndexError("residual_study: replicas must be >= 1");
    if (exponents.hi < exponents.lo) throw IndexError("residual_study: empty exponent range");
    double const T = bench.problem.final_time;
    std::vector<ResidualRow> rows;
    for (int n = exponents.lo; n <= exponents.hi; ++n) {
        TimeGrid const grid(T, static_cast<int>(std::ldexp(T, n)));
        double const k = grid.step_size();
        std::vector<Vector> exact_grid;
        exact_grid.reserve(grid.steps() + 1);
        for (int j = 0; j <= grid.steps(); ++j) exact_grid.push_back(bench.exact(grid.node(j)));

        std::vector<double> sum_sq(grid.steps() + 1, 0.0);
        for (int r = 0; r < replicas; ++r) {
            NodeStream stream = make_stream({master_seed, static_cast<std::uint64_t>(r)});
            for (int j = 1; j <= grid.steps(); ++j) {
                double const xi = node(grid, j, stream.next_tau());
                sum_sq[j] += local_residual(bench.problem, exact_grid, j, xi, k).squaredNorm();
            }
        }
        double total = 0.0;
        for (int j = 1; j <= grid.steps(); ++j) total += sum_sq[j] / replicas;

        int const panels = std::max(1, static_cast<int>(std::lround(k * panels_per_unit)));
        double mean_max = 0.0;
        for (int j = 1; j <= grid.steps(); ++j) {
            mean_max = std::max(mean_max, conditional_mean_residual(bench.problem, bench.exact, j,
                                                                    grid, 2, panels)
                                              .norm());
        }
        rows.push_back({n, k, std::sqrt(total), mean_max});
    }
    return rows;
}

}  // namespace randstep
