// Command-line front end: table reproduction, spectra, time evolution and
// single linear solves.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracbc/bench.hpp"

using namespace fracbc;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

struct Options {
    std::string kind;
    std::vector<double> alpha;
    std::vector<std::string> scheme;
    std::vector<double> theta;
    std::vector<double> k;
    std::vector<std::size_t> sizes;
    std::vector<std::string> precond;
    std::vector<double> times;
    std::string truncated = "both";
    std::string rhs = "ones";
    std::uint64_t seed = 1;
    double tol = 1e-6;
    std::size_t maxit = 0;
    std::string side = "left";
    std::string residual = "preconditioned";
    std::string mode = "auto";
    std::string format = "csv";
    std::string out;
    std::size_t N = 1000;
    double dt = 0.0;
    double t_end = 2.0;
    unsigned threads = 0;
    bool trunc_flag = false;
};

template <class T>
T first_or(const std::vector<T>& v, T fallback) {
    return v.empty() ? fallback : v.front();
}

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> fallback) {
    return v.empty() ? fallback : v;
}

std::vector<BoundaryScheme> schemes_of(const std::vector<std::string>& names, std::vector<BoundaryScheme> fallback) {
    if (names.empty()) return fallback;
    std::vector<BoundaryScheme> out;
    for (const auto& n : names) out.push_back(parse_scheme(n));
    return out;
}

std::vector<PrecondKind> preconds_of(const std::vector<std::string>& names) {
    if (names.empty()) return {std::begin(all_preconditioners), std::end(all_preconditioners)};
    std::vector<PrecondKind> out;
    for (const auto& n : names) out.push_back(parse_precond(n));
    return out;
}

GmresConfig gmres_of(const Options& o) {
    GmresConfig c;
    c.tol = o.tol;
    c.maxit = o.maxit;
    if (o.side == "left") c.side = PrecondSide::Left;
    else if (o.side == "right") c.side = PrecondSide::Right;
    else throw ConfigError("unknown --side '" + o.side + "' (left|right)");
    if (o.residual == "preconditioned") c.residual = ResidualNorm::Preconditioned;
    else if (o.residual == "true") c.residual = ResidualNorm::True;
    else throw ConfigError("unknown --residual '" + o.residual + "' (preconditioned|true)");
    c.record_history = false;
    return c;
}

RhsSpec rhs_of(const Options& o, bool force_random) {
    RhsSpec r = parse_rhs(o.rhs);
    if (force_random && !r.random) r = {true, o.seed};
    if (r.random && o.rhs == "random") r.seed = o.seed;
    return r;
}

std::optional<EigMode> mode_of(const std::string& s) {
    if (s == "auto") return std::nullopt;
    if (s == "dense") return EigMode::Dense;
    if (s == "iterative") return EigMode::Iterative;
    throw ConfigError("unknown --mode '" + s + "' (auto|dense|iterative)");
}

std::vector<bool> truncation_of(const std::string& s) {
    if (s == "both") return {false, true};
    if (s == "no") return {false};
    if (s == "yes") return {true};
    throw ConfigError("unknown --truncated '" + s + "' (no|yes|both)");
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw IoError("write failed for '" + path + "'");
}

int run_table(const Options& o) {
    const auto fmt = parse_format(o.format);
    BenchTable t;
    if (o.kind == "eigmin") {
        EigminConfig c;
        c.alphas = or_default(o.alpha, c.alphas);
        c.sizes = or_default(o.sizes, c.sizes);
        if (!o.scheme.empty()) {
            c.families.clear();
            for (const auto& s : o.scheme) c.families.push_back(parse_family(s));
        }
        c.mode = mode_of(o.mode);
        c.threads = o.threads;
        t = run_eigmin_table(c);
    } else if (o.kind == "cond") {
        CondConfig c;
        c.alphas = or_default(o.alpha, c.alphas);
        c.schemes = schemes_of(o.scheme, c.schemes);
        c.thetas = or_default(o.theta, c.thetas);
        c.k = first_or(o.k, 1.0);
        c.sizes = or_default(o.sizes, c.sizes);
        const auto m = mode_of(o.mode);
        c.mode = m ? *m : EigMode::Dense;
        c.threads = o.threads;
        t = run_cond_table(c);
    } else if (o.kind == "gmres" || o.kind == "gmres-random") {
        GmresTableConfig c;
        c.alphas = or_default(o.alpha, c.alphas);
        c.schemes = schemes_of(o.scheme, c.schemes);
        c.thetas = or_default(o.theta, c.thetas);
        c.ks = or_default(o.k, c.ks);
        c.sizes = or_default(o.sizes, c.sizes);
        c.preconds = preconds_of(o.precond);
        c.rhs = rhs_of(o, o.kind == "gmres-random");
        c.gmres = gmres_of(o);
        c.threads = o.threads;
        t = run_gmres_table(c);
    } else if (o.kind == "error") {
        ErrorTableConfig c;
        c.alphas = or_default(o.alpha, c.alphas);
        c.schemes = schemes_of(o.scheme, c.schemes);
        c.thetas = or_default(o.theta, c.thetas);
        c.truncated = truncation_of(o.truncated);
        c.times = or_default(o.times, c.times);
        c.grid.N = o.N;
        c.grid.dt = o.dt > 0.0 ? o.dt : (c.grid.b - c.grid.a) / static_cast<double>(o.N);
        c.k = first_or(o.k, 0.5);
        c.threads = o.threads;
        t = run_error_table(c);
    } else {
        throw ConfigError("unknown table '" + o.kind + "' (eigmin|cond|gmres|gmres-random|error)");
    }
    emit(t, fmt, o.out);
    return exit_ok;
}

int run_spectrum(const Options& o) {
    const FractionalOrder a(first_or(o.alpha, 1.5));
    const std::size_t m = first_or<std::size_t>(o.sizes, 256);
    const auto scheme = parse_scheme(first_or<std::string>(o.scheme, "anti"));
    DenseMatrix X = assemble(scheme, a, 0.0, m).materialize(dense_nonsymmetric_limit);
    X *= -1.0;
    double max_imag = 0.0;
    const auto ev = detail::dense_real_eigenvalues(X, &max_imag);
    std::vector<double> samples(m);
    for (std::size_t j = 1; j <= m; ++j)
        samples[j - 1] = symbol_T0(a, static_cast<double>(j) * std::numbers::pi / static_cast<double>(m + 1));
    std::sort(samples.begin(), samples.end());
    std::ostringstream os;
    os << "index,eigenvalue,symbol,abs_error\n";
    for (std::size_t j = 0; j < m; ++j)
        os << j << ',' << format9(ev[j]) << ',' << format9(samples[j]) << ',' << format9(std::abs(ev[j] - samples[j]))
           << '\n';
    write_text(os.str(), o.out);
    if (max_imag > 0.0) std::cerr << "max |imag| = " << max_imag << "\n";
    return exit_ok;
}

int run_evolve(const Options& o) {
    const FractionalOrder a(first_or(o.alpha, 1.5));
    const auto scheme = parse_scheme(first_or<std::string>(o.scheme, "antiR"));
    GridSpec g;
    g.N = o.N;
    g.dt = o.dt > 0.0 ? o.dt : (g.b - g.a) / static_cast<double>(o.N);
    g.t_end = o.t_end;
    StepOptions so;
    so.k_coef = first_or(o.k, 0.5);
    so.truncated = o.trunc_flag;
    so.gmres.tol = std::min(o.tol, 1e-10);
    const double theta = first_or(o.theta, 1.0);
    const SourceTerm src(a);
    const auto sys = build_step_system(scheme, ThetaScheme{theta}, g, a, so, src);
    std::vector<double> U0(g.nodes());
    for (std::size_t j = 0; j < U0.size(); ++j) U0[j] = TestProblem::initial(g.x(j));
    const auto times = or_default(o.times, {o.t_end});
    const auto hist = evolve(sys, U0, o.t_end, times, [](double x, double t) { return TestProblem::exact(x, t); });
    std::ostringstream os;
    os << "t,x,numeric,exact,abs_error\n";
    for (const auto& s : hist.snapshots)
        for (std::size_t j = 0; j < s.U.size(); ++j)
            os << format9(s.t) << ',' << format9(hist.x[j]) << ',' << format9(s.U[j]) << ',' << format9(s.exact[j])
               << ',' << format9(std::abs(s.U[j] - s.exact[j])) << '\n';
    write_text(os.str(), o.out);
    for (const auto& s : hist.snapshots) std::cerr << "t=" << format9(s.t) << " max_error=" << format9(s.max_error) << "\n";
    return exit_ok;
}

int run_solve(const Options& o) {
    const FractionalOrder a(first_or(o.alpha, 1.5));
    const auto scheme = parse_scheme(first_or<std::string>(o.scheme, "anti"));
    const std::size_t m = first_or<std::size_t>(o.sizes, 1000);
    const double theta = first_or(o.theta, 1.0);
    const double k = first_or(o.k, 1.0);
    const auto rhs = rhs_of(o, false);
    const auto cfg = gmres_of(o);
    std::ostringstream os;
    os << "precond,iterations,converged,true_residual,seconds\n";
    const bool direct = is_truncated(scheme) || o.trunc_flag;
    bool failed = false;
    if (direct) {
        const double mu = table_mu(a, m, theta, k);
        const auto A = assemble(scheme, a, 0.0, m, o.trunc_flag).lifted(1.0, mu);
        const auto xs = exact_vector(m, rhs);
        const auto b = A.apply(xs);
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> x;
        if (is_pure_tau(A)) x = tau_solve(pure_tau_spectrum(A), b);
        else if (is_bordered_tau(A)) x = solve_direct_bordered(A, b);
        else throw ConfigError("solve: no direct solver for this scheme");
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double res = detail::true_relative_residual(A, x, b);
        os << "direct,0,1," << format9(res) << ',' << format9(sec) << '\n';
    } else {
        for (auto pk : preconds_of(o.precond)) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto c = gmres_cell(scheme, a, theta, k, m, pk, rhs, cfg);
            const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            os << to_string(pk) << ',' << c.iterations << ',' << (c.converged ? 1 : 0) << ','
               << format9(c.true_residual) << ',' << format9(sec) << '\n';
            if (!c.converged) {
                std::cerr << "numerical failure: GMRES (" << to_string(pk) << ") did not reach the tolerance\n";
                failed = true;
            }
        }
    }
    write_text(os.str(), o.out);
    return failed ? exit_numeric : exit_ok;
}

/// Reads key=value lines ('#' comments) into "--key value" tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config file '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected key=value");
        auto key = line.substr(0, eq);
        auto val = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        val.erase(0, val.find_first_not_of(" \t"));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(n) + ": empty key");
        if (key == "truncate") {
            if (val == "true" || val == "1") out.push_back("--truncate");
            continue;
        }
        out.push_back("--" + key);
        out.push_back(val);
    }
    return out;
}

/// Appends config-file tokens for every key not given on the command line.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;
    auto canon = [](std::string f) {
        if (const auto eq = f.find('='); eq != std::string::npos) f.erase(eq);
        if (f == "--m") return std::string("--sizes");
        if (f == "--times") return std::string("--snapshots");
        return f;
    };
    std::set<std::string> given;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) given.insert(canon(a));
    const auto tokens = config_tokens(path);
    std::vector<std::string> extra;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const bool has_value = tokens[i] != "--truncate";
        if (!given.count(canon(tokens[i]))) {
            extra.push_back(tokens[i]);
            if (has_value) extra.push_back(tokens[i + 1]);
        }
        if (has_value) ++i;
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

void add_common(CLI::App* s, Options& o) {
    s->add_option("--alpha", o.alpha, "fractional order(s) in (1,2)")->delimiter(',');
    s->add_option("--scheme", o.scheme, "boundary scheme(s)")->delimiter(',');
    s->add_option("--theta", o.theta, "theta-method parameter(s)")->delimiter(',');
    s->add_option("--k", o.k, "diffusion coefficient(s)")->delimiter(',');
    s->add_option("--sizes,--m", o.sizes, "matrix size(s)")->delimiter(',');
    s->add_option("--precond", o.precond, "none|strang|circ-opt|tau|tau-opt")->delimiter(',');
    s->add_option("--tol", o.tol, "GMRES relative tolerance");
    s->add_option("--maxit", o.maxit, "GMRES iteration cap (0 = 5m)");
    s->add_option("--side", o.side, "left|right preconditioning");
    s->add_option("--residual", o.residual, "preconditioned|true stopping residual");
    s->add_option("--rhs", o.rhs, "ones|random[:SEED]");
    s->add_option("--seed", o.seed, "seed for random right-hand sides");
    s->add_option("--format", o.format, "csv|json");
    s->add_option("--out", o.out, "output path (default stdout)");
    s->add_option("--N", o.N, "grid intervals on (0,2)");
    s->add_option("--dt", o.dt, "time step (default dx)");
    s->add_option("--t-end", o.t_end, "final time");
    s->add_option("--snapshots,--times", o.times, "output times")->delimiter(',');
    s->add_option("--truncated", o.truncated, "error table: no|yes|both");
    s->add_flag("--truncate", o.trunc_flag, "use the truncated operator");
    s->add_option("--mode", o.mode, "eigen solver: auto|dense|iterative");
    s->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"fractional diffusion boundary-condition toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", "key=value file mirroring the flags");

    auto* table = app.add_subcommand("table", "reproduce a table: eigmin|cond|gmres|gmres-random|error");
    table->add_option("kind", o.kind, "table kind")->required();
    auto* spectrum = app.add_subcommand("spectrum", "sorted eigenvalues against symbol samples");
    auto* evolve_cmd = app.add_subcommand("evolve", "time evolution of the test problem");
    auto* solve = app.add_subcommand("solve", "single linear solve or preconditioner comparison");
    for (auto* s : {table, spectrum, evolve_cmd, solve}) add_common(s, o);

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_config;
    }

    try {
        if (table->parsed()) return run_table(o);
        if (spectrum->parsed()) return run_spectrum(o);
        if (evolve_cmd->parsed()) return run_evolve(o);
        if (solve->parsed()) return run_solve(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_config;
}
