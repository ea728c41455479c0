#pragma once

// Table harness: runs grids of configurations on a worker pool and serializes
// the results as long-format CSV or JSON.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fracbc/evolve.hpp"
#include "fracbc/krylov.hpp"
#include "fracbc/precond.hpp"
#include "fracbc/problem.hpp"
#include "fracbc/spectra.hpp"
#include "fracbc/structure.hpp"

namespace fracbc {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rounds to 9 significant digits, the precision used on output.
inline double round9(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

inline std::string format9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline double parse_number(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

/// One cell. `t` is NaN for tables without a time axis; `column` names the
/// quantity (lambda_min, iters:strang, max_error, ...).
struct BenchRow {
    double alpha = 0.0;
    std::string scheme;
    bool truncated = false;
    double theta = 0.0;
    double k = 0.0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    double t = std::numeric_limits<double>::quiet_NaN();
    std::string column;
    double value = 0.0;

    auto key() const {
        // NaN times sort first and compare equal among themselves
        const double tk = std::isnan(t) ? -std::numeric_limits<double>::infinity() : t;
        return std::make_tuple(alpha, scheme, truncated, theta, k, m, seed, tk, column);
    }
    bool operator==(const BenchRow& o) const {
        return key() == o.key() && (value == o.value || (std::isnan(value) && std::isnan(o.value)));
    }
};

struct BenchTable {
    std::string id;
    std::string provenance;
    std::vector<BenchRow> rows;

    void add(BenchRow r) {
        r.alpha = round9(r.alpha);
        r.theta = round9(r.theta);
        r.k = round9(r.k);
        r.t = round9(r.t);
        r.value = round9(r.value);
        rows.push_back(std::move(r));
    }

    void sort() {
        std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) { return a.key() < b.key(); });
    }

    /// First row matching the predicate, or nullptr.
    const BenchRow* find(const std::function<bool(const BenchRow&)>& pred) const {
        for (const auto& r : rows)
            if (pred(r)) return &r;
        return nullptr;
    }

    bool operator==(const BenchTable& o) const { return id == o.id && provenance == o.provenance && rows == o.rows; }
};

// ---------------------------------------------------------------- serialization

inline constexpr const char* csv_header = "alpha,scheme,truncated,theta,k,m,seed,t,column,value";

inline std::string to_csv(BenchTable table) {
    table.sort();
    std::ostringstream os;
    os << csv_header << '\n';
    for (const auto& r : table.rows) {
        os << format9(r.alpha) << ',' << r.scheme << ',' << (r.truncated ? 1 : 0) << ',' << format9(r.theta) << ','
           << format9(r.k) << ',' << r.m << ',' << r.seed << ',' << (std::isnan(r.t) ? std::string{} : format9(r.t))
           << ',' << r.column << ',' << format9(r.value) << '\n';
    }
    return os.str();
}

inline BenchTable from_csv(const std::string& text, std::string id = {}, std::string provenance = {}) {
    BenchTable t{std::move(id), std::move(provenance), {}};
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != csv_header) throw ConfigError("csv: missing or unexpected header");
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 10) throw ConfigError("csv line " + std::to_string(lineno) + ": expected 10 fields");
        BenchRow r;
        r.alpha = parse_number(f[0]);
        r.scheme = f[1];
        r.truncated = f[2] == "1";
        r.theta = parse_number(f[3]);
        r.k = parse_number(f[4]);
        r.m = static_cast<std::size_t>(std::stoull(f[5]));
        r.seed = std::stoull(f[6]);
        r.t = f[7].empty() ? std::numeric_limits<double>::quiet_NaN() : parse_number(f[7]);
        r.column = f[8];
        r.value = parse_number(f[9]);
        t.rows.push_back(std::move(r));
    }
    return t;
}

namespace detail {

inline nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format9(v);
}

inline double json_to_number(const nlohmann::ordered_json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) return parse_number(j.get<std::string>());
    return j.get<double>();
}

} // namespace detail

inline std::string to_json(BenchTable table) {
    table.sort();
    nlohmann::ordered_json j;
    j["meta"] = {{"table", table.id}, {"provenance", table.provenance}, {"rows", table.rows.size()}};
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        nlohmann::ordered_json o;
        o["alpha"] = r.alpha;
        o["scheme"] = r.scheme;
        o["truncated"] = r.truncated;
        o["theta"] = r.theta;
        o["k"] = r.k;
        o["m"] = r.m;
        o["seed"] = r.seed;
        o["t"] = std::isnan(r.t) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.t);
        o["column"] = r.column;
        o["value"] = detail::json_number(r.value);
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

inline BenchTable from_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("json: ") + e.what());
    }
    BenchTable t;
    t.id = j.at("meta").at("table").get<std::string>();
    t.provenance = j.at("meta").at("provenance").get<std::string>();
    for (const auto& o : j.at("rows")) {
        BenchRow r;
        r.alpha = o.at("alpha").get<double>();
        r.scheme = o.at("scheme").get<std::string>();
        r.truncated = o.at("truncated").get<bool>();
        r.theta = o.at("theta").get<double>();
        r.k = o.at("k").get<double>();
        r.m = o.at("m").get<std::size_t>();
        r.seed = o.at("seed").get<std::uint64_t>();
        r.t = detail::json_to_number(o.at("t"));
        r.column = o.at("column").get<std::string>();
        r.value = detail::json_to_number(o.at("value"));
        t.rows.push_back(std::move(r));
    }
    return t;
}

enum class TableFormat { Csv, Json };

inline TableFormat parse_format(const std::string& s) {
    if (s == "csv") return TableFormat::Csv;
    if (s == "json") return TableFormat::Json;
    throw ConfigError("unknown format '" + s + "' (csv|json)");
}

inline std::string render(const BenchTable& t, TableFormat f) { return f == TableFormat::Csv ? to_csv(t) : to_json(t); }

/// Writes the table; an empty path means stdout.
inline void emit(const BenchTable& t, TableFormat f, const std::string& path) {
    const std::string text = render(t, f);
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------- worker pool

/// Runs jobs on up to `threads` workers (0 = hardware concurrency). The first
/// exception is rethrown after all workers have stopped.
inline void run_pool(const std::vector<std::function<void()>>& jobs, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            {
                std::lock_guard lk(mu);
                if (err) return;
            }
            try {
                jobs[i]();
            } catch (...) {
                std::lock_guard lk(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);
}

namespace detail {

/// Collects rows from concurrent jobs, then moves them into the table sorted.
struct RowSink {
    std::mutex mu;
    std::vector<BenchRow> rows;
    void push(std::vector<BenchRow> rs) {
        std::lock_guard lk(mu);
        for (auto& r : rs) rows.push_back(std::move(r));
    }
    void drain(BenchTable& t) {
        for (auto& r : rows) t.add(std::move(r));
        rows.clear();
        t.sort();
    }
};

} // namespace detail

// ---------------------------------------------------------------- drivers

struct EigminConfig {
    std::vector<double> alphas{1.2, 1.5, 1.8};
    std::vector<EigFamily> families{EigFamily::T0, EigFamily::Anti, EigFamily::AntiR};
    std::vector<std::size_t> sizes{1000, 2000};
    std::optional<EigMode> mode;
    unsigned threads = 0;
};

inline std::string family_name(EigFamily f) {
    switch (f) {
    case EigFamily::T0: return "T0";
    case EigFamily::Anti: return "anti";
    case EigFamily::AntiR: return "antiR";
    }
    return "?";
}

inline EigFamily parse_family(const std::string& s) {
    if (s == "T0" || s == "open") return EigFamily::T0;
    if (s == "anti") return EigFamily::Anti;
    if (s == "antiR") return EigFamily::AntiR;
    throw ConfigError("unknown matrix family '" + s + "' (T0|anti|antiR)");
}

/// lambda_min, lambda_max and gamma of the positive-oriented matrices.
inline BenchTable run_eigmin_table(const EigminConfig& cfg) {
    BenchTable t{"eigmin", "lambda_min scaling of T0, A^anti, A^antiR", {}};
    detail::RowSink sink;
    std::vector<std::function<void()>> jobs;
    for (double a : cfg.alphas)
        for (auto f : cfg.families)
            jobs.emplace_back([&, a, f] {
                const auto reps = eigmin_table(f, FractionalOrder(a), cfg.sizes, cfg.mode);
                std::vector<BenchRow> out;
                for (const auto& r : reps) {
                    BenchRow b;
                    b.alpha = a;
                    b.scheme = family_name(f);
                    b.m = r.m;
                    b.column = "lambda_min";
                    b.value = r.lambda_min;
                    out.push_back(b);
                    b.column = "lambda_max";
                    b.value = r.lambda_max;
                    out.push_back(b);
                    if (!std::isnan(r.gamma)) {
                        b.column = "gamma";
                        b.value = r.gamma;
                        out.push_back(b);
                    }
                }
                sink.push(std::move(out));
            });
    run_pool(jobs, cfg.threads);
    sink.drain(t);
    return t;
}

struct CondConfig {
    std::vector<double> alphas{1.2, 1.5, 1.8};
    std::vector<BoundaryScheme> schemes{BoundaryScheme::AntiSymmetric, BoundaryScheme::OpenToeplitz,
                                        BoundaryScheme::AntiReflective};
    std::vector<double> thetas{1.0, 0.5};
    double k = 1.0;
    std::vector<std::size_t> sizes{1000};
    EigMode mode = EigMode::Dense;
    unsigned threads = 0;
};

/// lambda_min, lambda_max and K_2 of I - mu*A.
inline BenchTable run_cond_table(const CondConfig& cfg) {
    BenchTable t{"cond", "extremal eigenvalues and spectral condition number of I - mu A", {}};
    detail::RowSink sink;
    std::vector<std::function<void()>> jobs;
    for (double a : cfg.alphas)
        for (auto s : cfg.schemes)
            for (double th : cfg.thetas)
                for (std::size_t m : cfg.sizes)
                    jobs.emplace_back([&, a, s, th, m] {
                        const std::size_t sz[] = {m};
                        const auto reps = condition_table(s, FractionalOrder(a), th, cfg.k, sz, cfg.mode);
                        std::vector<BenchRow> out;
                        for (const auto& r : reps) {
                            BenchRow b;
                            b.alpha = a;
                            b.scheme = std::string(to_string(s));
                            b.theta = th;
                            b.k = cfg.k;
                            b.m = r.m;
                            for (auto [name, v] : {std::pair{"lambda_min", r.lambda_min},
                                                   std::pair{"lambda_max", r.lambda_max}, std::pair{"cond2", r.cond2}}) {
                                b.column = name;
                                b.value = v;
                                out.push_back(b);
                            }
                        }
                        sink.push(std::move(out));
                    });
    run_pool(jobs, cfg.threads);
    sink.drain(t);
    return t;
}

/// Right-hand side b = (I - mu A) x* with x* all ones (seed 0) or uniform on
/// [0,1) from mt19937_64(seed).
struct RhsSpec {
    bool random = false;
    std::uint64_t seed = 0;
};

inline RhsSpec parse_rhs(const std::string& s) {
    if (s == "ones") return {};
    if (s.rfind("random", 0) == 0) {
        RhsSpec r{true, 1};
        if (s.size() > 6) {
            if (s[6] != ':') throw ConfigError("rhs: expected random:SEED");
            r.seed = std::stoull(s.substr(7));
        }
        return r;
    }
    throw ConfigError("unknown rhs '" + s + "' (ones|random[:SEED])");
}

inline std::vector<double> exact_vector(std::size_t m, const RhsSpec& rhs) {
    std::vector<double> x(m, 1.0);
    if (rhs.random) {
        std::mt19937_64 g(rhs.seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& v : x) v = u(g);
    }
    return x;
}

struct GmresTableConfig {
    std::vector<double> alphas{1.2, 1.5, 1.8};
    std::vector<BoundaryScheme> schemes{BoundaryScheme::AntiSymmetric};
    std::vector<double> thetas{1.0, 0.5};
    std::vector<double> ks{1.0};
    std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
    std::vector<PrecondKind> preconds{std::begin(all_preconditioners), std::end(all_preconditioners)};
    RhsSpec rhs{};
    GmresConfig gmres{};
    unsigned threads = 0;
};

/// Iterations of one GMRES solve of (I - mu A) x = b preconditioned by the
/// lifted algebra approximation of T_0.
struct GmresCell {
    std::size_t iterations = 0;
    bool converged = false;
    double true_residual = 0.0;
};

inline GmresCell gmres_cell(BoundaryScheme s, FractionalOrder a, double theta, double k, std::size_t m, PrecondKind pk,
                            const RhsSpec& rhs, GmresConfig cfg) {
    const double mu = table_mu(a, m, theta, k);
    const auto A = assemble(s, a, 0.0, m).lifted(1.0, mu);
    const auto b = A.apply(exact_vector(m, rhs));
    const auto P = make_preconditioner(pk, t0_coefficients(a, m), m).lifted(1.0, mu);
    cfg.record_history = false;
    const auto r = gmres(A, b, &P, cfg);
    return {r.iterations, r.converged, r.true_residual};
}

inline BenchTable run_gmres_table(const GmresTableConfig& cfg) {
    BenchTable t{cfg.rhs.random ? "gmres-random" : "gmres", "GMRES iteration counts to the residual tolerance", {}};
    detail::RowSink sink;
    std::vector<std::function<void()>> jobs;
    // largest sizes first so the pool tail is short
    auto sizes = cfg.sizes;
    std::sort(sizes.rbegin(), sizes.rend());
    for (std::size_t m : sizes)
        for (double a : cfg.alphas)
            for (auto s : cfg.schemes)
                for (double th : cfg.thetas)
                    for (double k : cfg.ks)
                        for (auto pk : cfg.preconds)
                            jobs.emplace_back([&, a, s, th, k, m, pk] {
                                const auto c = gmres_cell(s, FractionalOrder(a), th, k, m, pk, cfg.rhs, cfg.gmres);
                                BenchRow b;
                                b.alpha = a;
                                b.scheme = std::string(to_string(s));
                                b.theta = th;
                                b.k = k;
                                b.m = m;
                                b.seed = cfg.rhs.random ? cfg.rhs.seed : 0;
                                b.column = "iters:" + std::string(to_string(pk));
                                b.value = c.converged ? static_cast<double>(c.iterations)
                                                      : std::numeric_limits<double>::quiet_NaN();
                                sink.push({b});
                            });
    run_pool(jobs, cfg.threads);
    sink.drain(t);
    return t;
}

struct ErrorTableConfig {
    std::vector<double> alphas{1.2, 1.4, 1.6, 1.8};
    std::vector<BoundaryScheme> schemes{BoundaryScheme::Dirichlet, BoundaryScheme::Reflective,
                                        BoundaryScheme::AntiReflective, BoundaryScheme::AntiSymmetric};
    std::vector<double> thetas{1.0, 0.5};
    std::vector<bool> truncated{false, true};
    std::vector<double> times{2e-3, 1.0, 2.0};
    GridSpec grid{};
    double k = 0.5;
    StepOptions step{};
    unsigned threads = 0;
};

/// max_j |U_j - u(x_j,t)| on the test problem; one evolution per
/// (alpha, scheme, theta, truncated).
inline std::vector<std::pair<double, double>> error_cell(BoundaryScheme s, FractionalOrder a, double theta, bool truncated,
                                      const ErrorTableConfig& cfg) {
    StepOptions so = cfg.step;
    so.k_coef = cfg.k;
    so.truncated = truncated;
    GridSpec g = cfg.grid;
    const double t_end = *std::max_element(cfg.times.begin(), cfg.times.end());
    g.t_end = t_end;
    const SourceTerm src(a);
    const auto sys = build_step_system(s, ThetaScheme{theta}, g, a, so, src);
    std::vector<double> U0(g.nodes());
    for (std::size_t j = 0; j < U0.size(); ++j) U0[j] = TestProblem::initial(g.x(j));
    const auto hist = evolve(sys, U0, t_end, cfg.times, [](double x, double t) { return TestProblem::exact(x, t); });
    std::vector<std::pair<double, double>> errs;
    for (const auto& snap : hist.snapshots) errs.emplace_back(snap.t, snap.max_error);
    return errs;
}

inline BenchTable run_error_table(const ErrorTableConfig& cfg) {
    BenchTable t{"error", "maximal absolute error on the test problem", {}};
    detail::RowSink sink;
    std::vector<std::function<void()>> jobs;
    for (double a : cfg.alphas)
        for (auto s : cfg.schemes)
            for (double th : cfg.thetas)
                for (bool tr : cfg.truncated)
                    jobs.emplace_back([&, a, s, th, tr] {
                        const auto errs = error_cell(s, FractionalOrder(a), th, tr, cfg);
                        std::vector<BenchRow> out;
                        for (const auto& [tt, err] : errs) {
                            BenchRow b;
                            b.alpha = a;
                            b.scheme = std::string(to_string(s));
                            b.truncated = tr;
                            b.theta = th;
                            b.k = cfg.k;
                            b.m = cfg.grid.N;
                            b.t = tt;
                            b.column = "max_error";
                            b.value = err;
                            out.push_back(b);
                        }
                        sink.push(std::move(out));
                    });
    run_pool(jobs, cfg.threads);
    sink.drain(t);
    return t;
}

} // namespace fracbc
