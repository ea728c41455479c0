#pragma once

// Extremal eigenvalues, gamma ratios, condition numbers and the comparison of
// sorted eigenvalues with samples of the symbol.
//
// Orientation: the assembled matrices have a negative diagonal. Everything
// reported here for an unlifted matrix X refers to -X, so that T_0 comes out
// positive definite. Lifted matrices nu*I - mu*A are analyzed as they are.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fracbc/error.hpp"
#include "fracbc/glkernel.hpp"
#include "fracbc/krylov.hpp"
#include "fracbc/precond.hpp"
#include "fracbc/structure.hpp"

namespace fracbc {

enum class EigMode { Dense, Iterative };

inline constexpr std::size_t dense_nonsymmetric_limit = 2000;
inline constexpr std::size_t dense_symmetric_limit = 4096;

struct ExtremalEigs {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double max_imag = 0.0; // largest |Im| seen (dense nonsymmetric only)
    std::size_t iterations = 0;
};

struct SpectralReport {
    std::size_t m = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double cond2 = 0.0;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double max_imag = 0.0;
};

/// Options for the iterative path. The inner solver for inverse iteration is
/// GMRES preconditioned by `inner` (natural tau of the same orientation if null).
struct IterativeEigOptions {
    double tol = 1e-10;           // relative change of the Ritz value between restarts
    std::size_t krylov_dim = 40;  // Arnoldi steps per restart
    std::size_t max_outer = 500;  // restarts
    double inner_tol = 1e-10;     // true relative residual of the inner solves
    std::uint64_t seed = 12345;
    const Preconditioner* inner = nullptr;
};

namespace detail {

inline bool is_exactly_symmetric(const DenseMatrix& A) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = i + 1; j < A.cols(); ++j)
            if (A(i, j) != A(j, i)) return false;
    return true;
}

/// All eigenvalues of a dense matrix, real parts sorted ascending.
inline std::vector<double> dense_real_eigenvalues(const DenseMatrix& A, double* max_imag = nullptr) {
    const auto n = static_cast<std::size_t>(A.rows());
    std::vector<double> ev;
    double mi = 0.0;
    if (is_exactly_symmetric(A)) {
        if (n > dense_symmetric_limit) throw ConfigError("dense symmetric eigensolve above size limit");
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(A, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
        ev.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    } else {
        if (n > dense_nonsymmetric_limit) throw ConfigError("dense nonsymmetric eigensolve above size limit");
        Eigen::EigenSolver<DenseMatrix> es(A, false);
        if (es.info() != Eigen::Success) throw NumericalError("nonsymmetric eigensolver failed");
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            ev.push_back(es.eigenvalues()(i).real());
            mi = std::max(mi, std::abs(es.eigenvalues()(i).imag()));
        }
    }
    std::sort(ev.begin(), ev.end());
    if (max_imag) *max_imag = mi;
    return ev;
}

inline std::vector<double> random_unit(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    const double s = norm2(v);
    for (auto& x : v) x /= s;
    return v;
}

/// X v with an optional sign flip.
struct SignedMap {
    const StructuredOperator* op;
    double sign;
    std::size_t size() const { return op->size(); }
    std::vector<double> apply(std::span<const double> v) const {
        auto y = op->apply(v);
        if (sign != 1.0)
            for (auto& x : y) x *= sign;
        return y;
    }
};

/// Dominant eigenvalue of a linear map with real dominant spectrum by
/// explicitly restarted Arnoldi; restarts from the Ritz vector of the Ritz
/// value with largest real part. `its` counts applications of f.
template <class F>
double arnoldi_dominant(F&& f, std::size_t n, const IterativeEigOptions& opt, std::size_t& its) {
    const std::size_t k = std::max<std::size_t>(1, std::min(n, opt.krylov_dim));
    auto v = random_unit(n, opt.seed);
    double prev = std::numeric_limits<double>::quiet_NaN();
    its = 0;
    std::vector<std::vector<double>> V(k + 1);
    for (std::size_t restart = 0; restart < opt.max_outer; ++restart) {
        DenseMatrix H = DenseMatrix::Zero(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k));
        V[0] = v;
        std::size_t kk = k;
        bool breakdown = false, settled = false;
        for (std::size_t j = 0; j < k; ++j) {
            auto w = f(V[j]);
            ++its;
            const double w0 = norm2(w);
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t i = 0; i <= j; ++i) {
                    const double h = dot(w, V[i]);
                    H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += h;
                    axpy(-h, V[i], w);
                }
            const double nw = norm2(w);
            H(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(j)) = nw;
            if (nw <= 1e-14 * std::max(w0, 1e-300)) {
                kk = j + 1;
                breakdown = true;
                break;
            }
            for (auto& x : w) x /= nw;
            V[j + 1] = std::move(w);
            // stop inside the cycle once two consecutive Ritz values agree
            if (j + 1 >= 2 && j + 1 < k) {
                const auto J = static_cast<Eigen::Index>(j + 1);
                Eigen::EigenSolver<DenseMatrix> es(H.topLeftCorner(J, J), false);
                double th = -std::numeric_limits<double>::infinity();
                for (Eigen::Index i = 0; i < J; ++i) th = std::max(th, es.eigenvalues()(i).real());
                if (!std::isnan(prev) && std::abs(th - prev) <= opt.tol * std::abs(th)) {
                    if (settled) {
                        kk = j + 1;
                        break;
                    }
                    settled = true;
                } else {
                    settled = false;
                }
                prev = th;
            }
        }
        const auto K = static_cast<Eigen::Index>(kk);
        Eigen::EigenSolver<DenseMatrix> es(H.topLeftCorner(K, K), true);
        if (es.info() != Eigen::Success) throw NumericalError("Arnoldi: Hessenberg eigensolve failed");
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < K; ++i)
            if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
        const double theta = es.eigenvalues()(best).real();
        const Eigen::VectorXd y = es.eigenvectors().col(best).real();
        std::vector<double> x(n, 0.0);
        for (Eigen::Index j = 0; j < K; ++j) axpy(y(j), V[static_cast<std::size_t>(j)], x);
        const double nx = norm2(x);
        if (nx == 0.0) throw NumericalError("Arnoldi: zero Ritz vector");
        for (auto& e : x) e /= nx;
        if (breakdown || kk < k || (!std::isnan(prev) && std::abs(theta - prev) <= opt.tol * std::abs(theta)))
            return theta;
        prev = theta;
        v = std::move(x);
    }
    throw NumericalError("Arnoldi iteration did not converge");
}

} // namespace detail

/// Extremal eigenvalues of sign*X (sign = -1 gives the positive orientation).
inline ExtremalEigs extremal_eigs(const StructuredOperator& X, EigMode mode, double sign = -1.0,
                                  const IterativeEigOptions& opt = {}) {
    ExtremalEigs out;
    if (mode == EigMode::Dense) {
        const std::size_t lim =
            std::max(dense_symmetric_limit, dense_nonsymmetric_limit); // finer check inside
        DenseMatrix A = X.materialize(lim);
        if (sign != 1.0) A *= sign;
        const auto ev = detail::dense_real_eigenvalues(A, &out.max_imag);
        out.lambda_min = ev.front();
        out.lambda_max = ev.back();
        return out;
    }
    const detail::SignedMap map{&X, sign};
    std::size_t its = 0;
    out.lambda_max = detail::arnoldi_dominant([&](std::span<const double> v) { return map.apply(v); }, X.size(), opt, its);
    out.iterations = its;

    // Shift-free inverse: the dominant eigenvalue of X^{-1} is 1/lambda_min.
    GmresConfig cfg;
    cfg.tol = opt.inner_tol;
    cfg.record_history = false;
    cfg.side = PrecondSide::Right;
    cfg.residual = ResidualNorm::True;
    std::size_t its2 = 0;
    const double inv = detail::arnoldi_dominant(
        [&](std::span<const double> v) {
            auto rep = gmres(map, v, opt.inner, cfg);
            if (!rep.converged) throw NumericalError("inverse iteration: inner GMRES did not converge");
            return rep.solution;
        },
        X.size(), opt, its2);
    out.iterations += its2;
    out.lambda_min = 1.0 / inv;
    return out;
}

/// Natural tau preconditioner of -T_0 (or of nu*I - mu*T_0), matching the
/// orientation used by extremal_eigs.
inline Preconditioner inner_tau_preconditioner(FractionalOrder alpha, std::size_t m, double nu = 0.0, double mu = 1.0) {
    return natural_tau(t0_coefficients(alpha, m), m).lifted(nu, mu);
}

inline double gamma_ratio(const SpectralReport& a, const SpectralReport& b) {
    if (b.m != 2 * a.m) throw ConfigError("gamma_ratio: sizes must differ by a factor of 2");
    if (!(a.lambda_min > 0.0 && b.lambda_min > 0.0)) throw NumericalError("gamma_ratio: nonpositive lambda_min");
    return std::log2(a.lambda_min / b.lambda_min);
}

/// Spectral condition number sigma_max / sigma_min (dense SVD).
inline double cond2_dense(const StructuredOperator& A) {
    const DenseMatrix M = A.materialize(dense_symmetric_limit);
    Eigen::BDCSVD<DenseMatrix> svd(M);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) == 0.0) throw NumericalError("cond2: singular matrix");
    return s(0) / s(s.size() - 1);
}

/// sigma_max^2 from A^T A, sigma_min^2 from (A^T A)^{-1} with two GMRES solves
/// per application.
inline double cond2_iterative(const StructuredOperator& A, const Preconditioner* inner, const IterativeEigOptions& opt = {}) {
    const auto At = A.transposed();
    std::size_t its = 0;
    const double smax2 = detail::arnoldi_dominant(
        [&](std::span<const double> v) { return At.apply(A.apply(v)); }, A.size(), opt, its);
    GmresConfig cfg;
    cfg.tol = opt.inner_tol;
    cfg.record_history = false;
    cfg.side = PrecondSide::Right;
    cfg.residual = ResidualNorm::True;
    const double inv = detail::arnoldi_dominant(
        [&](std::span<const double> v) {
            auto y = gmres(At, v, inner, cfg);
            auto z = gmres(A, y.solution, inner, cfg);
            if (!y.converged || !z.converged) throw NumericalError("cond2: inner GMRES did not converge");
            return z.solution;
        },
        A.size(), opt, its);
    return std::sqrt(smax2 * inv);
}

/// How the spectral tables map a matrix size m to a grid: dx = 1/(m-1) (nodes
/// on [0,1] including both endpoints) or dx = 1/m.
enum class DxConvention { NodesMinusOne, Nodes };

inline double table_mu(FractionalOrder alpha, std::size_t m, double theta, double k_coef,
                       DxConvention conv = DxConvention::NodesMinusOne) {
    const double dx = 1.0 / static_cast<double>(conv == DxConvention::NodesMinusOne ? m - 1 : m);
    return theta * ScalingConstants::from_grid(alpha, k_coef, dx, dx).mu;
}

/// Rows (m, lambda_min, lambda_max, K_2) of nu*I - mu*A with dt = dx.
inline std::vector<SpectralReport> condition_table(BoundaryScheme scheme, FractionalOrder alpha, double theta,
                                                   double k_coef, std::span<const std::size_t> sizes,
                                                   EigMode mode = EigMode::Dense,
                                                   DxConvention conv = DxConvention::NodesMinusOne) {
    std::vector<SpectralReport> rows;
    for (std::size_t m : sizes) {
        const double mu = table_mu(alpha, m, theta, k_coef, conv);
        const auto L = assemble(scheme, alpha, 0.0, m).lifted(1.0, mu);
        SpectralReport r;
        r.m = m;
        if (mode == EigMode::Dense) {
            const auto e = extremal_eigs(L, EigMode::Dense, 1.0);
            r.lambda_min = e.lambda_min;
            r.lambda_max = e.lambda_max;
            r.max_imag = e.max_imag;
            r.cond2 = cond2_dense(L);
        } else {
            const auto P = inner_tau_preconditioner(alpha, m, 1.0, mu);
            IterativeEigOptions opt;
            opt.inner = &P;
            const auto e = extremal_eigs(L, EigMode::Iterative, 1.0, opt);
            r.lambda_min = e.lambda_min;
            r.lambda_max = e.lambda_max;
            r.cond2 = cond2_iterative(L, &P, opt);
        }
        rows.push_back(r);
    }
    return rows;
}

enum class EigFamily { T0, Anti, AntiR };

inline StructuredOperator family_matrix(EigFamily f, FractionalOrder alpha, std::size_t m) {
    switch (f) {
    case EigFamily::T0: return assemble_T0(alpha, m);
    case EigFamily::Anti: return assemble_antisym(alpha, 0.0, m);
    case EigFamily::AntiR: return assemble_antirefl(alpha, 0.0, m);
    }
    throw ConfigError("unknown matrix family");
}

/// lambda_min (and lambda_max) of the positive-oriented family matrix per size,
/// with gamma filled in for consecutive sizes in ratio 2.
inline std::vector<SpectralReport> eigmin_table(EigFamily f, FractionalOrder alpha, std::span<const std::size_t> sizes,
                                                std::optional<EigMode> mode = std::nullopt) {
    std::vector<SpectralReport> rows;
    for (std::size_t m : sizes) {
        const auto X = family_matrix(f, alpha, m);
        const std::size_t cap = f == EigFamily::T0 ? dense_symmetric_limit : dense_nonsymmetric_limit;
        const EigMode md = mode ? *mode : (m <= cap ? EigMode::Dense : EigMode::Iterative);
        ExtremalEigs e;
        if (md == EigMode::Dense) {
            e = extremal_eigs(X, md, -1.0);
        } else {
            const auto P = inner_tau_preconditioner(alpha, m);
            IterativeEigOptions opt;
            opt.inner = &P;
            e = extremal_eigs(X, md, -1.0, opt);
        }
        SpectralReport r;
        r.m = m;
        r.lambda_min = e.lambda_min;
        r.lambda_max = e.lambda_max;
        r.cond2 = e.lambda_max / e.lambda_min;
        r.max_imag = e.max_imag;
        if (!rows.empty() && rows.back().m * 2 == m) r.gamma = gamma_ratio(rows.back(), r);
        rows.push_back(r);
    }
    return rows;
}

struct SymbolComparison {
    std::vector<double> eigenvalues; // sorted ascending
    std::vector<double> samples;     // f(j pi/(m+1)), j = 1..m
    std::vector<double> errors;
    double max_error = 0.0;
    double max_imag = 0.0;
};

/// Sorted eigenvalues of the positive-oriented A_0^anti against the symbol on
/// the tau grid.
inline SymbolComparison distribution_vs_symbol(FractionalOrder alpha, std::size_t m) {
    SymbolComparison out;
    DenseMatrix A = assemble_antisym(alpha, 0.0, m).materialize(dense_nonsymmetric_limit);
    A *= -1.0;
    out.eigenvalues = detail::dense_real_eigenvalues(A, &out.max_imag);
    out.samples.resize(m);
    for (std::size_t j = 1; j <= m; ++j)
        out.samples[j - 1] = symbol_T0(alpha, static_cast<double>(j) * std::numbers::pi / static_cast<double>(m + 1));
    std::sort(out.samples.begin(), out.samples.end());
    out.errors.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        out.errors[j] = std::abs(out.eigenvalues[j] - out.samples[j]);
        out.max_error = std::max(out.max_error, out.errors[j]);
    }
    return out;
}

} // namespace fracbc
