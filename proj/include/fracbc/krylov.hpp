#pragma once

// Full GMRES (no restart) with left or right preconditioning, and the direct
// solver for lifted truncated matrices (scalar corners plus a tau interior).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fracbc/error.hpp"
#include "fracbc/precond.hpp"
#include "fracbc/structure.hpp"
#include "fracbc/transforms.hpp"

namespace fracbc {

template <class Op>
concept LinearMap = requires(const Op& a, std::span<const double> v) {
    { a.size() } -> std::convertible_to<std::size_t>;
    { a.apply(v) } -> std::convertible_to<std::vector<double>>;
};

enum class PrecondSide { Left, Right };

/// Which relative residual the stopping test uses. Preconditioned means
/// ||M^{-1}(b-Ax)|| / ||M^{-1}b|| for left preconditioning; for right
/// preconditioning both coincide with the true residual.
enum class ResidualNorm { Preconditioned, True };

struct GmresConfig {
    double tol = 1e-6;
    std::size_t maxit = 0; // 0 means 5*m
    PrecondSide side = PrecondSide::Left;
    ResidualNorm residual = ResidualNorm::Preconditioned;
    bool record_history = true;
    /// Second Gram-Schmidt pass when the estimated orthogonality loss of the new
    /// basis vector, eps * ||w_before|| / ||w_after||, exceeds this.
    double reorth_threshold = 1e-8;
};

struct SolveReport {
    std::vector<double> solution;
    std::size_t iterations = 0;
    std::vector<double> residuals; // relative residual estimates, residuals[0] = 1 when x0 = 0
    bool converged = false;
    double true_residual = 0.0;    // ||b - Ax|| / ||b|| at return
    std::size_t reorthogonalizations = 0;
};

namespace detail {

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

template <LinearMap Op>
double true_relative_residual(const Op& A, std::span<const double> b, std::span<const double> x) {
    const auto Ax = A.apply(x);
    double r = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        r += (b[i] - Ax[i]) * (b[i] - Ax[i]);
        nb += b[i] * b[i];
    }
    return nb > 0.0 ? std::sqrt(r / nb) : std::sqrt(r);
}

} // namespace detail

/// Solve A x = b from x0 (zero if empty). M may be null (no preconditioning).
template <LinearMap Op>
SolveReport gmres(const Op& A, std::span<const double> b, const Preconditioner* M, const GmresConfig& cfg,
                  std::span<const double> x0 = {}) {
    const std::size_t m = A.size();
    if (b.size() != m) throw ConfigError("gmres: rhs length does not match operator size");
    if (!x0.empty() && x0.size() != m) throw ConfigError("gmres: initial guess length mismatch");
    if (!(cfg.tol > 0.0)) throw ConfigError("gmres: tol must be positive");
    if (M && M->size() != m && M->kind() != PrecondKind::None) throw ConfigError("gmres: preconditioner size mismatch");
    const bool precond = M && M->kind() != PrecondKind::None;
    const bool left = cfg.side == PrecondSide::Left;
    const std::size_t maxit = cfg.maxit ? cfg.maxit : 5 * m;

    auto minv = [&](std::span<const double> v) -> std::vector<double> {
        return precond ? M->apply_inverse(v) : std::vector<double>(v.begin(), v.end());
    };
    // The operator whose Krylov space is built: M^{-1}A (left) or A M^{-1} (right).
    auto op = [&](std::span<const double> v) -> std::vector<double> {
        if (!precond) return A.apply(v);
        return left ? M->apply_inverse(A.apply(v)) : A.apply(M->apply_inverse(v));
    };

    SolveReport rep;
    std::vector<double> x(m, 0.0);
    if (!x0.empty()) x.assign(x0.begin(), x0.end());

    std::vector<double> r(b.begin(), b.end());
    if (!x0.empty()) {
        const auto Ax = A.apply(x);
        for (std::size_t i = 0; i < m; ++i) r[i] -= Ax[i];
    }
    const double bnorm = detail::norm2(b);
    double scale = bnorm;
    if (left && precond) {
        r = minv(r);
        scale = detail::norm2(minv(b));
    }
    if (bnorm == 0.0) {
        rep.solution.assign(m, 0.0);
        rep.converged = true;
        if (cfg.record_history) rep.residuals.push_back(0.0);
        return rep;
    }
    const double beta = detail::norm2(r);
    if (cfg.record_history) rep.residuals.push_back(beta / scale);
    if (beta / scale <= cfg.tol) {
        rep.solution = x;
        rep.converged = true;
        rep.true_residual = detail::true_relative_residual(A, b, x);
        if (cfg.residual == ResidualNorm::Preconditioned || rep.true_residual <= cfg.tol) return rep;
    }

    std::vector<std::vector<double>> V;
    V.push_back(r);
    for (auto& v : V[0]) v /= beta;
    std::vector<std::vector<double>> H; // H[j] is column j, length j+2
    std::vector<double> cs, sn, g{beta};

    auto assemble_solution = [&](std::size_t k) {
        // Back substitution on the rotated (upper triangular) k x k system.
        std::vector<double> y(k, 0.0);
        for (std::size_t i = k; i-- > 0;) {
            double s = g[i];
            for (std::size_t j = i + 1; j < k; ++j) s -= H[j][i] * y[j];
            y[i] = s / H[i][i];
        }
        std::vector<double> dx(m, 0.0);
        for (std::size_t j = 0; j < k; ++j) detail::axpy(y[j], V[j], dx);
        if (precond && !left) dx = minv(dx);
        std::vector<double> out = x;
        for (std::size_t i = 0; i < m; ++i) out[i] += dx[i];
        return out;
    };

    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t j = 0; j < maxit; ++j) {
        std::vector<double> w = op(V[j]);
        const double wnorm0 = detail::norm2(w);
        std::vector<double> h(j + 2, 0.0);
        for (std::size_t i = 0; i <= j; ++i) {
            h[i] = detail::dot(w, V[i]);
            detail::axpy(-h[i], V[i], w);
        }
        double hn = detail::norm2(w);
        if (hn > 0.0 && eps * wnorm0 / hn > cfg.reorth_threshold) {
            ++rep.reorthogonalizations;
            for (std::size_t i = 0; i <= j; ++i) {
                const double c = detail::dot(w, V[i]);
                h[i] += c;
                detail::axpy(-c, V[i], w);
            }
            hn = detail::norm2(w);
        }
        h[j + 1] = hn;

        for (std::size_t i = 0; i < j; ++i) {
            const double t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        const double denom = std::hypot(h[j], h[j + 1]);
        const double c = denom > 0.0 ? h[j] / denom : 1.0;
        const double s = denom > 0.0 ? h[j + 1] / denom : 0.0;
        cs.push_back(c);
        sn.push_back(s);
        h[j] = denom;
        h[j + 1] = 0.0;
        g.push_back(-s * g[j]);
        g[j] = c * g[j];
        H.push_back(std::move(h));

        const double res = std::abs(g[j + 1]) / scale;
        if (cfg.record_history) rep.residuals.push_back(res);
        rep.iterations = j + 1;
        const bool breakdown = hn <= 1e-14 * wnorm0;
        if (res <= cfg.tol || breakdown) {
            auto xs = assemble_solution(j + 1);
            const double tr = detail::true_relative_residual(A, b, xs);
            const bool accept = breakdown || cfg.residual == ResidualNorm::Preconditioned || !left || !precond ||
                                tr <= cfg.tol;
            if (accept) {
                rep.solution = std::move(xs);
                rep.true_residual = tr;
                rep.converged = true;
                return rep;
            }
        }
        for (auto& v : w) v /= hn;
        V.push_back(std::move(w));
    }
    rep.solution = assemble_solution(rep.iterations);
    rep.true_residual = detail::true_relative_residual(A, b, rep.solution);
    rep.converged = false;
    return rep;
}

/// Operators made only of identity and full-size tau parts.
inline bool is_pure_tau(const StructuredOperator& op) {
    bool tau = false;
    for (const auto& p : op.parts()) {
        if (std::holds_alternative<IdentityPart>(p.kind)) continue;
        if (std::holds_alternative<TauPart>(p.kind) && p.offset == 0 && p.n == op.size()) {
            tau = true;
            continue;
        }
        return false;
    }
    return tau;
}

/// Spectrum of a pure tau operator (identity parts folded in).
inline TauSpectrum pure_tau_spectrum(const StructuredOperator& op) {
    if (!is_pure_tau(op)) throw ConfigError("pure_tau_spectrum: operator is not a tau matrix");
    std::vector<double> lam(op.size(), 0.0);
    for (const auto& p : op.parts()) {
        if (const auto* t = std::get_if<TauPart>(&p.kind)) {
            const auto s = tau_eigenvalues(ToeplitzCoefficients{t->t}, op.size());
            for (std::size_t j = 0; j < lam.size(); ++j) lam[j] += p.scale * s.eigenvalues[j];
        } else {
            for (auto& l : lam) l += p.scale;
        }
    }
    return {std::move(lam)};
}

/// Identity, an interior tau block and border entries in the first/last column only.
inline bool is_bordered_tau(const StructuredOperator& op) {
    const std::size_t m = op.size();
    if (m < 4) return false;
    bool tau = false;
    for (const auto& p : op.parts()) {
        if (std::holds_alternative<IdentityPart>(p.kind)) continue;
        if (std::holds_alternative<TauPart>(p.kind)) {
            if (p.offset != 1 || p.n != m - 2) return false;
            tau = true;
            continue;
        }
        const auto* b = std::get_if<BorderPart>(&p.kind);
        if (!b) return false;
        for (const auto& e : b->entries) {
            const bool corner = (e.row == 0 && e.col == 0) || (e.row == m - 1 && e.col == m - 1);
            const bool column = (e.col == 0 || e.col == m - 1) && e.row > 0 && e.row < m - 1;
            if (!corner && !column) return false;
        }
    }
    return tau;
}

/// Lifted truncated matrix nu*I - mu*A in split form: rows 0 and m-1 diagonal,
/// interior coupled to the endpoints through two border columns and a tau block.
class BorderedTauSystem {
public:
    explicit BorderedTauSystem(const StructuredOperator& op) : m_(op.size()) {
        if (m_ < 4) throw ConfigError("BorderedTauSystem: need m >= 4");
        const std::size_t n = m_ - 2, last = m_ - 1;
        first_.assign(n, 0.0);
        last_.assign(n, 0.0);
        std::vector<double> lam(n, 0.0);
        double ident = 0.0;
        bool have_tau = false;
        for (const auto& p : op.parts()) {
            if (std::holds_alternative<IdentityPart>(p.kind)) {
                ident += p.scale;
            } else if (const auto* t = std::get_if<TauPart>(&p.kind)) {
                if (p.offset != 1 || p.n != n) throw ConfigError("BorderedTauSystem: tau part must fill the interior");
                const auto s = tau_eigenvalues(ToeplitzCoefficients{t->t}, n);
                for (std::size_t j = 0; j < n; ++j) lam[j] += p.scale * s.eigenvalues[j];
                have_tau = true;
            } else if (const auto* b = std::get_if<BorderPart>(&p.kind)) {
                for (const auto& e : b->entries) {
                    const double v = p.scale * e.value;
                    if (e.row == 0 && e.col == 0) c0_ += v;
                    else if (e.row == last && e.col == last) cN_ += v;
                    else if (e.col == 0 && e.row > 0 && e.row < last) first_[e.row - 1] += v;
                    else if (e.col == last && e.row > 0 && e.row < last) last_[e.row - 1] += v;
                    else throw ConfigError("BorderedTauSystem: border entry outside the bordered pattern");
                }
            } else {
                throw ConfigError("BorderedTauSystem: operator is not a bordered tau matrix");
            }
        }
        if (!have_tau && ident == 0.0) throw ConfigError("BorderedTauSystem: empty interior block");
        c0_ += ident;
        cN_ += ident;
        for (auto& l : lam) l += ident;
        if (c0_ == 0.0 || cN_ == 0.0) throw NumericalError("BorderedTauSystem: zero diagonal corner entry");
        spectrum_ = TauSpectrum{std::move(lam)};
        detail::check_spectrum(spectrum_.eigenvalues, "BorderedTauSystem");
        plan_ = std::make_shared<Dst1Plan>(n);
    }

    std::size_t size() const noexcept { return m_; }
    const TauSpectrum& interior_spectrum() const noexcept { return spectrum_; }

    std::vector<double> solve(std::span<const double> b) const {
        if (b.size() != m_) throw ConfigError("solve_direct_bordered: size mismatch");
        const std::size_t n = m_ - 2;
        const double x0 = b[0] / c0_;
        const double xN = b[m_ - 1] / cN_;
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i + 1] - first_[i] * x0 - last_[i] * xN;
        const auto xi = tau_solve(spectrum_, r, plan_.get());
        std::vector<double> x(m_);
        x[0] = x0;
        x[m_ - 1] = xN;
        std::copy(xi.begin(), xi.end(), x.begin() + 1);
        return x;
    }

private:
    std::size_t m_;
    double c0_ = 0.0, cN_ = 0.0;
    std::vector<double> first_, last_;
    TauSpectrum spectrum_;
    std::shared_ptr<const Dst1Plan> plan_;
};

inline std::vector<double> solve_direct_bordered(const StructuredOperator& op, std::span<const double> b) {
    return BorderedTauSystem(op).solve(b);
}

} // namespace fracbc
