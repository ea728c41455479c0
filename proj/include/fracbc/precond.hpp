#pragma once

// Circulant and tau preconditioners built from the symmetric Toeplitz part
// T_0 and lifted to the time-step matrix nu*I - mu*A.

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fracbc/error.hpp"
#include "fracbc/fft.hpp"
#include "fracbc/glkernel.hpp"
#include "fracbc/structure.hpp"
#include "fracbc/transforms.hpp"

namespace fracbc {

enum class PrecondKind { None, StrangCirculant, OptimalCirculant, NaturalTau, OptimalTau };

inline std::string_view to_string(PrecondKind k) {
    switch (k) {
    case PrecondKind::None: return "none";
    case PrecondKind::StrangCirculant: return "strang";
    case PrecondKind::OptimalCirculant: return "circ-opt";
    case PrecondKind::NaturalTau: return "tau";
    case PrecondKind::OptimalTau: return "tau-opt";
    }
    return "?";
}

inline PrecondKind parse_precond(std::string_view s) {
    if (s == "none") return PrecondKind::None;
    if (s == "strang") return PrecondKind::StrangCirculant;
    if (s == "circ-opt") return PrecondKind::OptimalCirculant;
    if (s == "tau") return PrecondKind::NaturalTau;
    if (s == "tau-opt") return PrecondKind::OptimalTau;
    throw ConfigError("unknown preconditioner '" + std::string(s) + "' (none|strang|circ-opt|tau|tau-opt)");
}

inline constexpr PrecondKind all_preconditioners[] = {PrecondKind::None, PrecondKind::StrangCirculant,
                                                      PrecondKind::OptimalCirculant, PrecondKind::NaturalTau,
                                                      PrecondKind::OptimalTau};

class Preconditioner {
public:
    Preconditioner() = default;

    static Preconditioner identity(std::size_t m) {
        Preconditioner p;
        p.kind_ = PrecondKind::None;
        p.m_ = m;
        return p;
    }

    static Preconditioner circulant(PrecondKind kind, std::vector<double> first_column) {
        Preconditioner p;
        p.kind_ = kind;
        p.m_ = first_column.size();
        p.column_ = std::move(first_column);
        p.fft_ = std::make_shared<FftPlan>(p.m_);
        std::vector<cplx> x(p.column_.begin(), p.column_.end());
        p.spectrum_ = CirculantSpectrum{p.fft_->forward(x)};
        return p;
    }

    static Preconditioner tau(PrecondKind kind, TauSpectrum spectrum) {
        Preconditioner p;
        p.kind_ = kind;
        p.m_ = spectrum.size();
        p.dst_ = std::make_shared<Dst1Plan>(p.m_);
        p.spectrum_ = std::move(spectrum);
        return p;
    }

    PrecondKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return m_; }
    bool is_circulant() const noexcept { return std::holds_alternative<CirculantSpectrum>(spectrum_); }
    bool is_tau() const noexcept { return std::holds_alternative<TauSpectrum>(spectrum_); }
    const CirculantSpectrum& circulant_spectrum() const { return std::get<CirculantSpectrum>(spectrum_); }
    const TauSpectrum& tau_spectrum() const { return std::get<TauSpectrum>(spectrum_); }
    /// First column of the (unlifted or lifted) circulant; empty otherwise.
    const std::vector<double>& first_column() const noexcept { return column_; }

    /// Solve P x = v in the algebra.
    std::vector<double> apply_inverse(std::span<const double> v) const {
        if (v.size() != m_) throw ConfigError("apply_inverse: size mismatch");
        if (const auto* c = std::get_if<CirculantSpectrum>(&spectrum_)) return circulant_solve(*c, v, fft_.get());
        if (const auto* t = std::get_if<TauSpectrum>(&spectrum_)) return tau_solve(*t, v, dst_.get());
        return {v.begin(), v.end()};
    }

    /// nu*I - mu*P; the identity preconditioner stays the identity.
    Preconditioner lifted(double nu, double mu) const {
        Preconditioner p = *this;
        if (auto* c = std::get_if<CirculantSpectrum>(&p.spectrum_)) {
            for (auto& l : c->eigenvalues) {
                l = nu - mu * l;
                if (std::abs(l) < 1e-13) throw NumericalError("lift: singular lifted circulant preconditioner");
            }
            for (std::size_t j = 0; j < p.column_.size(); ++j) p.column_[j] = (j == 0 ? nu : 0.0) - mu * p.column_[j];
        } else if (auto* t = std::get_if<TauSpectrum>(&p.spectrum_)) {
            for (std::size_t j = 0; j < t->eigenvalues.size(); ++j) {
                auto& l = t->eigenvalues[j];
                l = nu - mu * l;
                if (std::abs(l) < 1e-13)
                    throw NumericalError("lift: singular lifted tau preconditioner at index " + std::to_string(j));
            }
        }
        return p;
    }

    /// Dense matrix of the preconditioner (tests only).
    DenseMatrix materialize() const {
        const auto n = static_cast<Eigen::Index>(m_);
        if (is_circulant()) {
            DenseMatrix C(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) C(i, j) = column_[static_cast<std::size_t>((i - j + n) % n)];
            return C;
        }
        if (is_tau()) {
            // S diag(lambda) S with the orthogonal sine matrix.
            const auto& lam = tau_spectrum().eigenvalues;
            DenseMatrix S(n, n);
            const double s = std::sqrt(2.0 / static_cast<double>(n + 1));
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    S(i, j) = s * std::sin(static_cast<double>((i + 1) * (j + 1)) * std::numbers::pi /
                                           static_cast<double>(n + 1));
            Eigen::VectorXd d(n);
            for (Eigen::Index i = 0; i < n; ++i) d(i) = lam[static_cast<std::size_t>(i)];
            return S * d.asDiagonal() * S;
        }
        return DenseMatrix::Identity(n, n);
    }

private:
    PrecondKind kind_ = PrecondKind::None;
    std::size_t m_ = 0;
    std::variant<std::monostate, CirculantSpectrum, TauSpectrum> spectrum_;
    std::vector<double> column_;
    std::shared_ptr<const FftPlan> fft_;
    std::shared_ptr<const Dst1Plan> dst_;
};

namespace detail {

inline double t_or_zero(const ToeplitzCoefficients& t, std::size_t k) { return k < t.size() ? t[k] : 0.0; }

inline void check_precond_size(std::size_t m) {
    if (m < 2) throw ConfigError("preconditioner size must be >= 2");
}

} // namespace detail

inline Preconditioner strang_circulant(const ToeplitzCoefficients& t, std::size_t m) {
    detail::check_precond_size(m);
    std::vector<double> c(m);
    for (std::size_t j = 0; j < m; ++j) c[j] = j <= m / 2 ? detail::t_or_zero(t, j) : detail::t_or_zero(t, m - j);
    return Preconditioner::circulant(PrecondKind::StrangCirculant, std::move(c));
}

inline Preconditioner optimal_circulant(const ToeplitzCoefficients& t, std::size_t m) {
    detail::check_precond_size(m);
    std::vector<double> c(m);
    const double dm = static_cast<double>(m);
    c[0] = detail::t_or_zero(t, 0);
    for (std::size_t j = 1; j < m; ++j)
        c[j] = (static_cast<double>(m - j) * detail::t_or_zero(t, j) + static_cast<double>(j) * detail::t_or_zero(t, m - j)) / dm;
    return Preconditioner::circulant(PrecondKind::OptimalCirculant, std::move(c));
}

inline Preconditioner natural_tau(const ToeplitzCoefficients& t, std::size_t m) {
    detail::check_precond_size(m);
    return Preconditioner::tau(PrecondKind::NaturalTau, tau_eigenvalues(t, m));
}

/// diag(S T S) of a dense symmetric matrix.
inline TauSpectrum optimal_tau_projection(const DenseMatrix& T) {
    const auto n = T.rows();
    if (T.cols() != n) throw ConfigError("optimal_tau_projection: matrix must be square");
    DenseMatrix S(n, n);
    const double s = std::sqrt(2.0 / static_cast<double>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            S(i, j) = s * std::sin(static_cast<double>((i + 1) * (j + 1)) * std::numbers::pi / static_cast<double>(n + 1));
    const DenseMatrix TS = T * S;
    TauSpectrum out;
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) out.eigenvalues[static_cast<std::size_t>(j)] = S.col(j).dot(TS.col(j));
    return out;
}

/// diag(S T S) for the symmetric Toeplitz T(t_0..t_{m-1}) in O(m log m):
/// lambda_j = t_0 + 2/(m+1) sum_{d=1}^{m-1} t_d [(m-d) cos(j d th) + sin((d+1) j th)/sin(j th)], th = pi/(m+1).
inline TauSpectrum optimal_tau_closed_form(const ToeplitzCoefficients& t, std::size_t m) {
    std::vector<double> a(m, 0.0), b(m + 1, 0.0);
    for (std::size_t d = 1; d < m; ++d) {
        const double td = detail::t_or_zero(t, d);
        a[d] = static_cast<double>(m - d) * td;
        b[d + 1] = td;
    }
    std::vector<double> C, S, C2, S2;
    detail::trig_sums(a, m, C, S);
    detail::trig_sums(b, m, C2, S2);
    TauSpectrum out;
    out.eigenvalues.resize(m);
    const double th = std::numbers::pi / static_cast<double>(m + 1);
    const double w = 2.0 / static_cast<double>(m + 1);
    for (std::size_t j = 1; j <= m; ++j)
        out.eigenvalues[j - 1] = detail::t_or_zero(t, 0) + w * (C[j - 1] + S2[j - 1] / std::sin(static_cast<double>(j) * th));
    return out;
}

enum class OptimalTauMethod { Auto, Projection, ClosedForm };

/// Frobenius-optimal tau approximation of T(t). Auto projects densely up to
/// m = 512 and uses the closed form beyond.
inline Preconditioner optimal_tau(const ToeplitzCoefficients& t, std::size_t m,
                                  OptimalTauMethod method = OptimalTauMethod::Auto) {
    detail::check_precond_size(m);
    if (method == OptimalTauMethod::Auto) method = m <= 512 ? OptimalTauMethod::Projection : OptimalTauMethod::ClosedForm;
    if (method == OptimalTauMethod::ClosedForm)
        return Preconditioner::tau(PrecondKind::OptimalTau, optimal_tau_closed_form(t, m));
    const auto n = static_cast<Eigen::Index>(m);
    DenseMatrix T(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) T(i, j) = detail::t_or_zero(t, static_cast<std::size_t>(std::abs(i - j)));
    return Preconditioner::tau(PrecondKind::OptimalTau, optimal_tau_projection(T));
}

inline Preconditioner optimal_tau(const DenseMatrix& T0) {
    detail::check_precond_size(static_cast<std::size_t>(T0.rows()));
    return Preconditioner::tau(PrecondKind::OptimalTau, optimal_tau_projection(T0));
}

/// Unlifted preconditioner of the given kind for T_0 of size m.
inline Preconditioner make_preconditioner(PrecondKind kind, const ToeplitzCoefficients& t, std::size_t m) {
    switch (kind) {
    case PrecondKind::None: return Preconditioner::identity(m);
    case PrecondKind::StrangCirculant: return strang_circulant(t, m);
    case PrecondKind::OptimalCirculant: return optimal_circulant(t, m);
    case PrecondKind::NaturalTau: return natural_tau(t, m);
    case PrecondKind::OptimalTau: return optimal_tau(t, m);
    }
    throw ConfigError("make_preconditioner: unknown kind");
}

inline Preconditioner lift(const Preconditioner& p, double nu, double mu) { return p.lifted(nu, mu); }

/// Coefficients t_0..t_{m-1} of T_0 for matrix size m.
inline ToeplitzCoefficients t0_coefficients(FractionalOrder alpha, std::size_t m) {
    const GLCoefficients gl(alpha, m + 1);
    return toeplitz_coefficients(gl, m - 1);
}

} // namespace fracbc
