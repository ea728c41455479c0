#pragma once

// Boundary-scheme matrices as sums of scaled structured parts (Toeplitz,
// Hankel, tau, sparse border corrections, identity) with a matrix-free
// O(m log m) apply and a dense materialization for oracle tests.
//
// Indexing is 0-based over the grid nodes x_0..x_N, m = N + 1. Matrices are
// assembled with the sign of the Grunwald-Letnikov sums (negative diagonal);
// nothing here reorients them.

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fracbc/error.hpp"
#include "fracbc/fft.hpp"
#include "fracbc/glkernel.hpp"
#include "fracbc/transforms.hpp"

namespace fracbc {

using DenseMatrix = Eigen::MatrixXd;

enum class BoundaryScheme {
    OpenToeplitz,
    Dirichlet,
    Reflective,
    AntiSymmetric,
    AntiReflective,
    AntiSymmetricTrunc,
    AntiReflectiveTrunc,
};

inline bool is_truncated(BoundaryScheme s) {
    return s == BoundaryScheme::AntiSymmetricTrunc || s == BoundaryScheme::AntiReflectiveTrunc;
}

inline std::string_view to_string(BoundaryScheme s) {
    switch (s) {
    case BoundaryScheme::OpenToeplitz: return "open";
    case BoundaryScheme::Dirichlet: return "dirichlet";
    case BoundaryScheme::Reflective: return "reflective";
    case BoundaryScheme::AntiSymmetric: return "anti";
    case BoundaryScheme::AntiReflective: return "antiR";
    case BoundaryScheme::AntiSymmetricTrunc: return "anti-trunc";
    case BoundaryScheme::AntiReflectiveTrunc: return "antiR-trunc";
    }
    return "?";
}

inline BoundaryScheme parse_scheme(std::string_view s) {
    static const std::map<std::string_view, BoundaryScheme> names = {
        {"open", BoundaryScheme::OpenToeplitz},      {"dirichlet", BoundaryScheme::Dirichlet},
        {"D", BoundaryScheme::Dirichlet},            {"reflective", BoundaryScheme::Reflective},
        {"R", BoundaryScheme::Reflective},           {"anti", BoundaryScheme::AntiSymmetric},
        {"antiR", BoundaryScheme::AntiReflective},   {"AR", BoundaryScheme::AntiReflective},
        {"anti-trunc", BoundaryScheme::AntiSymmetricTrunc},
        {"antiR-trunc", BoundaryScheme::AntiReflectiveTrunc},
    };
    auto it = names.find(s);
    if (it == names.end()) throw ConfigError("unknown boundary scheme '" + std::string(s) + "'");
    return it->second;
}

/// Diagonal-constant block. col[d] = entry (i+d, i), row[d] = entry (i, i+d); col[0] == row[0].
struct ToeplitzPart {
    enum class Shape { Symmetric, HessenbergL, HessenbergR, General };
    std::vector<double> col;
    std::vector<double> row;
    Shape shape = Shape::General;
};

/// Entry (i, j) = h[i + j]; h has 2n - 1 entries.
struct HankelPart {
    std::vector<double> h;
};

struct BorderEntry {
    std::size_t row;
    std::size_t col;
    double value;
};

struct BorderPart {
    std::vector<BorderEntry> entries;
};

/// tau_n(t) = T_n(t) - H_n(t_2, t_3, ...) - J H_n J, diagonalized by the DST-I.
struct TauPart {
    std::vector<double> t;
};

struct IdentityPart {};

/// A part occupies the diagonal block [offset, offset + n) of the operator.
struct StructuredPart {
    std::variant<ToeplitzPart, HankelPart, BorderPart, TauPart, IdentityPart> kind;
    double scale = 1.0;
    std::size_t offset = 0;
    std::size_t n = 0;
};

namespace detail {

inline std::vector<cplx> toeplitz_embedding_spectrum(std::span<const double> col, std::span<const double> row,
                                                     const FftPlan& plan) {
    const std::size_t L = plan.size();
    const std::size_t n = col.size();
    std::vector<cplx> e(L, cplx{});
    for (std::size_t d = 0; d < n; ++d) e[d] = col[d];
    for (std::size_t d = 1; d < n; ++d) e[L - d] = row[d];
    return plan.forward(e);
}

/// Hankel h applied to v equals the Toeplitz c(d) = h[d + n - 1] applied to reversed v.
inline void hankel_as_toeplitz(std::span<const double> h, std::size_t n, std::vector<double>& col,
                               std::vector<double>& row) {
    col.assign(n, 0.0);
    row.assign(n, 0.0);
    for (std::size_t d = 0; d < n; ++d) {
        col[d] = h[d + n - 1];
        row[d] = h[n - 1 - d];
    }
}

/// Fused FFT kernel for all Toeplitz-like (or Hankel-like) parts on one block.
struct FastKernel {
    bool flip_input = false; // Hankel kernels act on the reversed input
    std::size_t offset = 0;
    std::size_t n = 0;
    std::shared_ptr<const FftPlan> plan;
    std::vector<cplx> spectrum;
};

struct TauKernel {
    std::size_t offset = 0;
    std::shared_ptr<const Dst1Plan> plan;
    TauSpectrum spectrum;
    double scale = 1.0;
};

} // namespace detail

/// Immutable-after-assembly sum of structured parts. apply() is re-entrant.
class StructuredOperator {
public:
    static constexpr std::size_t default_dense_limit = 4096;

    explicit StructuredOperator(std::size_t m, double beta = 0.0) : m_(m), beta_(beta) {
        if (m == 0) throw ConfigError("StructuredOperator: size must be positive");
    }

    std::size_t size() const noexcept { return m_; }
    double beta() const noexcept { return beta_; }
    const std::vector<StructuredPart>& parts() const noexcept { return parts_; }

    void add(StructuredPart p) {
        if (p.n == 0) p.n = m_ - p.offset;
        if (p.offset + p.n > m_) throw ConfigError("StructuredOperator: part exceeds operator size");
        validate(p);
        register_kernel(p);
        parts_.push_back(std::move(p));
    }

    void add_toeplitz(std::vector<double> col, std::vector<double> row, double scale,
                      ToeplitzPart::Shape shape = ToeplitzPart::Shape::General, std::size_t offset = 0) {
        const std::size_t n = col.size();
        add({ToeplitzPart{std::move(col), std::move(row), shape}, scale, offset, n});
    }
    void add_hankel(std::vector<double> h, double scale, std::size_t offset = 0) {
        const std::size_t n = (h.size() + 1) / 2;
        add({HankelPart{std::move(h)}, scale, offset, n});
    }
    void add_border(std::vector<BorderEntry> entries, double scale = 1.0) {
        add({BorderPart{std::move(entries)}, scale, 0, m_});
    }
    void add_tau(std::vector<double> t, double scale, std::size_t offset = 0) {
        const std::size_t n = t.size();
        add({TauPart{std::move(t)}, scale, offset, n});
    }
    void add_identity(double scale) { add({IdentityPart{}, scale, 0, m_}); }

    std::vector<double> apply(std::span<const double> v) const {
        if (v.size() != m_)
            throw ConfigError("apply: operator size " + std::to_string(m_) + " but vector length " +
                              std::to_string(v.size()));
        std::vector<double> y(m_, 0.0);
        for (const auto& k : fast_) {
            const std::size_t L = k.plan->size();
            std::vector<cplx> x(L, cplx{});
            for (std::size_t i = 0; i < k.n; ++i)
                x[i] = k.flip_input ? v[k.offset + k.n - 1 - i] : v[k.offset + i];
            auto X = k.plan->forward(x);
            for (std::size_t i = 0; i < L; ++i) X[i] = detail::cmul(X[i], k.spectrum[i]);
            const auto r = k.plan->inverse(X);
            for (std::size_t i = 0; i < k.n; ++i) y[k.offset + i] += r[i].real();
        }
        for (const auto& k : tau_) {
            const auto r = tau_apply(k.spectrum, v.subspan(k.offset, k.spectrum.size()), *k.plan);
            for (std::size_t i = 0; i < r.size(); ++i) y[k.offset + i] += k.scale * r[i];
        }
        for (const auto& p : parts_) {
            if (const auto* b = std::get_if<BorderPart>(&p.kind)) {
                for (const auto& e : b->entries) y[e.row] += p.scale * e.value * v[e.col];
            } else if (std::holds_alternative<IdentityPart>(p.kind)) {
                for (std::size_t i = 0; i < m_; ++i) y[i] += p.scale * v[i];
            }
        }
        return y;
    }

    DenseMatrix materialize(std::size_t limit = default_dense_limit) const {
        if (m_ > limit)
            throw ConfigError("materialize: size " + std::to_string(m_) + " above dense limit " + std::to_string(limit));
        DenseMatrix A = DenseMatrix::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
        for (const auto& p : parts_) accumulate_dense(p, A);
        return A;
    }

    StructuredOperator transposed() const {
        StructuredOperator out(m_, beta_);
        for (const auto& p : parts_) {
            StructuredPart q = p;
            if (auto* t = std::get_if<ToeplitzPart>(&q.kind)) {
                std::swap(t->col, t->row);
                if (t->shape == ToeplitzPart::Shape::HessenbergL) t->shape = ToeplitzPart::Shape::HessenbergR;
                else if (t->shape == ToeplitzPart::Shape::HessenbergR) t->shape = ToeplitzPart::Shape::HessenbergL;
            } else if (auto* b = std::get_if<BorderPart>(&q.kind)) {
                for (auto& e : b->entries) std::swap(e.row, e.col);
            }
            out.add(std::move(q));
        }
        return out;
    }

    /// nu*I - mu*A.
    StructuredOperator lifted(double nu, double mu) const {
        StructuredOperator out(m_, beta_);
        if (nu != 0.0) out.add_identity(nu);
        if (mu != 0.0)
            for (const auto& p : parts_) {
                StructuredPart q = p;
                q.scale *= -mu;
                out.add(std::move(q));
            }
        return out;
    }

    /// Principal submatrix on the nodes 1..m-2 (both endpoints eliminated).
    StructuredOperator interior() const {
        if (m_ < 3) throw ConfigError("interior: operator too small");
        const std::size_t lo = 1, hi = m_ - 1, mi = m_ - 2;
        StructuredOperator out(mi, beta_);
        for (const auto& p : parts_) {
            const std::size_t a = std::max(lo, p.offset), b = std::min(hi, p.offset + p.n);
            if (a >= b) continue;
            const std::size_t skip = a - p.offset, n = b - a;
            std::visit(
                [&](const auto& part) {
                    using T = std::decay_t<decltype(part)>;
                    if constexpr (std::is_same_v<T, ToeplitzPart>) {
                        out.add({ToeplitzPart{{part.col.begin(), part.col.begin() + static_cast<std::ptrdiff_t>(n)},
                                              {part.row.begin(), part.row.begin() + static_cast<std::ptrdiff_t>(n)},
                                              part.shape},
                                 p.scale, a - lo, n});
                    } else if constexpr (std::is_same_v<T, HankelPart>) {
                        std::vector<double> h(2 * n - 1);
                        for (std::size_t s = 0; s < h.size(); ++s) h[s] = part.h[s + 2 * skip];
                        out.add({HankelPart{std::move(h)}, p.scale, a - lo, n});
                    } else if constexpr (std::is_same_v<T, BorderPart>) {
                        BorderPart bp;
                        for (const auto& e : part.entries)
                            if (e.row >= lo && e.row < hi && e.col >= lo && e.col < hi)
                                bp.entries.push_back({e.row - lo, e.col - lo, e.value});
                        out.add({std::move(bp), p.scale, 0, mi});
                    } else if constexpr (std::is_same_v<T, TauPart>) {
                        if (skip != 0 || n != p.n)
                            throw ConfigError("interior: a tau part straddling an endpoint has no tau restriction");
                        out.add({part, p.scale, a - lo, n});
                    } else {
                        out.add({IdentityPart{}, p.scale, 0, mi});
                    }
                },
                p.kind);
        }
        return out;
    }

private:
    void validate(const StructuredPart& p) const {
        std::visit(
            [&](const auto& part) {
                using T = std::decay_t<decltype(part)>;
                if constexpr (std::is_same_v<T, ToeplitzPart>) {
                    if (part.col.size() != p.n || part.row.size() != p.n || part.col[0] != part.row[0])
                        throw ConfigError("ToeplitzPart: inconsistent column/row");
                } else if constexpr (std::is_same_v<T, HankelPart>) {
                    if (part.h.size() != 2 * p.n - 1) throw ConfigError("HankelPart: need 2n-1 coefficients");
                } else if constexpr (std::is_same_v<T, BorderPart>) {
                    for (const auto& e : part.entries)
                        if (e.row >= m_ || e.col >= m_) throw ConfigError("BorderPart: entry out of range");
                } else if constexpr (std::is_same_v<T, TauPart>) {
                    if (part.t.size() != p.n) throw ConfigError("TauPart: need n coefficients");
                } else if constexpr (std::is_same_v<T, IdentityPart>) {
                    if (p.offset != 0 || p.n != m_) throw ConfigError("IdentityPart: must span the operator");
                }
            },
            p.kind);
    }

    void register_kernel(const StructuredPart& p) {
        std::vector<double> col, row;
        bool flip = false;
        if (const auto* t = std::get_if<ToeplitzPart>(&p.kind)) {
            col = t->col;
            row = t->row;
        } else if (const auto* h = std::get_if<HankelPart>(&p.kind)) {
            detail::hankel_as_toeplitz(h->h, p.n, col, row);
            flip = true;
        } else if (const auto* tau = std::get_if<TauPart>(&p.kind)) {
            detail::TauKernel k;
            k.offset = p.offset;
            k.plan = std::make_shared<Dst1Plan>(p.n);
            k.spectrum = tau_eigenvalues(ToeplitzCoefficients{tau->t}, p.n);
            k.scale = p.scale;
            tau_.push_back(std::move(k));
            return;
        } else {
            return;
        }
        auto it = std::find_if(fast_.begin(), fast_.end(), [&](const detail::FastKernel& k) {
            return k.flip_input == flip && k.offset == p.offset && k.n == p.n;
        });
        if (it == fast_.end()) {
            detail::FastKernel k;
            k.flip_input = flip;
            k.offset = p.offset;
            k.n = p.n;
            k.plan = std::make_shared<FftPlan>(detail::next_pow2(2 * p.n - 1));
            k.spectrum.assign(k.plan->size(), cplx{});
            fast_.push_back(std::move(k));
            it = fast_.end() - 1;
        }
        const auto spec = detail::toeplitz_embedding_spectrum(col, row, *it->plan);
        for (std::size_t i = 0; i < spec.size(); ++i) it->spectrum[i] += p.scale * spec[i];
    }

    static void accumulate_dense(const StructuredPart& p, DenseMatrix& A) {
        const auto o = static_cast<Eigen::Index>(p.offset);
        const auto n = static_cast<Eigen::Index>(p.n);
        std::visit(
            [&](const auto& part) {
                using T = std::decay_t<decltype(part)>;
                if constexpr (std::is_same_v<T, ToeplitzPart>) {
                    for (Eigen::Index i = 0; i < n; ++i)
                        for (Eigen::Index j = 0; j < n; ++j)
                            A(o + i, o + j) += p.scale * (i >= j ? part.col[static_cast<std::size_t>(i - j)]
                                                                 : part.row[static_cast<std::size_t>(j - i)]);
                } else if constexpr (std::is_same_v<T, HankelPart>) {
                    for (Eigen::Index i = 0; i < n; ++i)
                        for (Eigen::Index j = 0; j < n; ++j)
                            A(o + i, o + j) += p.scale * part.h[static_cast<std::size_t>(i + j)];
                } else if constexpr (std::is_same_v<T, BorderPart>) {
                    for (const auto& e : part.entries)
                        A(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += p.scale * e.value;
                } else if constexpr (std::is_same_v<T, TauPart>) {
                    const auto& t = part.t;
                    auto tk = [&](Eigen::Index k) { return k < n ? t[static_cast<std::size_t>(k)] : 0.0; };
                    for (Eigen::Index i = 0; i < n; ++i)
                        for (Eigen::Index j = 0; j < n; ++j)
                            A(o + i, o + j) += p.scale * (tk(std::abs(i - j)) - tk(i + j + 2) - tk(2 * n - i - j));
                } else {
                    for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, i) += p.scale;
                }
            },
            p.kind);
    }

    std::size_t m_;
    double beta_;
    std::vector<StructuredPart> parts_;
    std::vector<detail::FastKernel> fast_;
    std::vector<detail::TauKernel> tau_;
};

namespace detail {

enum class ExteriorRule { Zero, Even, Odd, AntiReflective };

/// J P J for a part of an operator of size m.
inline StructuredPart flipped(const StructuredPart& p, std::size_t m) {
    StructuredPart q = p;
    q.offset = m - p.offset - p.n;
    if (auto* t = std::get_if<ToeplitzPart>(&q.kind)) {
        std::swap(t->col, t->row);
        if (t->shape == ToeplitzPart::Shape::HessenbergL) t->shape = ToeplitzPart::Shape::HessenbergR;
        else if (t->shape == ToeplitzPart::Shape::HessenbergR) t->shape = ToeplitzPart::Shape::HessenbergL;
    } else if (auto* h = std::get_if<HankelPart>(&q.kind)) {
        std::reverse(h->h.begin(), h->h.end());
    } else if (auto* b = std::get_if<BorderPart>(&q.kind)) {
        for (auto& e : b->entries) {
            e.row = m - 1 - e.row;
            e.col = m - 1 - e.col;
        }
    }
    return q;
}

/// Parts of the left-derivative matrix A_L for a given way of filling the exterior.
/// Row j holds sum_{k=0}^{K_j} g_k U_{j+1-k}, K_j = N+j+1 (or N when truncated).
inline std::vector<StructuredPart> left_parts(const GLCoefficients& gl, std::size_t N, ExteriorRule rule,
                                              bool truncated) {
    const std::size_t m = N + 1;
    std::vector<StructuredPart> parts;

    std::vector<double> col(m), row(m, 0.0);
    for (std::size_t d = 0; d < m; ++d) col[d] = (truncated && d + 1 > N) ? 0.0 : gl[d + 1];
    row[0] = gl[1];
    if (m > 1) row[1] = gl[0];
    parts.push_back({ToeplitzPart{std::move(col), std::move(row), ToeplitzPart::Shape::HessenbergL}, 1.0, 0, m});
    if (rule == ExteriorRule::Zero) return parts;

    const double s = rule == ExteriorRule::Even ? 1.0 : -1.0;
    // U_{-r} -> s U_r for r >= 1: entry (j, r) picks up s g_{j+1+r}. The full Hankel
    // also fills column 0, which the border part removes again.
    std::vector<double> h(2 * m - 1, 0.0);
    for (std::size_t q = 0; q < h.size(); ++q) h[q] = (truncated && q + 1 > N) ? 0.0 : gl[q + 1];
    std::vector<BorderEntry> border;
    for (std::size_t j = 0; j < m; ++j)
        if (h[j] != 0.0) border.push_back({j, 0, -s * h[j]});
    parts.push_back({HankelPart{std::move(h)}, s, 0, m});

    if (rule == ExteriorRule::AntiReflective) {
        // 2 U_0 weight collected from every reflected exterior node.
        const auto tails = tail_sums(gl, N);
        for (std::size_t j = 0; j < m; ++j) {
            const double zr = truncated ? tails.ztrunc_or_zero(j + 1) : tails.z[j + 1];
            if (zr != 0.0) border.push_back({j, 0, zr});
        }
    }
    // The k = 0 term of the last row reaches U_{N+1} across the right wall.
    switch (rule) {
    case ExteriorRule::Even: border.push_back({N, N - 1, gl[0]}); break;
    case ExteriorRule::Odd: border.push_back({N, N - 1, -gl[0]}); break;
    case ExteriorRule::AntiReflective:
        border.push_back({N, N, 2.0 * gl[0]});
        border.push_back({N, N - 1, -gl[0]});
        break;
    case ExteriorRule::Zero: break;
    }
    parts.push_back({BorderPart{std::move(border)}, 1.0, 0, m});
    return parts;
}

inline StructuredOperator combine_left_right(std::size_t m, double beta, const std::vector<StructuredPart>& left) {
    StructuredOperator op(m, beta);
    const double wl = 0.5 * (1.0 + beta), wr = 0.5 * (1.0 - beta);
    for (const auto& p : left) {
        StructuredPart q = p;
        q.scale *= wl;
        op.add(std::move(q));
    }
    for (const auto& p : left) {
        StructuredPart q = flipped(p, m);
        q.scale *= wr;
        op.add(std::move(q));
    }
    return op;
}

inline void check_beta(double beta) {
    if (!(beta > -1.0 && beta < 1.0)) throw ConfigError("beta must lie in (-1,1)");
}

inline StructuredOperator assemble_with_rule(FractionalOrder alpha, double beta, std::size_t m, ExteriorRule rule,
                                             bool truncated = false) {
    check_beta(beta);
    if (m < (rule == ExteriorRule::Zero ? 2u : 3u)) throw ConfigError("matrix size too small for the boundary pattern");
    const std::size_t N = m - 1;
    const GLCoefficients gl(alpha, 2 * N + 2);
    return combine_left_right(m, beta, left_parts(gl, N, rule, truncated));
}

} // namespace detail

/// A_beta = (1+beta)/2 A_L + (1-beta)/2 A_R with zero exterior values.
inline StructuredOperator assemble_open(FractionalOrder alpha, double beta, std::size_t m) {
    return detail::assemble_with_rule(alpha, beta, m, detail::ExteriorRule::Zero);
}

inline StructuredOperator assemble_antisym(FractionalOrder alpha, double beta, std::size_t m) {
    return detail::assemble_with_rule(alpha, beta, m, detail::ExteriorRule::Odd);
}

inline StructuredOperator assemble_antirefl(FractionalOrder alpha, double beta, std::size_t m) {
    return detail::assemble_with_rule(alpha, beta, m, detail::ExteriorRule::AntiReflective);
}

/// Exterior values mirrored without change of sign.
inline StructuredOperator assemble_reflective(FractionalOrder alpha, double beta, std::size_t m) {
    return detail::assemble_with_rule(alpha, beta, m, detail::ExteriorRule::Even);
}

/// Zero exterior (same as the open-domain Toeplitz matrix). The truncated variant is
/// the pure tau matrix tau_m(t_0..t_{m-1}) left once both endpoints are eliminated.
inline StructuredOperator assemble_dirichlet(FractionalOrder alpha, double beta, std::size_t m,
                                             bool truncated = false) {
    if (!truncated) return assemble_open(alpha, beta, m);
    if (beta != 0.0) throw ConfigError("truncated schemes require beta = 0");
    if (m < 2) throw ConfigError("matrix size too small");
    const GLCoefficients gl(alpha, m + 1);
    StructuredOperator op(m, 0.0);
    op.add_tau(toeplitz_coefficients(gl, m - 1).t, 1.0);
    return op;
}

/// Bordered tau matrices: rows 0 and m-1 diagonal only, interior block tau(t),
/// first/last column carrying the folded exterior terms.
inline StructuredOperator assemble_truncated(BoundaryScheme scheme, FractionalOrder alpha, std::size_t m,
                                             double beta = 0.0) {
    if (!is_truncated(scheme)) throw ConfigError("assemble_truncated: scheme is not truncated");
    if (beta != 0.0) throw ConfigError("truncated schemes require beta = 0");
    if (m < 4) throw ConfigError("assemble_truncated: need m >= 4");
    const std::size_t N = m - 1;
    const bool ar = scheme == BoundaryScheme::AntiReflectiveTrunc;
    const GLCoefficients gl(alpha, 2 * N + 2);
    const auto tails = tail_sums(gl, N);

    StructuredOperator op(m, 0.0);
    op.add_tau(toeplitz_coefficients(gl, N - 2).t, 1.0, 1);

    // Entries of the doubled matrix; the part scale carries the 1/2.
    std::vector<BorderEntry> b;
    const double corner = 2.0 * gl[1] + (ar ? 2.0 * gl[0] + tails.ztrunc_or_zero(1) : 0.0);
    b.push_back({0, 0, corner});
    b.push_back({N, N, corner});
    for (std::size_t i = 1; i < N; ++i) {
        double first = gl[i + 1] + (i == 1 ? gl[0] : 0.0);
        if (ar) first += tails.ztrunc_or_zero(i + 1);
        b.push_back({i, 0, first});
        b.push_back({N - i, N, first});
    }
    op.add_border(std::move(b), 0.5);
    return op;
}

/// Dispatch on the scheme tag.
inline StructuredOperator assemble(BoundaryScheme scheme, FractionalOrder alpha, double beta, std::size_t m) {
    switch (scheme) {
    case BoundaryScheme::OpenToeplitz: return assemble_open(alpha, beta, m);
    case BoundaryScheme::Dirichlet: return assemble_dirichlet(alpha, beta, m);
    case BoundaryScheme::Reflective: return assemble_reflective(alpha, beta, m);
    case BoundaryScheme::AntiSymmetric: return assemble_antisym(alpha, beta, m);
    case BoundaryScheme::AntiReflective: return assemble_antirefl(alpha, beta, m);
    case BoundaryScheme::AntiSymmetricTrunc:
    case BoundaryScheme::AntiReflectiveTrunc: return assemble_truncated(scheme, alpha, m, beta);
    }
    throw ConfigError("assemble: unknown scheme");
}

/// Scheme matrix with every GL sum optionally cut at k <= N (the truncated
/// construction applied to any exterior rule, not only the tau-bordered ones).
inline StructuredOperator assemble(BoundaryScheme scheme, FractionalOrder alpha, double beta, std::size_t m,
                                   bool truncated) {
    if (!truncated || is_truncated(scheme)) return assemble(scheme, alpha, beta, m);
    if (beta != 0.0) throw ConfigError("truncated schemes require beta = 0");
    switch (scheme) {
    case BoundaryScheme::AntiSymmetric: return assemble_truncated(BoundaryScheme::AntiSymmetricTrunc, alpha, m);
    case BoundaryScheme::AntiReflective: return assemble_truncated(BoundaryScheme::AntiReflectiveTrunc, alpha, m);
    case BoundaryScheme::Reflective:
        return detail::assemble_with_rule(alpha, 0.0, m, detail::ExteriorRule::Even, true);
    default: return detail::assemble_with_rule(alpha, 0.0, m, detail::ExteriorRule::Zero, true);
    }
}

/// Symmetric Toeplitz part T_0 = (T_L + T_R)/2 of size m.
inline StructuredOperator assemble_T0(FractionalOrder alpha, std::size_t m) { return assemble_open(alpha, 0.0, m); }

} // namespace fracbc
