#pragma once

// Independent reference constructions used by the unit and acceptance tests.
// Nothing here goes through the structured parts of the library.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;

enum class Ext { Zero, Even, Odd, AntiR };

/// g_k = (-1)^k binom(alpha, k) in long double via the product formula.
inline std::vector<long double> gl(double alpha, std::size_t K) {
    std::vector<long double> g(K + 1);
    long double c = 1.0L;
    for (std::size_t k = 0; k <= K; ++k) {
        g[k] = (k % 2 ? -c : c);
        c *= (static_cast<long double>(alpha) - static_cast<long double>(k)) / static_cast<long double>(k + 1);
    }
    return g;
}

/// Adds w * u_i to a row, where u_i for i outside 0..N is rebuilt from the
/// physical nodes by the exterior rule at the nearer wall.
inline void add_node(std::vector<long double>& row, long i, long N, Ext e, long double w) {
    if (i >= 0 && i <= N) {
        row[static_cast<std::size_t>(i)] += w;
        return;
    }
    const long wall = i < 0 ? 0 : N;
    const long r = 2 * wall - i;
    if (r < 0 || r > N) return;
    switch (e) {
    case Ext::Zero: return;
    case Ext::Even: row[static_cast<std::size_t>(r)] += w; return;
    case Ext::Odd: row[static_cast<std::size_t>(r)] -= w; return;
    case Ext::AntiR:
        row[static_cast<std::size_t>(wall)] += 2 * w;
        row[static_cast<std::size_t>(r)] -= w;
        return;
    }
}

/// Shifted GL sums of the left and right operators on m = N+1 nodes,
/// A = (1+beta)/2 A_L + (1-beta)/2 A_R. The untruncated left sum of row j runs
/// to k = N+j+1 and the right sum to 2N-j+1; truncated sums stop at k = N.
inline Matrix scheme_matrix(double alpha, double beta, std::size_t m, Ext e, bool truncated) {
    const long N = static_cast<long>(m) - 1;
    const auto g = gl(alpha, static_cast<std::size_t>(2 * N + 2));
    Matrix A = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (long j = 0; j <= N; ++j) {
        std::vector<long double> L(m, 0.0L), R(m, 0.0L);
        const long kl = truncated ? N : N + j + 1;
        const long kr = truncated ? N : 2 * N - j + 1;
        for (long k = 0; k <= kl; ++k) add_node(L, j - k + 1, N, e, g[static_cast<std::size_t>(k)]);
        for (long k = 0; k <= kr; ++k) add_node(R, j + k - 1, N, e, g[static_cast<std::size_t>(k)]);
        for (std::size_t c = 0; c < m; ++c)
            A(j, static_cast<Eigen::Index>(c)) =
                static_cast<double>(0.5L * (1 + beta) * L[c] + 0.5L * (1 - beta) * R[c]);
    }
    return A;
}

/// Bordered tau matrices of the truncated schemes, written entry by entry:
/// 2A has corners 2g_1 (+ 2g_0 + zt_1), first column entries g_{i+1} + [i=1] g_0
/// (+ zt_{i+1}), the mirrored last column, and the interior block
/// 2 tau_{N-1}(t_0..t_{N-2}). zt_r = 2 sum_{k=r+1}^{N} g_k, zero for r >= N.
inline Matrix truncated_bordered(double alpha, std::size_t m, bool antireflective);

/// Dense symmetric Toeplitz matrix with first column t.
inline Matrix toeplitz(const std::vector<double>& t, std::size_t m) {
    Matrix T = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t d = i > j ? i - j : j - i;
            T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d < t.size() ? t[d] : 0.0;
        }
    return T;
}

/// tau(t) = T(t) - H(t), H Hankel with H_{ij} = t_{i+j+2} (0-based).
inline Matrix tau_matrix(const std::vector<double>& t, std::size_t m) {
    Matrix T = toeplitz(t, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t d = i + j + 2;
            if (d < t.size()) T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= t[d];
            const std::size_t e = 2 * m - i - j;
            if (e < t.size()) T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= t[e];
        }
    return T;
}

/// Orthonormal DST-I matrix S_{ij} = sqrt(2/(n+1)) sin((i+1)(j+1) pi/(n+1)).
inline Matrix dst_matrix(std::size_t n) {
    Matrix S(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const long double s = std::sqrt(2.0L / static_cast<long double>(n + 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(
                s * std::sin(static_cast<long double>((i + 1) * (j + 1)) * std::numbers::pi_v<long double> /
                             static_cast<long double>(n + 1)));
    return S;
}

inline Matrix truncated_bordered(double alpha, std::size_t m, bool antireflective) {
    const std::size_t N = m - 1;
    const auto g = gl(alpha, N + 2);
    auto zt = [&](std::size_t r) {
        long double s = 0;
        for (std::size_t k = r + 1; k <= N; ++k) s += g[k];
        return r >= N ? 0.0L : 2 * s;
    };
    std::vector<double> t(N - 1);
    t[0] = static_cast<double>(g[1]);
    if (t.size() > 1) t[1] = static_cast<double>((g[0] + g[2]) / 2);
    for (std::size_t i = 2; i < t.size(); ++i) t[i] = static_cast<double>(g[i + 1] / 2);
    Matrix A = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    A.block(1, 1, static_cast<Eigen::Index>(N - 1), static_cast<Eigen::Index>(N - 1)) = tau_matrix(t, N - 1);
    const long double corner = 2 * g[1] + (antireflective ? 2 * g[0] + zt(1) : 0.0L);
    A(0, 0) = static_cast<double>(corner / 2);
    A(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N)) = A(0, 0);
    for (std::size_t i = 1; i < N; ++i) {
        long double v = g[i + 1] + (i == 1 ? g[0] : 0.0L);
        if (antireflective) v += zt(i + 1);
        A(static_cast<Eigen::Index>(i), 0) = static_cast<double>(v / 2);
        A(static_cast<Eigen::Index>(N - i), static_cast<Eigen::Index>(N)) = static_cast<double>(v / 2);
    }
    return A;
}

inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<long double> acc = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const long double a = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((j * k) % n) /
                                  static_cast<long double>(n);
            acc += std::complex<long double>(x[j].real(), x[j].imag()) * std::polar(1.0L, a);
        }
        y[k] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
    }
    return y;
}

/// Frobenius projection onto span{B_k}: solves the normal equations of
/// min || sum c_k B_k - T ||_F by dense least squares on vectorized bases.
inline Eigen::VectorXd frobenius_coefficients(const std::vector<Matrix>& basis, const Matrix& T) {
    const Eigen::Index n2 = T.size();
    Matrix M(n2, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k)
        M.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(basis[k].data(), n2);
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(T.data(), n2);
    return M.colPivHouseholderQr().solve(rhs);
}

/// Basis of symmetric circulants is not assumed; all m cyclic shifts are used.
inline std::vector<Matrix> circulant_basis(std::size_t m) {
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < m; ++k) {
        Matrix P = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) P(static_cast<Eigen::Index>((i + k) % m), static_cast<Eigen::Index>(i)) = 1.0;
        out.push_back(std::move(P));
    }
    return out;
}

/// tau algebra basis S diag(e_k) S.
inline std::vector<Matrix> tau_basis(std::size_t m) {
    const Matrix S = dst_matrix(m);
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < m; ++k) out.push_back(S.col(static_cast<Eigen::Index>(k)) * S.col(static_cast<Eigen::Index>(k)).transpose());
    return out;
}

inline std::vector<double> random_vector(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937 g(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace oracle
