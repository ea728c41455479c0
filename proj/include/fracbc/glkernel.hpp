#pragma once

// Grunwald-Letnikov kernel of a fractional derivative of order alpha in (1,2):
// coefficients, derived symmetric Toeplitz coefficients, tail sums and the
// generating function of the symmetric Toeplitz part.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fracbc/error.hpp"

namespace fracbc {

/// Fractional order, restricted to the open interval (1, 2).
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha) : alpha_(alpha) {
        if (!(alpha > 1.0 && alpha < 2.0))
            throw ConfigError("fractional order must lie in (1,2), got " + std::to_string(alpha));
    }

    double value() const noexcept { return alpha_; }
    operator double() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// g_0..g_K of the Grunwald-Letnikov expansion (1-z)^alpha = sum_k g_k z^k.
class GLCoefficients {
public:
    GLCoefficients(FractionalOrder alpha, std::size_t K) : alpha_(alpha) {
        if (K == 0) throw ConfigError("GL coefficient count K must be >= 1");
        g_.resize(K + 1);
        g_[0] = 1.0;
        const double a = alpha.value();
        for (std::size_t k = 0; k < K; ++k)
            g_[k + 1] = -((a - static_cast<double>(k)) / static_cast<double>(k + 1)) * g_[k];
    }

    FractionalOrder alpha() const noexcept { return alpha_; }
    std::size_t K() const noexcept { return g_.size() - 1; }
    std::size_t size() const noexcept { return g_.size(); }

    double operator[](std::size_t k) const noexcept { return g_[k]; }
    /// Zero beyond the stored range.
    double at_or_zero(std::ptrdiff_t k) const noexcept {
        return (k >= 0 && static_cast<std::size_t>(k) < g_.size()) ? g_[static_cast<std::size_t>(k)] : 0.0;
    }
    const std::vector<double>& values() const noexcept { return g_; }

private:
    FractionalOrder alpha_;
    std::vector<double> g_;
};

inline GLCoefficients gl_coefficients(FractionalOrder alpha, std::size_t K) { return {alpha, K}; }

/// Diagonals t_0..t_N of T_0 = (T_L + T_R)/2.
struct ToeplitzCoefficients {
    std::vector<double> t;

    std::size_t size() const noexcept { return t.size(); }
    double operator[](std::size_t i) const noexcept { return t[i]; }
};

/// t_0 = g_1, t_1 = (g_0 + g_2)/2, t_i = g_{i+1}/2.
inline ToeplitzCoefficients toeplitz_coefficients(const GLCoefficients& gl, std::size_t N) {
    if (gl.size() < N + 2 || N < 1)
        throw ConfigError("toeplitz_coefficients: need g_0..g_{N+1} and N >= 1");
    ToeplitzCoefficients out;
    out.t.resize(N + 1);
    out.t[0] = gl[1];
    out.t[1] = 0.5 * (gl[0] + gl[2]);
    for (std::size_t i = 2; i <= N; ++i) out.t[i] = 0.5 * gl[i + 1];
    return out;
}

/// Tail sums of the anti-reflective corrections, stored 1-based so that z[r] is z_r.
/// z[0] and ztrunc[0] are unused (zero).
struct TailSums {
    std::size_t N = 0;
    std::vector<double> z;      // z_r = 2 sum_{k=r+1}^{N+r} g_k,  r = 1..N+1
    std::vector<double> ztrunc; // z~_r = 2 sum_{k=r+1}^{N} g_k,  r = 1..N-1

    /// z~_r with z~_N = z~_{N+1} = 0, which is what the truncated column needs.
    double ztrunc_or_zero(std::size_t r) const noexcept { return r < ztrunc.size() ? ztrunc[r] : 0.0; }
};

inline TailSums tail_sums(const GLCoefficients& gl, std::size_t N) {
    if (N < 2) throw ConfigError("tail_sums: N must be >= 2");
    if (gl.size() < 2 * N + 2) throw ConfigError("tail_sums: need g_0..g_{2N+1}");
    TailSums out;
    out.N = N;

    // suffix[k] = sum_{j=k}^{2N+1} g_j, accumulated from the small end.
    std::vector<double> suffix(2 * N + 3, 0.0);
    for (std::size_t k = 2 * N + 2; k-- > 0;) suffix[k] = suffix[k + 1] + gl[k];
    out.z.assign(N + 2, 0.0);
    for (std::size_t r = 1; r <= N + 1; ++r) out.z[r] = 2.0 * (suffix[r + 1] - suffix[N + r + 1]);

    std::vector<double> head(N + 2, 0.0); // head[k] = sum_{j=k}^{N} g_j
    for (std::size_t k = N + 1; k-- > 0;) head[k] = head[k + 1] + gl[k];
    out.ztrunc.assign(N, 0.0);
    for (std::size_t r = 1; r + 1 <= N; ++r) out.ztrunc[r] = 2.0 * head[r + 1];
    return out;
}

/// f_{alpha,T0}(theta) = -Re( e^{-i theta} (1 - e^{i theta})^alpha ), principal branch.
/// Nonnegative on [-pi, pi] with a zero of order alpha at theta = 0.
inline double symbol_T0(FractionalOrder alpha, double theta) {
    if (theta == 0.0) return 0.0;
    const std::complex<double> z = std::polar(1.0, theta);
    const std::complex<double> f = std::conj(z) * std::pow(1.0 - z, alpha.value());
    return -f.real();
}

/// Gamma function for x > 0.
///
/// Lanczos approximation with g = 7 and the usual 9 coefficients; relative
/// error is around 1e-15 for the positive arguments used here. Arguments
/// below 1/2 go through the reflection formula.
inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw ConfigError("gamma_fn: argument must be positive");
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    constexpr double pi = std::numbers::pi;
    if (x < 0.5) return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    const double y = x - 1.0;
    double a = c[0];
    const double t = y + 7.5;
    for (std::size_t i = 1; i < c.size(); ++i) a += c[i] / (y + static_cast<double>(i));
    return std::sqrt(2.0 * pi) * std::pow(t, y + 0.5) * std::exp(-t) * a;
}

/// Scaling constants of the time-step matrices nu*I - mu*A.
struct ScalingConstants {
    double kappa_alpha = 0.0; // 1/cos(pi alpha/2), negative on (1,2)
    double mu = 0.0;          // k_coef * dt / dx^alpha
    double k_coef = 1.0;
    double nu = 1.0;

    static ScalingConstants from_grid(FractionalOrder alpha, double k_coef, double dt, double dx,
                                      double nu = 1.0) {
        if (!(dt > 0.0) || !(dx > 0.0)) throw ConfigError("ScalingConstants: dt and dx must be positive");
        ScalingConstants s;
        s.kappa_alpha = 1.0 / std::cos(std::numbers::pi * alpha.value() / 2.0);
        s.k_coef = k_coef;
        s.mu = k_coef * dt / std::pow(dx, alpha.value());
        s.nu = nu;
        return s;
    }
};

} // namespace fracbc
