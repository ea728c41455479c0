#pragma once

// Sine transform of type I, tau-algebra and circulant spectra, and the
// O(n log n) solves built on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracbc/error.hpp"
#include "fracbc/fft.hpp"
#include "fracbc/glkernel.hpp"

namespace fracbc {

/// Orthogonal symmetric DST-I: S_jk = sqrt(2/(n+1)) sin(jk pi/(n+1)), so S*S = I.
class Dst1Plan {
public:
    explicit Dst1Plan(std::size_t n) : n_(n), fft_(2 * (n + 1)), scale_(std::sqrt(2.0 / static_cast<double>(n + 1))) {
        if (n == 0) throw ConfigError("Dst1Plan: length must be >= 1");
    }

    std::size_t size() const noexcept { return n_; }

    std::vector<double> operator()(std::span<const double> v) const {
        if (v.size() != n_)
            throw ConfigError("dst1: plan length " + std::to_string(n_) + " but input length " + std::to_string(v.size()));
        // Odd extension [0, v, 0, -reverse(v)]; its DFT is -2i * (sine sum).
        const std::size_t L = 2 * (n_ + 1);
        std::vector<cplx> x(L, cplx{});
        for (std::size_t k = 0; k < n_; ++k) {
            x[k + 1] = v[k];
            x[L - 1 - k] = -v[k];
        }
        const auto X = fft_.forward(x);
        std::vector<double> y(n_);
        for (std::size_t j = 0; j < n_; ++j) y[j] = -0.5 * scale_ * X[j + 1].imag();
        return y;
    }

private:
    std::size_t n_;
    FftPlan fft_;
    double scale_;
};

inline std::vector<double> dst1(std::span<const double> v, const Dst1Plan& plan) { return plan(v); }
inline std::vector<double> dst1(std::span<const double> v) { return Dst1Plan(v.size())(v); }

namespace detail {

/// C_j = sum_d a_d cos(j d pi/(m+1)), S_j = sum_d a_d sin(j d pi/(m+1)) for j = 1..m,
/// with a_d given for d = 0..a.size()-1 (a.size() <= 2(m+1)). One FFT.
inline void trig_sums(std::span<const double> a, std::size_t m, std::vector<double>& C, std::vector<double>& S) {
    const std::size_t L = 2 * (m + 1);
    std::vector<cplx> x(L, cplx{});
    for (std::size_t d = 0; d < a.size() && d < L; ++d) x[d] = a[d];
    const auto X = FftPlan(L).forward(x);
    C.resize(m);
    S.resize(m);
    for (std::size_t j = 1; j <= m; ++j) {
        C[j - 1] = X[j].real();
        S[j - 1] = -X[j].imag();
    }
}

inline void check_spectrum(std::span<const double> lam, const char* what) {
    double mx = 0.0;
    for (double l : lam) mx = std::max(mx, std::abs(l));
    for (std::size_t j = 0; j < lam.size(); ++j)
        if (!(std::abs(lam[j]) > 1e-14 * mx))
            throw NumericalError(std::string(what) + ": near-singular spectrum at index " + std::to_string(j));
}

} // namespace detail

/// Eigenvalues of a circulant matrix (FFT of its first column).
struct CirculantSpectrum {
    std::vector<cplx> eigenvalues;

    std::size_t size() const noexcept { return eigenvalues.size(); }

    static CirculantSpectrum from_first_column(std::span<const double> c) {
        std::vector<cplx> x(c.begin(), c.end());
        return {fft(x)};
    }
};

/// Eigenvalues lambda_j = t_0 + 2 sum_k t_k cos(j k pi/(m+1)) of tau_m(t), j = 1..m.
struct TauSpectrum {
    std::vector<double> eigenvalues;

    std::size_t size() const noexcept { return eigenvalues.size(); }
};

/// Coefficients beyond t.size() are taken as zero; coefficients past t_{m-1} are ignored.
inline TauSpectrum tau_eigenvalues(const ToeplitzCoefficients& t, std::size_t m) {
    std::vector<double> a(std::min(t.size(), m), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = (k == 0 ? 1.0 : 2.0) * t[k];
    std::vector<double> C, S;
    detail::trig_sums(a, m, C, S);
    return {std::move(C)};
}

/// x = IFFT(FFT(b) / spectrum).
inline std::vector<double> circulant_solve(const CirculantSpectrum& spec, std::span<const double> b,
                                           const FftPlan* plan = nullptr) {
    const std::size_t m = spec.size();
    if (b.size() != m) throw ConfigError("circulant_solve: size mismatch");
    double mx = 0.0;
    for (const auto& l : spec.eigenvalues) mx = std::max(mx, std::abs(l));
    std::optional<FftPlan> local;
    if (!plan) local.emplace(m);
    const FftPlan& p = plan ? *plan : *local;
    std::vector<cplx> x(b.begin(), b.end());
    auto X = p.forward(x);
    for (std::size_t j = 0; j < m; ++j) {
        if (!(std::abs(spec.eigenvalues[j]) > 1e-14 * mx))
            throw NumericalError("circulant_solve: near-singular spectrum at index " + std::to_string(j));
        X[j] /= spec.eigenvalues[j];
    }
    const auto y = p.inverse(X);
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = y[j].real();
    return out;
}

/// x = S diag(1/lambda) S b.
inline std::vector<double> tau_solve(const TauSpectrum& spec, std::span<const double> b, const Dst1Plan* plan = nullptr) {
    const std::size_t m = spec.size();
    if (b.size() != m) throw ConfigError("tau_solve: size mismatch");
    detail::check_spectrum(spec.eigenvalues, "tau_solve");
    std::optional<Dst1Plan> local;
    if (!plan) local.emplace(m);
    const Dst1Plan& p = plan ? *plan : *local;
    auto y = p(b);
    for (std::size_t j = 0; j < m; ++j) y[j] /= spec.eigenvalues[j];
    return p(y);
}

inline std::vector<double> tau_solve(const ToeplitzCoefficients& t, std::size_t m, std::span<const double> b) {
    return tau_solve(tau_eigenvalues(t, m), b);
}

/// y = tau_m(t) v through the sine transform.
inline std::vector<double> tau_apply(const TauSpectrum& spec, std::span<const double> v, const Dst1Plan& plan) {
    auto y = plan(v);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] *= spec.eigenvalues[j];
    return plan(y);
}

} // namespace fracbc
