#pragma once

// Complex FFT of arbitrary length: iterative radix-2 for powers of two,
// Bluestein chirp-z on top of it for everything else. Forward transform is
// unnormalized, X_k = sum_j x_j exp(-2 pi i jk/n); the inverse carries 1/n.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace fracbc {

using cplx = std::complex<double>;

namespace detail {

/// Plain complex product; std::complex operator* carries inf/nan recovery
/// that blocks vectorization.
inline cplx cmul(cplx a, cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Radix-2 kernel with precomputed twiddles and bit reversal.
class Radix2 {
public:
    explicit Radix2(std::size_t n) : n_(n), rev_(n), tw_(n / 2) {
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            rev_[i] = r;
        }
        for (std::size_t k = 0; k < n / 2; ++k)
            tw_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }

    std::size_t size() const noexcept { return n_; }

    /// In place; inverse=true uses conjugate twiddles without scaling.
    void run(std::span<cplx> a, bool inverse) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t step = n_ / len;
            for (std::size_t i = 0; i < n_; i += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    const cplx w = inverse ? std::conj(tw_[j * step]) : tw_[j * step];
                    const cplx u = a[i + j];
                    const cplx v = cmul(a[i + j + half], w);
                    a[i + j] = u + v;
                    a[i + j + half] = u - v;
                }
            }
        }
    }

private:
    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<cplx> tw_;
};

} // namespace detail

/// Reusable transform of a fixed length. Immutable after construction, so
/// forward/inverse may run concurrently from several threads.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (n == 0) return;
        if (detail::is_pow2(n)) {
            kernel_ = std::make_shared<detail::Radix2>(n);
            return;
        }
        const std::size_t L = detail::next_pow2(2 * n - 1);
        kernel_ = std::make_shared<detail::Radix2>(L);
        chirp_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            // k^2 mod 2n keeps the angle argument small for large k.
            const auto kk = static_cast<double>((k * k) % (2 * n));
            chirp_[k] = std::polar(1.0, -std::numbers::pi * kk / static_cast<double>(n));
        }
        chirp_hat_.assign(L, cplx{});
        chirp_hat_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n; ++k) chirp_hat_[k] = chirp_hat_[L - k] = std::conj(chirp_[k]);
        kernel_->run(chirp_hat_, false);
    }

    std::size_t size() const noexcept { return n_; }

    std::vector<cplx> forward(std::span<const cplx> x) const { return transform(x, false); }

    std::vector<cplx> inverse(std::span<const cplx> x) const {
        auto y = transform(x, true);
        const double s = 1.0 / static_cast<double>(n_);
        for (auto& v : y) v *= s;
        return y;
    }

private:
    std::vector<cplx> transform(std::span<const cplx> x, bool inv) const {
        std::vector<cplx> y(x.begin(), x.end());
        if (n_ <= 1) return y;
        if (chirp_.empty()) {
            kernel_->run(y, inv);
            return y;
        }
        // Inverse DFT = conj(DFT(conj(x))).
        const std::size_t L = kernel_->size();
        std::vector<cplx> a(L, cplx{});
        for (std::size_t k = 0; k < n_; ++k) a[k] = detail::cmul(inv ? std::conj(y[k]) : y[k], chirp_[k]);
        kernel_->run(a, false);
        for (std::size_t k = 0; k < L; ++k) a[k] = detail::cmul(a[k], chirp_hat_[k]);
        kernel_->run(a, true);
        const double s = 1.0 / static_cast<double>(L);
        for (std::size_t k = 0; k < n_; ++k) {
            const cplx v = detail::cmul(a[k] * s, chirp_[k]);
            y[k] = inv ? std::conj(v) : v;
        }
        return y;
    }

    std::size_t n_;
    std::shared_ptr<const detail::Radix2> kernel_;
    std::vector<cplx> chirp_;
    std::vector<cplx> chirp_hat_;
};

inline std::vector<cplx> fft(std::span<const cplx> x) { return FftPlan(x.size()).forward(x); }
inline std::vector<cplx> ifft(std::span<const cplx> x) { return FftPlan(x.size()).inverse(x); }

} // namespace fracbc
