#pragma once

// Test problem on (0,2) with homogeneous physical Dirichlet data and the
// exact solution u(x,t) = e^{-t} x^4 (2-x)^4.

#include <cmath>
#include <span>
#include <vector>

#include "fracbc/error.hpp"
#include "fracbc/glkernel.hpp"

namespace fracbc {

struct TestProblem {
    double a = 0.0;
    double b = 2.0;

    static double initial(double x) { return std::pow(x, 4) * std::pow(2.0 - x, 4); }
    static double exact(double x, double t) { return std::exp(-t) * initial(x); }
};

/// S(x,t) = u_t - D u on the exact solution, with D the symmetric fractional
/// derivative evaluated term by term on the polynomial. The Gamma ratios are
/// computed once per order.
class SourceTerm {
public:
    explicit SourceTerm(FractionalOrder alpha) : a_(alpha.value()) {
        static constexpr double binom4[] = {1, 4, 6, 4, 1};
        double sign = 1.0;
        for (int p = 0; p <= 4; ++p, sign = -sign)
            w_[p] = sign * std::pow(2.0, 4 - p) * binom4[p] * gamma_fn(p + 5.0) / gamma_fn(p + 5.0 - a_);
    }

    /// Spatial profile S(x,0).
    double profile(double x) const {
        if (!(x >= 0.0 && x <= 2.0)) throw ConfigError("source_term: x must lie in [0,2]");
        const double y = 2.0 - x;
        double sum = 0.0;
        for (int p = 0; p <= 4; ++p) {
            const double e = p + 4 - a_;
            sum += w_[p] * (std::pow(x, e) + std::pow(y, e));
        }
        return -TestProblem::initial(x) - 0.5 * sum;
    }

    double operator()(double x, double t) const { return std::exp(-t) * profile(x); }

private:
    double a_;
    double w_[5]{};
};

inline double source_term(FractionalOrder alpha, double x, double t) { return SourceTerm(alpha)(x, t); }

} // namespace fracbc
