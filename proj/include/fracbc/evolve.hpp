#pragma once

// Theta-method time stepping of u_t = D u + S under a boundary scheme.
//
// The state is always the full nodal vector U_0..U_N. With endpoint
// elimination the unknowns are U_1..U_{N-1} and the endpoints stay at the
// homogeneous physical value; with pinning the full system is solved and the
// endpoints are reset afterwards.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracbc/error.hpp"
#include "fracbc/glkernel.hpp"
#include "fracbc/krylov.hpp"
#include "fracbc/precond.hpp"
#include "fracbc/structure.hpp"

namespace fracbc {

struct GridSpec {
    double a = 0.0;
    double b = 2.0;
    std::size_t N = 1000;
    double dt = 2e-3;
    double t_end = 2.0;

    double dx() const { return (b - a) / static_cast<double>(N); }
    std::size_t nodes() const { return N + 1; }
    double x(std::size_t j) const { return a + static_cast<double>(j) * dx(); }

    void validate() const {
        if (N < 3) throw ConfigError("grid: N must be >= 3");
        if (!(b > a)) throw ConfigError("grid: need b > a");
        if (!(dt > 0.0)) throw ConfigError("grid: dt must be positive");
        if (!(t_end >= 0.0)) throw ConfigError("grid: t_end must be nonnegative");
    }
};

struct ThetaScheme {
    double theta = 1.0;

    static ThetaScheme explicit_euler() { return {0.0}; }
    static ThetaScheme implicit_euler() { return {1.0}; }
    static ThetaScheme crank_nicolson() { return {0.5}; }

    void validate() const {
        if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0,1]");
    }
};

enum class EndpointMode { Eliminate, Pin, Free };
enum class SourceTiming { Averaged, Implicit };
enum class StepSolver { Auto, Gmres, Direct, DenseLU };

struct StepOptions {
    double beta = 0.0;
    double k_coef = 1.0;
    bool truncated = false;
    EndpointMode endpoints = EndpointMode::Eliminate;
    SourceTiming source_timing = SourceTiming::Averaged;
    StepSolver solver = StepSolver::Auto;
    PrecondKind precond = PrecondKind::NaturalTau;
    GmresConfig gmres{1e-12, 0, PrecondSide::Left, ResidualNorm::Preconditioned, false, 1e-8};
    std::size_t dense_limit = 2048;
};

using SourceFn = std::function<double(double x, double t)>;
using ExactFn = std::function<double(double x, double t)>;

class StepSystem {
public:
    StepSystem(StructuredOperator A, double mu, double theta, GridSpec grid, StepOptions opts, SourceFn source,
               FractionalOrder alpha)
        : grid_(grid), opts_(opts), mu_(mu), theta_(theta), source_(std::move(source)), full_(std::move(A)),
          alpha_(alpha) {
        grid_.validate();
        ThetaScheme{theta}.validate();
        if (full_.size() != grid_.nodes()) throw ConfigError("StepSystem: operator size does not match the grid");
        lo_ = opts_.endpoints == EndpointMode::Eliminate ? 1 : 0;
        active_ = std::make_shared<StructuredOperator>(lo_ ? full_.interior() : full_);
        lhs_ = std::make_shared<StructuredOperator>(active_->lifted(1.0, mu_ * theta_));
        rhs_ = std::make_shared<StructuredOperator>(active_->lifted(1.0, -mu_ * (1.0 - theta_)));
        choose_solver();
    }


    std::size_t size() const noexcept { return active_->size(); }
    double mu() const noexcept { return mu_; }
    double theta() const noexcept { return theta_; }
    const GridSpec& grid() const noexcept { return grid_; }
    const StructuredOperator& operator_matrix() const noexcept { return *active_; }
    /// I - mu*theta*A on the active unknowns.
    const StructuredOperator& lhs() const noexcept { return *lhs_; }
    /// I + mu*(1-theta)*A on the active unknowns.
    const StructuredOperator& rhs_map() const noexcept { return *rhs_; }
    StepSolver solver() const noexcept { return solver_; }
    std::size_t last_iterations() const noexcept { return last_iterations_; }

    /// U_{n+1} from U_n (full nodal vectors) at time t_n.
    std::vector<double> step(std::span<const double> U, double t_n) const {
        if (U.size() != grid_.nodes()) throw ConfigError("step: state length does not match the grid");
        const std::size_t n = size();
        std::vector<double> u(U.begin() + static_cast<std::ptrdiff_t>(lo_),
                              U.begin() + static_cast<std::ptrdiff_t>(lo_ + n));
        auto rhs = theta_ == 1.0 ? u : rhs_->apply(u);
        if (source_) {
            const double t1 = t_n + grid_.dt;
            const double w1 = opts_.source_timing == SourceTiming::Implicit ? 1.0 : theta_;
            for (std::size_t i = 0; i < n; ++i) {
                const double x = grid_.x(i + lo_);
                double s = w1 * source_(x, t1);
                if (w1 != 1.0) s += (1.0 - w1) * source_(x, t_n);
                rhs[i] += grid_.dt * s;
            }
        }
        const auto v = solve(rhs);
        std::vector<double> out(U.begin(), U.end());
        if (lo_) out.front() = out.back() = 0.0;
        std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(lo_));
        if (opts_.endpoints == EndpointMode::Pin) out.front() = out.back() = 0.0;
        return out;
    }

private:
    void choose_solver() {
        solver_ = opts_.solver;
        if (theta_ == 0.0 || mu_ == 0.0) {
            solver_ = StepSolver::Direct;
            return;
        }
        const bool tau = is_pure_tau(*lhs_), bordered = is_bordered_tau(*lhs_);
        if (solver_ == StepSolver::Auto) {
            if (tau || bordered) solver_ = StepSolver::Direct;
            else if (size() <= opts_.dense_limit) solver_ = StepSolver::DenseLU;
            else solver_ = StepSolver::Gmres;
        }
        switch (solver_) {
        case StepSolver::Direct:
            if (tau) tau_ = pure_tau_spectrum(*lhs_);
            else if (bordered) bordered_ = std::make_shared<BorderedTauSystem>(*lhs_);
            else throw ConfigError("direct solver needs a tau or bordered tau step matrix");
            if (tau) dst_ = std::make_shared<Dst1Plan>(size());
            break;
        case StepSolver::DenseLU:
            lu_ = std::make_shared<Eigen::PartialPivLU<DenseMatrix>>(lhs_->materialize(std::max(opts_.dense_limit, size())));
            break;
        case StepSolver::Gmres: {
            const auto t = t0_coefficients(full_alpha(), size());
            precond_ = std::make_shared<Preconditioner>(
                make_preconditioner(opts_.precond, t, size()).lifted(1.0, mu_ * theta_));
            break;
        }
        case StepSolver::Auto: break;
        }
    }

    FractionalOrder full_alpha() const {
        if (!alpha_) throw ConfigError("StepSystem: GMRES preconditioning needs the fractional order");
        return *alpha_;
    }

    std::vector<double> solve(const std::vector<double>& rhs) const {
        if (theta_ == 0.0 || mu_ == 0.0) return rhs;
        switch (solver_) {
        case StepSolver::Direct:
            if (bordered_) return bordered_->solve(rhs);
            return tau_solve(*tau_, rhs, dst_.get());
        case StepSolver::DenseLU: {
            const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
            const Eigen::VectorXd x = lu_->solve(b);
            return {x.data(), x.data() + x.size()};
        }
        case StepSolver::Gmres: {
            auto rep = gmres(*lhs_, rhs, precond_.get(), opts_.gmres);
            last_iterations_ = rep.iterations;
            if (!rep.converged) throw NumericalError("step: GMRES did not converge");
            return std::move(rep.solution);
        }
        case StepSolver::Auto: break;
        }
        throw ConfigError("step: no solver selected");
    }

    GridSpec grid_;
    StepOptions opts_;
    double mu_;
    double theta_;
    SourceFn source_;
    StructuredOperator full_;
    std::optional<FractionalOrder> alpha_;
    std::size_t lo_ = 0;
    std::shared_ptr<const StructuredOperator> active_, lhs_, rhs_;
    StepSolver solver_ = StepSolver::Auto;
    std::optional<TauSpectrum> tau_;
    std::shared_ptr<const Dst1Plan> dst_;
    std::shared_ptr<const BorderedTauSystem> bordered_;
    std::shared_ptr<const Eigen::PartialPivLU<DenseMatrix>> lu_;
    std::shared_ptr<const Preconditioner> precond_;
    mutable std::size_t last_iterations_ = 0;
};

/// mu = k_coef * dt / dx^alpha; lhs = I - mu*theta*A, rhs = I + mu*(1-theta)*A.
inline StepSystem build_step_system(BoundaryScheme scheme, ThetaScheme theta, const GridSpec& grid,
                                    FractionalOrder alpha, const StepOptions& opts, SourceFn source = {}) {
    grid.validate();
    theta.validate();
    if ((opts.truncated || is_truncated(scheme)) && opts.beta != 0.0)
        throw ConfigError("truncated schemes require beta = 0");
    const auto sc = ScalingConstants::from_grid(alpha, opts.k_coef, grid.dt, grid.dx());
    auto A = assemble(scheme, alpha, opts.beta, grid.nodes(), opts.truncated);
    return StepSystem(std::move(A), sc.mu, theta.theta, grid, opts, std::move(source), alpha);
}

struct Snapshot {
    double t = 0.0;
    std::size_t step = 0;
    std::vector<double> U;
    std::vector<double> exact; // empty without a registered exact solution
    double max_error = 0.0;
};

struct SolutionHistory {
    std::vector<double> x;
    std::vector<Snapshot> snapshots;
};

/// Steps from t = 0 to t_end, recording the requested times (each must be a
/// multiple of dt within 1e-12 relative).
inline SolutionHistory evolve(const StepSystem& sys, std::span<const double> U0, double t_end,
                              std::span<const double> snapshot_times = {}, ExactFn exact = {}) {
    const auto& g = sys.grid();
    auto to_step = [&](double t) {
        const double q = t / g.dt;
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-12 * std::max(1.0, std::abs(q)))
            throw ConfigError("evolve: time " + std::to_string(t) + " is not a multiple of dt");
        return static_cast<std::size_t>(r);
    };
    const std::size_t nsteps = to_step(t_end);
    std::vector<std::size_t> marks;
    for (double t : snapshot_times) {
        const auto s = to_step(t);
        if (s > nsteps) throw ConfigError("evolve: snapshot time beyond t_end");
        marks.push_back(s);
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    SolutionHistory hist;
    for (std::size_t j = 0; j < g.nodes(); ++j) hist.x.push_back(g.x(j));
    auto record = [&](std::size_t s, const std::vector<double>& U) {
        Snapshot snap;
        snap.step = s;
        snap.t = static_cast<double>(s) * g.dt;
        snap.U = U;
        if (exact) {
            snap.exact.resize(U.size());
            for (std::size_t j = 0; j < U.size(); ++j) {
                snap.exact[j] = exact(hist.x[j], snap.t);
                snap.max_error = std::max(snap.max_error, std::abs(U[j] - snap.exact[j]));
            }
        }
        hist.snapshots.push_back(std::move(snap));
    };

    std::vector<double> U(U0.begin(), U0.end());
    auto next = marks.begin();
    if (next != marks.end() && *next == 0) {
        record(0, U);
        ++next;
    }
    for (std::size_t s = 1; s <= nsteps; ++s) {
        U = sys.step(U, static_cast<double>(s - 1) * g.dt);
        if (next != marks.end() && *next == s) {
            record(s, U);
            ++next;
        }
    }
    if (marks.empty()) record(nsteps, U);
    return hist;
}

} // namespace fracbc
