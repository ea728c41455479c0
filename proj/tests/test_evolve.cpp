#include <gtest/gtest.h>

#include "fracbc/evolve.hpp"
#include "fracbc/problem.hpp"
#include "oracles.hpp"

using namespace fracbc;

namespace {

std::vector<double> initial(const GridSpec& g) {
    std::vector<double> U(g.nodes());
    for (std::size_t j = 0; j < U.size(); ++j) U[j] = TestProblem::initial(g.x(j));
    return U;
}

double first_step_error(BoundaryScheme s, double alpha, double theta, bool truncated) {
    GridSpec g;
    g.t_end = g.dt;
    StepOptions so;
    so.k_coef = 0.5;
    so.truncated = truncated;
    const FractionalOrder a(alpha);
    const auto sys = build_step_system(s, ThetaScheme{theta}, g, a, so, SourceTerm(a));
    const std::vector<double> times{g.dt};
    const auto h = evolve(sys, initial(g), g.dt, times, TestProblem::exact);
    return h.snapshots.at(0).max_error;
}

} // namespace

TEST(Evolve, ExplicitStepIsForwardEuler) {
    GridSpec g;
    g.N = 20;
    g.dt = 1e-3;
    g.t_end = 1e-3;
    StepOptions so;
    const FractionalOrder a(1.5);
    const auto sys = build_step_system(BoundaryScheme::AntiReflective, ThetaScheme::explicit_euler(), g, a, so);
    const auto U0 = initial(g);
    const auto U1 = sys.step(U0, 0.0);
    const std::vector<double> u(U0.begin() + 1, U0.end() - 1);
    const auto Au = sys.operator_matrix().apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(U1[i + 1], u[i] + sys.mu() * Au[i], 1e-14);
    EXPECT_EQ(U1.front(), 0.0);
    EXPECT_EQ(U1.back(), 0.0);
}

TEST(Evolve, ZeroStateStaysZeroWithoutSource) {
    GridSpec g;
    g.N = 64;
    g.dt = 0.01;
    g.t_end = 0.1;
    for (auto s : {BoundaryScheme::Dirichlet, BoundaryScheme::Reflective, BoundaryScheme::AntiSymmetric,
                   BoundaryScheme::AntiReflective}) {
        const auto sys = build_step_system(s, ThetaScheme::crank_nicolson(), g, FractionalOrder(1.3), StepOptions{});
        const auto h = evolve(sys, std::vector<double>(g.nodes(), 0.0), g.t_end);
        for (double v : h.snapshots.back().U) EXPECT_EQ(v, 0.0);
    }
}

TEST(Evolve, ImplicitEulerDamps) {
    GridSpec g;
    g.N = 100;
    g.dt = 0.05;
    g.t_end = 1.0;
    const auto sys =
        build_step_system(BoundaryScheme::Dirichlet, ThetaScheme::implicit_euler(), g, FractionalOrder(1.5), StepOptions{});
    const auto U0 = initial(g);
    const std::vector<double> times{0.05, 0.5, 1.0};
    const auto h = evolve(sys, U0, g.t_end, times);
    auto maxabs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    double prev = maxabs(U0);
    for (const auto& s : h.snapshots) {
        const double cur = maxabs(s.U);
        EXPECT_LT(cur, prev);
        prev = cur;
    }
}

TEST(Evolve, SolversAgree) {
    GridSpec g;
    g.N = 200;
    g.dt = 0.01;
    g.t_end = 0.05;
    const FractionalOrder a(1.7);
    const auto U0 = initial(g);
    std::vector<std::vector<double>> results;
    for (auto solver : {StepSolver::DenseLU, StepSolver::Gmres}) {
        StepOptions so;
        so.solver = solver;
        const auto sys = build_step_system(BoundaryScheme::AntiReflective, ThetaScheme::crank_nicolson(), g, a, so,
                                           SourceTerm(a));
        results.push_back(evolve(sys, U0, g.t_end).snapshots.back().U);
    }
    for (std::size_t j = 0; j < U0.size(); ++j) EXPECT_NEAR(results[0][j], results[1][j], 1e-9);
}

TEST(Evolve, CrankNicolsonStepMatchesDenseSolve) {
    GridSpec g;
    g.N = 50;
    g.dt = 0.02;
    g.t_end = 0.02;
    const FractionalOrder a(1.4);
    const auto sys =
        build_step_system(BoundaryScheme::Reflective, ThetaScheme::crank_nicolson(), g, a, StepOptions{}, SourceTerm(a));
    const auto U0 = initial(g);
    const auto U1 = sys.step(U0, 0.0);
    const oracle::Matrix A = sys.operator_matrix().materialize();
    const auto n = A.rows();
    const oracle::Matrix I = oracle::Matrix::Identity(n, n);
    const double mu = sys.mu();
    Eigen::VectorXd u(n), f(n);
    const SourceTerm src(a);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = g.x(static_cast<std::size_t>(i) + 1);
        u(i) = U0[static_cast<std::size_t>(i) + 1];
        f(i) = 0.5 * (src(x, 0.0) + src(x, g.dt));
    }
    const Eigen::VectorXd ref = (I - 0.5 * mu * A).partialPivLu().solve((I + 0.5 * mu * A) * u + g.dt * f);
    for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(U1[static_cast<std::size_t>(i) + 1], ref(i), 1e-12);
}

TEST(Evolve, FirstStepErrorReference) {
    // CN, anti-reflective, alpha = 1.2, t = 2e-3
    EXPECT_NEAR(first_step_error(BoundaryScheme::AntiReflective, 1.2, 0.5, false), 8.530704e-4, 0.05 * 8.530704e-4);
}

TEST(Evolve, AntiSymmetricMatchesAntiReflectiveAfterElimination) {
    for (bool tr : {false, true}) {
        const double a = first_step_error(BoundaryScheme::AntiSymmetric, 1.6, 1.0, tr);
        const double b = first_step_error(BoundaryScheme::AntiReflective, 1.6, 1.0, tr);
        EXPECT_NEAR(a, b, 1e-10) << "truncated=" << tr;
    }
}

TEST(Evolve, SnapshotTimesMustBeMultiplesOfDt) {
    GridSpec g;
    g.N = 10;
    g.dt = 0.1;
    g.t_end = 1.0;
    const auto sys =
        build_step_system(BoundaryScheme::Dirichlet, ThetaScheme::implicit_euler(), g, FractionalOrder(1.5), StepOptions{});
    const std::vector<double> bad{0.25};
    EXPECT_THROW(evolve(sys, initial(g), 1.0, bad), ConfigError);
    const std::vector<double> late{2.0};
    EXPECT_THROW(evolve(sys, initial(g), 1.0, late), ConfigError);
    const std::vector<double> ok{0.3, 0.0, 0.3};
    const auto h = evolve(sys, initial(g), 1.0, ok);
    ASSERT_EQ(h.snapshots.size(), 2u);
    EXPECT_EQ(h.snapshots[0].step, 0u);
    EXPECT_EQ(h.snapshots[1].step, 3u);
}

TEST(Evolve, InvalidConfigurationsThrow) {
    GridSpec g;
    g.N = 2;
    EXPECT_THROW(g.validate(), ConfigError);
    GridSpec ok;
    ok.N = 10;
    EXPECT_THROW(build_step_system(BoundaryScheme::Dirichlet, ThetaScheme{1.5}, ok, FractionalOrder(1.5), StepOptions{}),
                 ConfigError);
    StepOptions so;
    so.beta = 0.5;
    so.truncated = true;
    EXPECT_THROW(build_step_system(BoundaryScheme::Dirichlet, ThetaScheme{1.0}, ok, FractionalOrder(1.5), so),
                 ConfigError);
}

TEST(Source, SymmetricAndDecaying) {
    const SourceTerm s(FractionalOrder(1.5));
    for (double x : {0.1, 0.4, 0.77, 1.0}) EXPECT_NEAR(s(x, 0.3), s(2.0 - x, 0.3), 1e-12);
    EXPECT_NEAR(s(0.6, 1.0), std::exp(-1.0) * s.profile(0.6), 1e-15);
    EXPECT_THROW(s.profile(2.5), ConfigError);
    EXPECT_DOUBLE_EQ(source_term(FractionalOrder(1.5), 0.6, 0.2), s(0.6, 0.2));
}

TEST(Source, SecondOrderLimitIsClassicalDerivative) {
    // near alpha = 2 the term approaches u_t - u_xx
    const SourceTerm s(FractionalOrder(1.999999));
    for (double x : {0.3, 0.9, 1.5}) {
        const double y = 2.0 - x;
        const double uxx = 12.0 * x * x * std::pow(y, 4) - 32.0 * std::pow(x, 3) * std::pow(y, 3) +
                           12.0 * std::pow(x, 4) * y * y;
        EXPECT_NEAR(s.profile(x), -TestProblem::initial(x) - uxx, 1e-3);
    }
}
