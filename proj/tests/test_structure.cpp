#include <gtest/gtest.h>

#include "fracbc/structure.hpp"
#include "oracles.hpp"

using namespace fracbc;

namespace {

struct Case {
    BoundaryScheme scheme;
    oracle::Ext ext;
};

const Case full_cases[] = {
    {BoundaryScheme::OpenToeplitz, oracle::Ext::Zero},
    {BoundaryScheme::Dirichlet, oracle::Ext::Zero},
    {BoundaryScheme::Reflective, oracle::Ext::Even},
    {BoundaryScheme::AntiSymmetric, oracle::Ext::Odd},
    {BoundaryScheme::AntiReflective, oracle::Ext::AntiR},
};

const BoundaryScheme all_schemes[] = {
    BoundaryScheme::OpenToeplitz,  BoundaryScheme::Dirichlet,          BoundaryScheme::Reflective,
    BoundaryScheme::AntiSymmetric, BoundaryScheme::AntiReflective,     BoundaryScheme::AntiSymmetricTrunc,
    BoundaryScheme::AntiReflectiveTrunc,
};

double max_abs(const DenseMatrix& A) { return A.cwiseAbs().maxCoeff(); }

} // namespace

TEST(Assemble, OpenLeftOperatorByHand) {
    // beta near 1 isolates A_L; check against the 3x3 lower Hessenberg display
    const auto A = assemble_open(FractionalOrder(1.5), 0.0, 3).materialize();
    DenseMatrix L(3, 3);
    L << -1.5, 1, 0, 0.375, -1.5, 1, 0.0625, 0.375, -1.5;
    EXPECT_LT(max_abs(A - 0.5 * (L + L.transpose())), 1e-15);
    EXPECT_EQ(max_abs(A - A.transpose()), 0.0);
}

TEST(Assemble, MatchesShiftedSumsWithExteriorRules) {
    struct P {
        double alpha, beta;
        std::size_t m;
    };
    for (const auto p : {P{1.3, 0.4, 64}, P{1.7, 0.0, 48}, P{1.4, -0.3, 48}, P{1.5, 0.0, 33}}) {
        for (const auto& c : full_cases) {
            const auto A = assemble(c.scheme, FractionalOrder(p.alpha), p.beta, p.m).materialize();
            const auto B = oracle::scheme_matrix(p.alpha, p.beta, p.m, c.ext, false);
            EXPECT_LT(max_abs(A - B), 1e-14) << to_string(c.scheme) << " alpha=" << p.alpha << " m=" << p.m;
        }
    }
}

TEST(Assemble, TruncatedRuleSchemesMatchCutSums) {
    for (const auto& c : {full_cases[1], full_cases[2]}) {
        const auto A = assemble(c.scheme, FractionalOrder(1.6), 0.0, 32, true).materialize();
        const auto B = oracle::scheme_matrix(1.6, 0.0, 32, c.ext, true);
        EXPECT_LT(max_abs(A - B), 1e-14) << to_string(c.scheme);
    }
}

TEST(Assemble, TruncatedBorderedMatchEntrywiseFormulas) {
    for (bool ar : {false, true}) {
        for (std::size_t m : {4u, 5u, 32u, 77u}) {
            const auto s = ar ? BoundaryScheme::AntiReflectiveTrunc : BoundaryScheme::AntiSymmetricTrunc;
            const auto A = assemble_truncated(s, FractionalOrder(1.6), m).materialize();
            EXPECT_LT(max_abs(A - oracle::truncated_bordered(1.6, m, ar)), 1e-15) << ar << " " << m;
            // the bool overload routes the nontruncated tags to the same matrices
            const auto B = assemble(ar ? BoundaryScheme::AntiReflective : BoundaryScheme::AntiSymmetric,
                                    FractionalOrder(1.6), 0.0, m, true)
                               .materialize();
            EXPECT_EQ(max_abs(A - B), 0.0);
        }
    }
}

TEST(Assemble, AntisymmetricDisplayedEntries) {
    const std::size_t m = 20, N = m - 1;
    const FractionalOrder a(1.7);
    const GLCoefficients g(a, 2 * N + 2);
    const auto A = assemble_antisym(a, 0.0, m).materialize();
    EXPECT_NEAR(2 * A(0, 1), -g[2 * N], 1e-15);
    EXPECT_NEAR(2 * A(0, 0), 2 * g[1] - g[2 * N + 1], 1e-15);
    // A - A^T lives on the first and last rows and columns only
    const DenseMatrix D = A - A.transpose();
    for (std::size_t i = 1; i + 1 < m; ++i)
        for (std::size_t j = 1; j + 1 < m; ++j) ASSERT_LT(std::abs(D(i, j)), 1e-15) << i << "," << j;
}

TEST(Assemble, AntireflectiveDisplayedEntries) {
    const std::size_t m = 20, N = m - 1;
    const FractionalOrder a(1.4);
    const GLCoefficients g(a, 2 * N + 2);
    const auto z = tail_sums(g, N);
    const auto A = assemble_antirefl(a, 0.0, m).materialize();
    EXPECT_NEAR(2 * A(0, 0), 2 * g[1] - g[2 * N + 1] + 2 * g[0] + z.z[1], 1e-14);
    EXPECT_NEAR(2 * A(2, 0), g[3] - g[2 * N - 1] + z.z[3], 1e-14);
}

TEST(Assemble, TruncatedDisplayedRows) {
    const std::size_t m = 16, N = m - 1;
    const FractionalOrder a(1.5);
    const GLCoefficients g(a, 2 * N + 2);
    const auto z = tail_sums(g, N);
    const auto S = assemble_truncated(BoundaryScheme::AntiSymmetricTrunc, a, m).materialize();
    EXPECT_DOUBLE_EQ(S(0, 0), g[1]);
    EXPECT_DOUBLE_EQ(S(N, N), g[1]);
    for (std::size_t j = 1; j < m; ++j) EXPECT_EQ(S(0, j), 0.0);
    const auto R = assemble_truncated(BoundaryScheme::AntiReflectiveTrunc, a, m).materialize();
    EXPECT_NEAR(R(1, 0), (g[0] + g[2] + z.ztrunc[2]) / 2, 1e-15);
    EXPECT_NEAR(R(2, 0), (g[3] + z.ztrunc[3]) / 2, 1e-15);
    // interior block is exactly tau(t)
    const auto t = toeplitz_coefficients(g, N - 2);
    const DenseMatrix inner = S.block(1, 1, N - 1, N - 1);
    EXPECT_EQ(max_abs(inner - oracle::tau_matrix(t.t, N - 1)), 0.0);
}

TEST(Assemble, TruncatedDirichletIsTau) {
    const auto A = assemble_dirichlet(FractionalOrder(1.5), 0.0, 8, true).materialize();
    const auto t = toeplitz_coefficients(GLCoefficients(FractionalOrder(1.5), 9), 7);
    EXPECT_LT(max_abs(A - oracle::tau_matrix(t.t, 8)), 1e-15);
    EXPECT_LT(max_abs(assemble_dirichlet(FractionalOrder(1.5), 0.2, 16).materialize() -
                      assemble_open(FractionalOrder(1.5), 0.2, 16).materialize()),
              1e-300);
}

TEST(Assemble, ReflectiveRowSumsDominateOpen) {
    const FractionalOrder a(1.5);
    const auto R = assemble_reflective(a, 0.0, 32).materialize();
    const auto T = assemble_open(a, 0.0, 32).materialize();
    const Eigen::VectorXd d = R.rowwise().sum() - T.rowwise().sum();
    for (Eigen::Index i = 1; i + 1 < d.size(); ++i) EXPECT_GE(d(i), 0.0) << i;
}

TEST(Assemble, RejectsBadParameters) {
    EXPECT_THROW(assemble_antisym(FractionalOrder(1.5), 1.0, 10), ConfigError);
    EXPECT_THROW(assemble_antisym(FractionalOrder(1.5), 0.0, 2), ConfigError);
    EXPECT_THROW(assemble_truncated(BoundaryScheme::AntiSymmetricTrunc, FractionalOrder(1.5), 10, 0.5), ConfigError);
    EXPECT_THROW(assemble_truncated(BoundaryScheme::AntiSymmetric, FractionalOrder(1.5), 10), ConfigError);
    EXPECT_THROW(parse_scheme("neumann"), ConfigError);
    EXPECT_EQ(parse_scheme("AR"), BoundaryScheme::AntiReflective);
    for (auto s : all_schemes) EXPECT_EQ(parse_scheme(to_string(s)), s);
}

TEST(Apply, ZeroAndSingleBorderEntry) {
    const auto A = assemble_antirefl(FractionalOrder(1.5), 0.0, 40);
    const auto y = A.apply(std::vector<double>(40, 0.0));
    for (double v : y) EXPECT_EQ(v, 0.0);
    StructuredOperator B(5);
    B.add_border({{0, 0, 1.0}});
    const auto r = B.apply(std::vector<double>{3, 4, 5, 6, 7});
    EXPECT_EQ(r, (std::vector<double>{3, 0, 0, 0, 0}));
    EXPECT_THROW(A.apply(std::vector<double>(39, 0.0)), ConfigError);
}

TEST(Apply, MatrixFreeMatchesDenseForEveryScheme) {
    for (std::size_t m : {6u, 37u, 256u, 512u}) {
        for (auto s : all_schemes) {
            const auto A = assemble(s, FractionalOrder(1.5), 0.0, m);
            const auto D = A.materialize();
            for (unsigned r = 0; r < 20; ++r) {
                const auto v = oracle::random_vector(m, 100 * r + static_cast<unsigned>(m));
                const auto y = A.apply(v);
                const Eigen::VectorXd ref = D * oracle::to_eigen(v);
                const double vinf = oracle::to_eigen(v).cwiseAbs().maxCoeff();
                ASSERT_LT((oracle::to_eigen(y) - ref).cwiseAbs().maxCoeff(), 1e-11 * vinf)
                    << to_string(s) << " m=" << m;
            }
        }
    }
}

TEST(Apply, NonzeroBetaAndLifted) {
    const auto A = assemble_antisym(FractionalOrder(1.3), 0.6, 100);
    const auto L = A.lifted(2.0, 0.7);
    const DenseMatrix ref = 2.0 * DenseMatrix::Identity(100, 100) - 0.7 * A.materialize();
    EXPECT_LT(max_abs(L.materialize() - ref), 1e-14);
    const auto v = oracle::random_vector(100, 5);
    EXPECT_LT((oracle::to_eigen(L.apply(v)) - ref * oracle::to_eigen(v)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Structure, TransposeAndFlip) {
    for (auto s : all_schemes) {
        const double beta = is_truncated(s) ? 0.0 : 0.35;
        const auto A = assemble(s, FractionalOrder(1.45), beta, 30);
        EXPECT_LT(max_abs(A.transposed().materialize() - A.materialize().transpose()), 1e-15) << to_string(s);
    }
    // A_R = A_L^T for the open operator: beta -> -beta transposes
    const auto P = assemble_open(FractionalOrder(1.45), 0.5, 30).materialize();
    const auto Q = assemble_open(FractionalOrder(1.45), -0.5, 30).materialize();
    EXPECT_LT(max_abs(P - Q.transpose()), 1e-15);
    // J A J is the beta -> -beta operator for every reflection rule
    DenseMatrix J = DenseMatrix::Zero(30, 30);
    for (int i = 0; i < 30; ++i) J(i, 29 - i) = 1.0;
    const auto X = assemble_antirefl(FractionalOrder(1.45), 0.5, 30).materialize();
    const auto Y = assemble_antirefl(FractionalOrder(1.45), -0.5, 30).materialize();
    EXPECT_LT(max_abs(J * X * J - Y), 1e-15);
}

TEST(Structure, HankelPartMaterializesAsFlippedToeplitz) {
    std::vector<double> h = {1, 2, 3, 4, 5, 6, 7};
    StructuredOperator H(4);
    H.add_hankel(h, 1.0);
    const auto D = H.materialize();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_EQ(D(i, j), h[static_cast<std::size_t>(i + j)]);
    const auto v = oracle::random_vector(4, 9);
    EXPECT_LT((oracle::to_eigen(H.apply(v)) - D * oracle::to_eigen(v)).norm(), 1e-13);
}

TEST(Structure, InteriorRestriction) {
    for (auto s : all_schemes) {
        const auto A = assemble(s, FractionalOrder(1.6), 0.0, 40);
        const auto I = A.interior();
        const DenseMatrix ref = A.materialize().block(1, 1, 38, 38);
        EXPECT_LT(max_abs(I.materialize() - ref), 1e-15) << to_string(s);
        const auto v = oracle::random_vector(38, 3);
        EXPECT_LT((oracle::to_eigen(I.apply(v)) - ref * oracle::to_eigen(v)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Structure, MaterializeLimit) {
    const auto A = assemble_open(FractionalOrder(1.5), 0.0, 5000);
    EXPECT_THROW(A.materialize(), ConfigError);
}

TEST(Structure, HomogeneousCoincidenceOfTruncatedSchemes) {
    const std::size_t m = 64;
    const auto S = assemble_truncated(BoundaryScheme::AntiSymmetricTrunc, FractionalOrder(1.5), m);
    const auto R = assemble_truncated(BoundaryScheme::AntiReflectiveTrunc, FractionalOrder(1.5), m);
    auto v = oracle::random_vector(m, 11);
    v.front() = v.back() = 0.0;
    const auto a = S.apply(v), b = R.apply(v);
    for (std::size_t i = 1; i + 1 < m; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
}
