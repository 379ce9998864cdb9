#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "vtolctrl/linalg.hpp"
#include "vtolctrl/models.hpp"

using namespace vtolctrl;

namespace {

Matrix random_matrix(std::mt19937_64 &rng, std::size_t r, std::size_t c, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(r, c);
    for (double &v : m.data())
        v = u(rng);
    return m;
}

// Diagonally dominant, so comfortably nonsingular.
Matrix well_conditioned(std::mt19937_64 &rng, std::size_t n) {
    Matrix a = random_matrix(rng, n, n);
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) += static_cast<double>(n) + 1.0;
    return a;
}

Matrix random_stable(std::mt19937_64 &rng, std::size_t n) {
    Matrix a = random_matrix(rng, n, n);
    const double shift = spectral_abscissa(a) + 0.5;
    return a - shift * Matrix::identity(n);
}

std::vector<double> sorted_real(const std::vector<std::complex<double>> &ev) {
    std::vector<double> r;
    for (auto l : ev)
        r.push_back(l.real());
    std::sort(r.begin(), r.end());
    return r;
}

} // namespace

TEST(Matrix, ShapeAndAccess) {
    Matrix m{{1, 2, 3}, {4, 5, 6}};
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 3u);
    EXPECT_EQ(m(1, 2), 6.0);
    EXPECT_EQ(m.transpose()(2, 1), 6.0);
    EXPECT_DOUBLE_EQ(m.norm(), std::sqrt(91.0));
    EXPECT_EQ(m.block(0, 1, 2, 2), (Matrix{{2, 3}, {5, 6}}));
}

TEST(Matrix, RejectsRaggedRows) {
    EXPECT_THROW((Matrix{{1, 2}, {3}}), Error);
}

TEST(Matrix, ProductDimensionMismatchThrows) {
    EXPECT_THROW(Matrix(2, 3) * Matrix(2, 3), Error);
}

TEST(SolveLinear, IdentityReturnsRhs) {
    const Matrix b{{1, 2}, {3, 4}, {5, 6}};
    EXPECT_EQ(solve_linear(Matrix::identity(3), b), b);
}

TEST(SolveLinear, Diagonal) {
    const Matrix x = solve_linear(Matrix::diag(std::vector<double>{2, 4}), Matrix{{2}, {4}});
    EXPECT_DOUBLE_EQ(x(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(x(1, 0), 1.0);
}

TEST(SolveLinear, RecoversConstructedSolution) {
    std::mt19937_64 rng(7);
    const Matrix a = well_conditioned(rng, 10);
    const Matrix x0 = random_matrix(rng, 10, 3);
    const Matrix x = solve_linear(a, a * x0);
    EXPECT_LE((x - x0).max_abs(), 1e-10);
}

TEST(SolveLinear, HundredRandomSystemsMeetResidualBound) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const Matrix a = well_conditioned(rng, n);
        const Matrix b = random_matrix(rng, n, 2);
        const Matrix x = solve_linear(a, b);
        EXPECT_LE((a * x - b).norm() / b.norm(), 1e-10) << "trial " << trial;
    }
}

TEST(SolveLinear, SingularThrows) {
    try {
        solve_linear(Matrix{{1, 2}, {2, 4}}, Matrix{{1}, {1}});
        FAIL() << "expected SingularMatrix";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularMatrix);
    }
}

TEST(Rank, PivotedRank) {
    EXPECT_EQ(rank(Matrix{{1, 2}, {2, 4}}), 1u);
    EXPECT_EQ(rank(Matrix::identity(4)), 4u);
    EXPECT_EQ(rank(Matrix(3, 3)), 0u);
}

TEST(EigGeneral, Diagonal) {
    const auto ev = sorted_real(eig_general(Matrix::diag(std::vector<double>{-1, -2, 3})));
    EXPECT_NEAR(ev[0], -2.0, 1e-12);
    EXPECT_NEAR(ev[1], -1.0, 1e-12);
    EXPECT_NEAR(ev[2], 3.0, 1e-12);
}

TEST(EigGeneral, RotationGenerator) {
    const auto ev = eig_general(Matrix{{0, 1}, {-1, 0}});
    ASSERT_EQ(ev.size(), 2u);
    for (auto l : ev) {
        EXPECT_NEAR(l.real(), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(l.imag()), 1.0, 1e-12);
    }
    EXPECT_NEAR(ev[0].imag() + ev[1].imag(), 0.0, 1e-12);
}

TEST(EigGeneral, HoverStateMatrixIsNilpotent) {
    for (auto l : eig_general(build_hover_model().A))
        EXPECT_EQ(std::abs(l), 0.0);
}

TEST(EigGeneral, TraceAndDeterminantIdentities) {
    std::mt19937_64 rng(3);
    for (std::size_t n = 1; n <= 6; ++n) {
        const Matrix a = random_matrix(rng, n, n, 2.0);
        const auto ev = eig_general(a);
        std::complex<double> sum = 0.0, prod = 1.0;
        for (auto l : ev) {
            sum += l;
            prod *= l;
        }
        EXPECT_NEAR(sum.real(), a.trace(), 1e-8 * a.norm());
        EXPECT_NEAR(sum.imag(), 0.0, 1e-8 * a.norm());
        const double det = determinant(a);
        EXPECT_NEAR(prod.real(), det, 1e-6 * std::max(std::abs(det), 1e-12)) << "n = " << n;
    }
}

TEST(EigGeneral, EigenvectorResidualSpotCheck) {
    // Real eigenvalues of a random matrix: null vector of A - lambda I by
    // inverse iteration, residual relative to ||A||.
    std::mt19937_64 rng(5);
    const Matrix a = random_matrix(rng, 5, 5);
    for (auto l : eig_general(a)) {
        if (std::abs(l.imag()) > 1e-12)
            continue;
        Matrix shifted = a - (l.real() + 1e-10) * Matrix::identity(5);
        Matrix v(5, 1, 1.0);
        for (int it = 0; it < 3; ++it) {
            v = solve_linear(shifted, v, {1e-300, 1e-8, 200});
            v = (1.0 / v.norm()) * v;
        }
        const Matrix r = a * v - l.real() * v;
        EXPECT_LE(r.norm(), 1e-8 * a.norm());
    }
}

TEST(SymEig, Identity) {
    const auto e = sym_eig(Matrix::identity(2));
    EXPECT_DOUBLE_EQ(e.values[0], 1.0);
    EXPECT_DOUBLE_EQ(e.values[1], 1.0);
}

TEST(SymEig, TwoByTwo) {
    const auto e = sym_eig(Matrix{{2, 1}, {1, 2}});
    EXPECT_NEAR(e.values[0], 1.0, 1e-14);
    EXPECT_NEAR(e.values[1], 3.0, 1e-14);
}

TEST(SymEig, ReconstructsInput) {
    std::mt19937_64 rng(9);
    for (std::size_t n : {2u, 5u, 12u}) {
        const Matrix s = symmetrize(random_matrix(rng, n, n, 3.0));
        const auto e = sym_eig(s);
        const Matrix recon = e.vectors * Matrix::diag(e.values) * e.vectors.transpose();
        EXPECT_LE((recon - s).norm(), 1e-8 * s.norm());
        EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    }
}

TEST(SymEig, RejectsNonSymmetric) {
    try {
        sym_eig(Matrix{{1, 2}, {0, 1}});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
    }
}

TEST(MatExp, ZeroIsIdentity) { EXPECT_EQ(mat_exp(Matrix(3, 3)), Matrix::identity(3)); }

TEST(MatExp, Scalar) { EXPECT_NEAR(mat_exp(Matrix{{-1}}, 1.0)(0, 0), std::exp(-1.0), 1e-15); }

TEST(MatExp, NilpotentClosedForm) {
    for (double t : {0.5, 3.0, 40.0}) {
        const Matrix e = mat_exp(Matrix{{0, 1}, {0, 0}}, t);
        EXPECT_NEAR(e(0, 0), 1.0, 1e-13);
        EXPECT_NEAR(e(0, 1), t, 1e-13 * t);
        EXPECT_NEAR(e(1, 0), 0.0, 1e-13);
        EXPECT_NEAR(e(1, 1), 1.0, 1e-13);
    }
}

TEST(MatExp, RotationClosedForm) {
    const double t = 2.3;
    const Matrix e = mat_exp(Matrix{{0, 1}, {-1, 0}}, t);
    EXPECT_NEAR(e(0, 0), std::cos(t), 1e-13);
    EXPECT_NEAR(e(0, 1), std::sin(t), 1e-13);
}

TEST(MatExp, SemigroupProperty) {
    std::mt19937_64 rng(13);
    for (std::size_t n = 1; n <= 6; ++n) {
        const Matrix a = random_stable(rng, n);
        const double t = 0.7, s = 1.9;
        const Matrix lhs = mat_exp(a, t + s);
        const Matrix rhs = mat_exp(a, t) * mat_exp(a, s);
        EXPECT_LE((lhs - rhs).max_abs(), 1e-9);
    }
}

TEST(Kron, IdentityGivesBlockDiagonal) {
    const Matrix b{{1, 2}, {3, 4}};
    const Matrix k = kron(Matrix::identity(2), b);
    EXPECT_EQ(k.block(0, 0, 2, 2), b);
    EXPECT_EQ(k.block(2, 2, 2, 2), b);
    EXPECT_EQ(k.block(0, 2, 2, 2), Matrix(2, 2));
}

TEST(Kron, ScalarAndShape) {
    EXPECT_EQ(kron(Matrix{{2}}, Matrix{{3}}), Matrix{{6}});
    const Matrix k = kron(Matrix(3, 2), Matrix(2, 4));
    EXPECT_EQ(k.rows(), 6u);
    EXPECT_EQ(k.cols(), 8u);
}

TEST(PseudoInverse, RightInverse) {
    const Matrix b{{1, 2, 3}, {0, 1, 4}};
    EXPECT_LE((b * right_pseudo_inverse(b) - Matrix::identity(2)).max_abs(), 1e-12);
}

TEST(PseudoInverse, RankDeficientThrows) {
    try {
        right_pseudo_inverse(Matrix{{1, 2}, {2, 4}});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    }
}

TEST(Tolerances, Validate) {
    EXPECT_NO_THROW(Tolerances{}.validate());
    EXPECT_THROW((Tolerances{-1.0, 1e-8, 10}).validate(), Error);
    EXPECT_THROW((Tolerances{1e-10, 1e-8, 0}).validate(), Error);
}
