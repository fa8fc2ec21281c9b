#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qsecure/numkernel.hpp"

using namespace qsecure;

namespace {

ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = g(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = cplx(g(rng), g(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

RealMatrix random_rotation(std::size_t n, std::mt19937_64& rng) {
    // Products of Givens rotations are orthogonal by construction.
    std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
    RealMatrix q = RealMatrix::identity(n);
    for (std::size_t p = 0; p + 1 < n; ++p)
        for (std::size_t r = p + 1; r < n; ++r) {
            const double a = u(rng);
            RealMatrix g = RealMatrix::identity(n);
            g(p, p) = std::cos(a);
            g(r, r) = std::cos(a);
            g(p, r) = -std::sin(a);
            g(r, p) = std::sin(a);
            q = g * q;
        }
    return q;
}

} // namespace

TEST(HermitianEig, PauliMatrices) {
    const auto z = hermitian_eig(RealMatrix{{1, 0}, {0, -1}});
    EXPECT_NEAR(z.values[0], -1.0, 1e-14);
    EXPECT_NEAR(z.values[1], 1.0, 1e-14);
    const auto x = hermitian_eig(RealMatrix{{0, 1}, {1, 0}});
    EXPECT_NEAR(x.values[0], -1.0, 1e-14);
    EXPECT_NEAR(x.values[1], 1.0, 1e-14);
    const auto y = hermitian_eig(ComplexMatrix{{0, cplx(0, -1)}, {cplx(0, 1), 0}});
    EXPECT_NEAR(y.values[0], -1.0, 1e-14);
    EXPECT_NEAR(y.values[1], 1.0, 1e-14);
}

TEST(HermitianEig, RotatedPauliMatchesCharacteristicPolynomial) {
    // (s1 + s3)/sqrt2: trace 0, determinant -1/2 - 1/2 = -1, so lambda^2 = 1.
    const double r = 1.0 / std::sqrt(2.0);
    const auto e = hermitian_eig(RealMatrix{{r, r}, {r, -r}});
    EXPECT_NEAR(e.values[0], -1.0, 1e-13);
    EXPECT_NEAR(e.values[1], 1.0, 1e-13);
}

TEST(HermitianEig, TwoByTwoClosedForm) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int k = 0; k < 200; ++k) {
        const double a = g(rng), b = g(rng), d = g(rng);
        const double mid = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), b);
        const auto e = hermitian_eig(RealMatrix{{a, b}, {b, d}});
        EXPECT_NEAR(e.values[0], mid - rad, 1e-12);
        EXPECT_NEAR(e.values[1], mid + rad, 1e-12);
    }
}

TEST(HermitianEig, RandomReconstructionAndOrthonormality) {
    std::mt19937_64 rng(42);
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u, 32u}) {
        for (int rep = 0; rep < 3; ++rep) {
            const ComplexMatrix m = random_hermitian(n, rng);
            const auto e = hermitian_eig(m);
            ComplexMatrix lam(n, n);
            for (std::size_t k = 0; k < n; ++k) lam(k, k) = e.values[k];
            const ComplexMatrix rec = e.vectors * lam * e.vectors.adjoint();
            EXPECT_LE((rec - m).max_abs(), 1e-9 * m.max_abs()) << "n=" << n;
            EXPECT_LE((e.vectors.adjoint() * e.vectors - ComplexMatrix::identity(n)).max_abs(), 1e-9);
            for (std::size_t k = 1; k < n; ++k) EXPECT_LE(e.values[k - 1], e.values[k]);
        }
    }
}

TEST(HermitianEig, ValuesOnlyPathAgrees) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (std::size_t n = 1; n <= 33; n += 4) {
        RealMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
        const auto fast = symmetric_eigenvalues(m);
        const auto full = hermitian_eig(m).values;
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(fast[k], full[k], 1e-10);
    }
    const auto id = symmetric_eigenvalues(RealMatrix::identity(6));
    for (double v : id) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(HermitianEig, Errors) {
    try {
        hermitian_eig(RealMatrix{{0, 1}, {0, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonHermitian);
    }
    try {
        hermitian_eig(RealMatrix(2, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(TopEigenpair, Examples) {
    const auto id = top_eigenpair(RealMatrix::identity(4));
    EXPECT_NEAR(id.value, 1.0, 1e-14);
    EXPECT_NEAR(id.gap, 0.0, 1e-14);
    EXPECT_NEAR(norm2(id.vector), 1.0, 1e-12);

    RealMatrix d(3, 3);
    d(0, 0) = 3;
    d(1, 1) = 1;
    const auto top = top_eigenpair(d);
    EXPECT_NEAR(top.value, 3.0, 1e-14);
    EXPECT_NEAR(top.gap, 2.0, 1e-14);
    EXPECT_NEAR(std::abs(top.vector[0]), 1.0, 1e-12);

    const auto one = top_eigenpair(RealMatrix{{5.0}});
    EXPECT_EQ(one.gap, 0.0);
}

TEST(GramRank, Examples) {
    EXPECT_EQ(gram_rank({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), 2u);
    EXPECT_EQ(gram_rank({{1, 0, 0}}), 1u);
    EXPECT_EQ(gram_rank({{0, 0}, {0, 0}}), 0u);
    try {
        gram_rank({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
    try {
        gram_rank({{1, 0}, {1, 0, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(GramRank, InvariantUnderRotation) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t dim = 5, rank = 1 + trial % 4, count = 7;
        std::vector<std::vector<double>> basis(rank, std::vector<double>(dim));
        for (auto& b : basis)
            for (auto& v : b) v = g(rng);
        std::vector<std::vector<double>> vs;
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<double> v(dim, 0.0);
            for (const auto& b : basis) {
                const double c = g(rng);
                for (std::size_t i = 0; i < dim; ++i) v[i] += c * b[i];
            }
            vs.push_back(v);
        }
        const RealMatrix q = random_rotation(dim, rng);
        std::vector<std::vector<double>> rotated;
        for (const auto& v : vs) rotated.push_back(q * v);
        EXPECT_EQ(gram_rank(vs), rank);
        EXPECT_EQ(gram_rank(rotated), rank);
    }
}

TEST(PsdProject, Examples) {
    EXPECT_LE((psd_project(RealMatrix::identity(3)) - RealMatrix::identity(3)).max_abs(), 1e-12);
    EXPECT_LE((psd_project(RealMatrix{{1, 0}, {0, -1}}) - RealMatrix{{1, 0}, {0, 0}}).max_abs(), 1e-12);
    EXPECT_LE((psd_project(RealMatrix{{0, 1}, {1, 0}}) - RealMatrix{{0.5, 0.5}, {0.5, 0.5}}).max_abs(), 1e-12);
    try {
        psd_project(RealMatrix{{0, 1}, {0, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonSymmetric);
    }
}

TEST(PsdProject, IdempotentAndPositive) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + trial % 7;
        RealMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
        const RealMatrix p = psd_project(m);
        EXPECT_GE(hermitian_eig(p).values.front(), -1e-10);
        EXPECT_LE((psd_project(p) - p).max_abs(), 1e-10);
    }
}

TEST(Solve, InverseAndSingular) {
    const RealMatrix a{{4, 1}, {2, 3}};
    const auto x = solve(a, {1, 2});
    EXPECT_NEAR(x[0], 0.1, 1e-14);
    EXPECT_NEAR(x[1], 0.6, 1e-14);
    EXPECT_LE((a * inverse(a) - RealMatrix::identity(2)).max_abs(), 1e-14);
    try {
        inverse(RealMatrix{{1, 2}, {2, 4}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularMatrix);
    }
}

TEST(Matrix, KronAndAdjoint) {
    const RealMatrix z{{1, 0}, {0, -1}};
    const RealMatrix x{{0, 1}, {1, 0}};
    const RealMatrix zx = kron(z, x);
    EXPECT_EQ(zx(0, 1), 1.0);
    EXPECT_EQ(zx(2, 3), -1.0);
    EXPECT_EQ(zx(0, 2), 0.0);
    const ComplexMatrix c{{1, cplx(0, 2)}, {3, 4}};
    EXPECT_EQ(c.adjoint()(0, 1), 3.0);
    EXPECT_EQ(c.adjoint()(1, 0), cplx(0, -2));
}
