#include <cmath>
#include <complex>
#include <random>

#include "catch_amalgamated.hpp"
#include "qharm/qmatrix.hpp"
#include "test_support.hpp"

using namespace qharm;
using Catch::Matchers::WithinAbs;
using cd = std::complex<double>;

namespace {

const Quaternion i = kUnitI;
const Quaternion j = kUnitJ;
const Quaternion k = kUnitK;

QMatrix diag(std::span<const double> values) {
    QMatrix d(values.size(), values.size());
    for (std::size_t n = 0; n < values.size(); ++n) {
        d(n, n) = values[n];
    }
    return d;
}

double rel_diff(const QMatrix& a, const QMatrix& b) { return (a - b).frobenius_norm() / b.frobenius_norm(); }

}  // namespace

TEST_CASE("qmatmul examples") {
    std::mt19937_64 rng(1);
    const QMatrix a = testing::random_matrix(rng, 3, 4);
    CHECK(a * QMatrix::identity(4) == a);
    CHECK(QMatrix{{i}} * QMatrix{{j}} == QMatrix{{k}});
    CHECK(QMatrix{{j}} * QMatrix{{i}} == QMatrix{{-1.0 * k}});
    CHECK_THROWS_AS(a * a, std::invalid_argument);
}

TEST_CASE("hermitian_transpose examples") {
    CHECK(hermitian_transpose(QMatrix::identity(3)) == QMatrix::identity(3));
    CHECK(hermitian_transpose(QMatrix{{i, j}}) == (QMatrix{{-1.0 * i}, {-1.0 * j}}));
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const QMatrix a = testing::random_matrix(rng, 3, 3);
        const QMatrix b = testing::random_matrix(rng, 3, 3);
        CHECK(max_abs_diff(hermitian_transpose(a * b), hermitian_transpose(b) * hermitian_transpose(a)) <= 1e-12);
    }
}

TEST_CASE("adjoint_complex examples") {
    CHECK(adjoint_complex(QMatrix::identity(3)).isApprox(ComplexMatrix::Identity(6, 6)));
    ComplexMatrix expect_j(2, 2);
    expect_j << 0.0, 1.0, -1.0, 0.0;
    CHECK(adjoint_complex(QMatrix{{j}}) == expect_j);
    ComplexMatrix expect_i(2, 2);
    expect_i << cd(0, 1), 0.0, 0.0, cd(0, -1);
    CHECK(adjoint_complex(QMatrix{{i}}) == expect_i);
}

TEST_CASE("adjoint_complex is a multiplicative homomorphism") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const QMatrix a = testing::random_matrix(rng, 3, 3);
        const QMatrix b = testing::random_matrix(rng, 3, 3);
        const ComplexMatrix lhs = adjoint_complex(a * b);
        const ComplexMatrix rhs = adjoint_complex(a) * adjoint_complex(b);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);

        const QMatrix c = testing::random_matrix(rng, 5, 2);
        const QMatrix d = testing::random_matrix(rng, 2, 4);
        CHECK((adjoint_complex(c * d) - adjoint_complex(c) * adjoint_complex(d)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("from_adjoint examples") {
    std::mt19937_64 rng(4);
    const QMatrix a = testing::random_matrix(rng, 4, 3);
    CHECK(max_abs_diff(from_adjoint(adjoint_complex(a)), a) == 0.0);
    CHECK(from_adjoint(ComplexMatrix::Identity(2, 2)) == QMatrix{{Quaternion{1.0}}});
    ComplexMatrix c(2, 2);
    c << 0.0, 1.0, -1.0, 0.0;
    CHECK(from_adjoint(c) == QMatrix{{j}});

    ComplexMatrix broken(2, 2);
    broken << 1.0, 0.0, 0.0, 2.0;
    CHECK_THROWS_AS(from_adjoint(broken), StructuralError);
    CHECK_THROWS_AS(from_adjoint(ComplexMatrix::Identity(3, 2)), StructuralError);
}

TEST_CASE("quadratic forms with a Hermitian matrix are real") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const QMatrix r = testing::random_hermitian_pd(rng, 5);
        REQUIRE(r.is_hermitian());
        const QMatrix x = testing::random_matrix(rng, 5, 1);
        const Quaternion form = (hermitian_transpose(x) * r * x)(0, 0);
        CHECK(form.vector_norm() <= 1e-10 * std::abs(form.w));
    }
}

TEST_CASE("qsolve_hermitian examples") {
    std::mt19937_64 rng(6);
    const QMatrix b = testing::random_matrix(rng, 4, 1);
    CHECK(max_abs_diff(qsolve_hermitian(QMatrix::identity(4), b), b) <= 1e-15);
    CHECK(max_abs_diff(qsolve_hermitian(2.0 * QMatrix::identity(4), b), 0.5 * b) <= 1e-15);

    for (int t = 0; t < 50; ++t) {
        const QMatrix r = testing::random_hermitian_pd(rng, 4);
        const QMatrix rhs = testing::random_matrix(rng, 4, 1);
        const QMatrix x = qsolve_hermitian(r, rhs);
        CHECK((r * x - rhs).frobenius_norm() <= 1e-8 * rhs.frobenius_norm());
    }
}

TEST_CASE("qsolve_hermitian agrees with an explicit inverse") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const QMatrix r = testing::random_hermitian_pd(rng, 4);
        const QMatrix rhs = testing::random_matrix(rng, 4, 1);
        // Inverse through the complex adjoint, computed independently of the solver.
        const QMatrix inv = from_adjoint(adjoint_complex(r).inverse());
        CHECK(rel_diff(qsolve_hermitian(r, rhs), inv * rhs) <= 1e-8);
    }
}

TEST_CASE("qsolve_hermitian rejects singular and non-Hermitian input") {
    QMatrix singular{{1.0, 1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(qsolve_hermitian(singular, QMatrix{{1.0}, {0.0}}), SingularMatrixError);
    QMatrix skew{{1.0, i}, {i, 1.0}};
    CHECK_THROWS_AS(qsolve_hermitian(skew, QMatrix{{1.0}, {0.0}}), std::invalid_argument);
}

TEST_CASE("qeig_hermitian examples") {
    const auto e3 = qeig_hermitian(QMatrix::identity(3));
    REQUIRE(e3.eigenvalues.size() == 3);
    for (const double v : e3.eigenvalues) {
        CHECK_THAT(v, WithinAbs(1.0, 1e-14));
    }

    const double d15[] = {1.0, 5.0};
    const auto e15 = qeig_hermitian(diag(d15));
    CHECK_THAT(e15.eigenvalues[0], WithinAbs(1.0, 1e-14));
    CHECK_THAT(e15.eigenvalues[1], WithinAbs(5.0, 1e-14));
    // Standard basis up to a unit quaternion phase per column.
    CHECK_THAT(qnorm(e15.eigenvectors(0, 0)), WithinAbs(1.0, 1e-14));
    CHECK_THAT(qnorm(e15.eigenvectors(1, 1)), WithinAbs(1.0, 1e-14));
    CHECK(qnorm(e15.eigenvectors(1, 0)) <= 1e-14);
    CHECK(qnorm(e15.eigenvectors(0, 1)) <= 1e-14);

    const auto e2 = qeig_hermitian(QMatrix{{2.0, i}, {-1.0 * i, 2.0}});
    CHECK_THAT(e2.eigenvalues[0], WithinAbs(1.0, 1e-14));
    CHECK_THAT(e2.eigenvalues[1], WithinAbs(3.0, 1e-14));
}

TEST_CASE("qeig_hermitian reconstructs random Hermitian matrices") {
    std::mt19937_64 rng(8);
    for (const std::size_t n : {1u, 2u, 5u, 12u, 32u}) {
        const QMatrix r = testing::random_hermitian_pd(rng, n, 0.0);
        const auto eig = qeig_hermitian(r);
        REQUIRE(eig.eigenvalues.size() == n);
        CHECK(std::is_sorted(eig.eigenvalues.begin(), eig.eigenvalues.end()));
        const QMatrix u = eig.eigenvectors;
        CHECK(max_abs_diff(hermitian_transpose(u) * u, QMatrix::identity(n)) <= 1e-10);
        CHECK(rel_diff(u * diag(eig.eigenvalues) * hermitian_transpose(u), r) <= 1e-8);
        // Right eigenvectors: R u = u λ.
        for (std::size_t c = 0; c < n; ++c) {
            QMatrix col(n, 1);
            for (std::size_t row = 0; row < n; ++row) {
                col(row, 0) = u(row, c);
            }
            CHECK(max_abs_diff(r * col, eig.eigenvalues[c] * col) <= 1e-9 * r.frobenius_norm());
        }
    }
}

TEST_CASE("qeig_hermitian handles repeated eigenvalues") {
    std::mt19937_64 rng(9);
    const auto basis = qeig_hermitian(testing::random_hermitian_pd(rng, 6)).eigenvectors;
    const double values[] = {1.0, 1.0, 1.0, 4.0, 4.0, 9.0};
    const QMatrix r = basis * diag(values) * hermitian_transpose(basis);
    const auto eig = qeig_hermitian(r);
    for (std::size_t n = 0; n < 6; ++n) {
        CHECK_THAT(eig.eigenvalues[n], WithinAbs(values[n], 1e-12));
    }
    CHECK(max_abs_diff(hermitian_transpose(eig.eigenvectors) * eig.eigenvectors, QMatrix::identity(6)) <= 1e-10);
}

TEST_CASE("noise_subspace examples") {
    const auto full = qeig_hermitian(QMatrix::identity(4));
    const QMatrix un = noise_subspace(full, 4);
    CHECK(max_abs_diff(un * hermitian_transpose(un), QMatrix::identity(4)) <= 1e-10);
    CHECK_THROWS_AS(noise_subspace(full, 0), std::invalid_argument);
    CHECK_THROWS_AS(noise_subspace(full, 5), std::invalid_argument);

    std::mt19937_64 rng(10);
    const std::size_t m = 6;
    const QMatrix c = testing::random_matrix(rng, m, 1);
    const QMatrix r = c * hermitian_transpose(c);
    const QMatrix noise = noise_subspace(qeig_hermitian(r), m - 1);
    REQUIRE(noise.rows() == m);
    REQUIRE(noise.cols() == m - 1);
    CHECK(max_abs_diff(hermitian_transpose(noise) * noise, QMatrix::identity(m - 1)) <= 1e-10);
    CHECK((hermitian_transpose(noise) * c).frobenius_norm() <= 1e-8 * c.frobenius_norm());
}

TEST_CASE("QMatrix construction checks sizes") {
    CHECK_THROWS_AS(QMatrix(2, 2, std::vector<Quaternion>(3)), std::invalid_argument);
    CHECK_THROWS_AS((QMatrix{{1.0, 2.0}, {3.0}}), std::invalid_argument);
}
