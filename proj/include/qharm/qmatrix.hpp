#pragma once

/**
 * @file qmatrix.hpp
 * @brief Dense quaternion matrices and Hermitian solves/eigendecompositions.
 *
 * Solves and eigendecompositions go through the complex adjoint
 * representation: each entry q = a + b·j with a = w + xi, b = y + zi maps to
 * the 2×2 complex block [[a, b], [-conj(b), conj(a)]], laid out as the
 * block matrix [[A, B], [-conj(B), conj(A)]]. The map is a faithful
 * multiplicative homomorphism, so Eigen's complex routines do the heavy
 * lifting and the results are folded back into quaternion form.
 *
 * Eigenvectors are right eigenvectors: R·u = u·λ.
 */

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qharm/quaternion.hpp"

namespace qharm {

using ComplexMatrix = Eigen::MatrixXcd;

/// Raised when a complex backend result lacks the quaternion block structure.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a matrix is too ill-conditioned to invert reliably.
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols);
    QMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> entries);
    QMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows);

    static QMatrix identity(std::size_t n);
    static QMatrix column(std::span<const Quaternion> values);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    Quaternion& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Quaternion& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    [[nodiscard]] std::span<const Quaternion> entries() const { return entries_; }

    /// entry(r,c) == conj(entry(c,r)) and real diagonal, both within `tol`.
    [[nodiscard]] bool is_hermitian(double tol = 1e-12) const;
    [[nodiscard]] double frobenius_norm() const;

    bool operator==(const QMatrix&) const = default;

private:
    std::size_t rows_{0};
    std::size_t cols_{0};
    std::vector<Quaternion> entries_;
};

QMatrix operator+(const QMatrix& a, const QMatrix& b);
QMatrix operator-(const QMatrix& a, const QMatrix& b);
QMatrix operator*(double s, const QMatrix& a);

/// Matrix product with factor order preserved in every entry. Throws
/// std::invalid_argument on dimension mismatch.
[[nodiscard]] QMatrix qmatmul(const QMatrix& a, const QMatrix& b);
inline QMatrix operator*(const QMatrix& a, const QMatrix& b) { return qmatmul(a, b); }

[[nodiscard]] QMatrix hermitian_transpose(const QMatrix& a);

/// Largest componentwise difference between equally sized matrices.
[[nodiscard]] double max_abs_diff(const QMatrix& a, const QMatrix& b);

[[nodiscard]] ComplexMatrix adjoint_complex(const QMatrix& a);

/// Left inverse of adjoint_complex. Throws StructuralError if the lower blocks
/// disagree with the upper ones by more than `tol` (relative to the largest entry).
[[nodiscard]] QMatrix from_adjoint(const ComplexMatrix& c, double tol = 1e-8);

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    QMatrix eigenvectors;             // unit right eigenvectors as columns
};

/// Gap, relative to the eigenvalue, within which adjoint eigenvalues are
/// treated as one pair (or one degenerate cluster).
inline constexpr double kPairTolerance = 1e-8;

[[nodiscard]] EigenDecomposition qeig_hermitian(const QMatrix& r);

/// Condition threshold above which solves are refused.
inline constexpr double kMaxCondition = 1e12;

/**
 * Factorizes a Hermitian matrix once and solves R·x = b for many right-hand
 * sides via x = U·diag(1/λ)·U^H·b, using the paired eigendecomposition of the
 * adjoint. The quaternion structure of U is exact, so quadratic forms
 * b^H x come out real up to rounding even for ill-conditioned R.
 */
class HermitianSolver {
public:
    /// Throws std::invalid_argument if R is not square Hermitian and
    /// SingularMatrixError if max|λ| / min|λ| exceeds kMaxCondition.
    explicit HermitianSolver(const QMatrix& r);

    [[nodiscard]] QMatrix solve(const QMatrix& b) const;
    [[nodiscard]] std::size_t size() const { return eig_.eigenvalues.size(); }
    [[nodiscard]] double condition() const { return condition_; }

private:
    EigenDecomposition eig_;
    QMatrix basis_h_;  // U^H, cached
    double condition_{0.0};
};

[[nodiscard]] QMatrix qsolve_hermitian(const QMatrix& r, const QMatrix& b);

/// Columns belonging to the `m0` smallest eigenvalues. Throws
/// std::invalid_argument unless 1 <= m0 <= M.
[[nodiscard]] QMatrix noise_subspace(const EigenDecomposition& eig, std::size_t m0);

}  // namespace qharm
