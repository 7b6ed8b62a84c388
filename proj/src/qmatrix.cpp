#include "qharm/qmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace qharm {
namespace {

using cd = std::complex<double>;

cd alpha_of(const Quaternion& q) { return {q.w, q.x}; }
cd beta_of(const Quaternion& q) { return {q.y, q.z}; }
Quaternion from_parts(cd alpha, cd beta) { return {alpha.real(), alpha.imag(), beta.real(), beta.imag()}; }

double max_abs_entry(const QMatrix& a) {
    double m = 0.0;
    for (const auto& q : a.entries()) {
        m = std::max({m, std::fabs(q.w), std::fabs(q.x), std::fabs(q.y), std::fabs(q.z)});
    }
    return m;
}

void require_hermitian(const QMatrix& r, const char* who) {
    if (r.rows() != r.cols() || r.rows() == 0) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square and nonempty");
    }
    if (!r.is_hermitian(1e-12 * std::max(1.0, max_abs_entry(r)))) {
        throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
    }
}

// Quaternion column vectors as plain arrays for Gram-Schmidt.
using QVector = std::vector<Quaternion>;

Quaternion inner(const QVector& a, const QVector& b) {
    Quaternion acc;
    for (std::size_t m = 0; m < a.size(); ++m) {
        acc += qconj(a[m]) * b[m];
    }
    return acc;
}

double vnorm(const QVector& a) {
    double acc = 0.0;
    for (const auto& q : a) {
        acc += qnorm2(q);
    }
    return std::sqrt(acc);
}

// x <- x - q (q^H x) for unit q; right-module projection.
void project_out(QVector& x, const QVector& q) {
    const Quaternion coef = inner(q, x);
    for (std::size_t m = 0; m < x.size(); ++m) {
        x[m] -= q[m] * coef;
    }
}

}  // namespace

QMatrix::QMatrix(std::size_t rows, std::size_t cols) : rows_{rows}, cols_{cols}, entries_(rows * cols) {}

QMatrix::QMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> entries)
    : rows_{rows}, cols_{cols}, entries_{std::move(entries)} {
    if (entries_.size() != rows_ * cols_) {
        throw std::invalid_argument("QMatrix: entry count does not match rows*cols");
    }
}

QMatrix::QMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw std::invalid_argument("QMatrix: ragged initializer");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
}

QMatrix QMatrix::identity(std::size_t n) {
    QMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) = 1.0;
    }
    return out;
}

QMatrix QMatrix::column(std::span<const Quaternion> values) {
    return QMatrix(values.size(), 1, std::vector<Quaternion>(values.begin(), values.end()));
}

bool QMatrix::is_hermitian(double tol) const {
    if (rows_ != cols_) {
        return false;
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        const Quaternion& d = (*this)(r, r);
        if (d.vector_norm() > tol) {
            return false;
        }
        for (std::size_t c = r + 1; c < cols_; ++c) {
            if (max_abs_diff((*this)(r, c), qconj((*this)(c, r))) > tol) {
                return false;
            }
        }
    }
    return true;
}

double QMatrix::frobenius_norm() const {
    double acc = 0.0;
    for (const auto& q : entries_) {
        acc += qnorm2(q);
    }
    return std::sqrt(acc);
}

QMatrix operator+(const QMatrix& a, const QMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("QMatrix +: dimension mismatch");
    }
    QMatrix out = a;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(r, c) += b(r, c);
        }
    }
    return out;
}

QMatrix operator-(const QMatrix& a, const QMatrix& b) { return a + (-1.0) * b; }

QMatrix operator*(double s, const QMatrix& a) {
    QMatrix out = a;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(r, c) *= s;
        }
    }
    return out;
}

QMatrix qmatmul(const QMatrix& a, const QMatrix& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream msg;
        msg << "qmatmul: dimension mismatch " << a.rows() << 'x' << a.cols() << " * " << b.rows() << 'x' << b.cols();
        throw std::invalid_argument(msg.str());
    }
    QMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t t = 0; t < a.cols(); ++t) {
            const Quaternion& lhs = a(r, t);
            for (std::size_t c = 0; c < b.cols(); ++c) {
                out(r, c) += lhs * b(t, c);
            }
        }
    }
    return out;
}

QMatrix hermitian_transpose(const QMatrix& a) {
    QMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(c, r) = qconj(a(r, c));
        }
    }
    return out;
}

double max_abs_diff(const QMatrix& a, const QMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: dimension mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        m = std::max(m, max_abs_diff(a.entries()[i], b.entries()[i]));
    }
    return m;
}

ComplexMatrix adjoint_complex(const QMatrix& a) {
    const auto m = static_cast<Eigen::Index>(a.rows());
    const auto n = static_cast<Eigen::Index>(a.cols());
    ComplexMatrix out(2 * m, 2 * n);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const Quaternion& q = a(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            const cd alpha = alpha_of(q);
            const cd beta = beta_of(q);
            out(r, c) = alpha;
            out(r, n + c) = beta;
            out(m + r, c) = -std::conj(beta);
            out(m + r, n + c) = std::conj(alpha);
        }
    }
    return out;
}

QMatrix from_adjoint(const ComplexMatrix& c, double tol) {
    if (c.rows() % 2 != 0 || c.cols() % 2 != 0) {
        throw StructuralError("from_adjoint: dimensions must be even");
    }
    const Eigen::Index m = c.rows() / 2;
    const Eigen::Index n = c.cols() / 2;
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    QMatrix out(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const cd alpha = c(r, k);
            const cd beta = c(r, n + k);
            if (std::abs(c(m + r, k) + std::conj(beta)) > tol * scale ||
                std::abs(c(m + r, n + k) - std::conj(alpha)) > tol * scale) {
                throw StructuralError("from_adjoint: matrix violates the symplectic block symmetry");
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(k)) = from_parts(alpha, beta);
        }
    }
    return out;
}

HermitianSolver::HermitianSolver(const QMatrix& r) : eig_{qeig_hermitian(r)} {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const double v : eig_.eigenvalues) {
        lo = std::min(lo, std::fabs(v));
        hi = std::max(hi, std::fabs(v));
    }
    condition_ = hi / lo;
    if (!(condition_ <= kMaxCondition)) {
        std::ostringstream msg;
        msg << "HermitianSolver: matrix is numerically singular (condition " << condition_
            << " > " << kMaxCondition << "); apply diagonal loading";
        throw SingularMatrixError(msg.str());
    }
    basis_h_ = hermitian_transpose(eig_.eigenvectors);
}

QMatrix HermitianSolver::solve(const QMatrix& b) const {
    if (b.rows() != size()) {
        throw std::invalid_argument("HermitianSolver::solve: right-hand side has wrong row count");
    }
    QMatrix coeffs = qmatmul(basis_h_, b);
    for (std::size_t r = 0; r < coeffs.rows(); ++r) {
        const double inv = 1.0 / eig_.eigenvalues[r];
        for (std::size_t c = 0; c < coeffs.cols(); ++c) {
            coeffs(r, c) *= inv;
        }
    }
    return qmatmul(eig_.eigenvectors, coeffs);
}

QMatrix qsolve_hermitian(const QMatrix& r, const QMatrix& b) { return HermitianSolver(r).solve(b); }

EigenDecomposition qeig_hermitian(const QMatrix& r) {
    require_hermitian(r, "qeig_hermitian");
    const std::size_t n = r.rows();
    const auto en = static_cast<Eigen::Index>(n);

    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(adjoint_complex(r));
    if (solver.info() != Eigen::Success) {
        throw StructuralError("qeig_hermitian: complex eigensolver did not converge");
    }
    const Eigen::VectorXd& values = solver.eigenvalues();
    const ComplexMatrix& vectors = solver.eigenvectors();

    const double scale = std::max(values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    // Eigenvalues are only resolved to about n·eps·|R|; closer ones form one cluster.
    const double rounding_floor = 64.0 * static_cast<double>(2 * n) * std::numeric_limits<double>::epsilon() * scale;

    EigenDecomposition out;
    out.eigenvalues.reserve(n);
    std::vector<QVector> accepted;
    accepted.reserve(n);

    Eigen::Index start = 0;
    while (start < 2 * en) {
        Eigen::Index stop = start + 1;
        while (stop < 2 * en && values(stop) - values(stop - 1) <=
                                    std::max(kPairTolerance * std::fabs(values(stop)), rounding_floor)) {
            ++stop;
        }
        const Eigen::Index size = stop - start;
        if (size % 2 != 0) {
            std::ostringstream msg;
            msg << "qeig_hermitian: eigenvalue cluster of odd size " << size << " near " << values(start)
                << " cannot be split into symplectic pairs";
            throw StructuralError(msg.str());
        }

        // Candidate quaternion vectors: column [u; v] of the adjoint maps to u - conj(v) j.
        std::vector<QVector> candidates;
        candidates.reserve(static_cast<std::size_t>(size));
        for (Eigen::Index k = start; k < stop; ++k) {
            QVector x(n);
            for (Eigen::Index m = 0; m < en; ++m) {
                x[static_cast<std::size_t>(m)] = from_parts(vectors(m, k), -std::conj(vectors(en + m, k)));
            }
            for (const auto& q : accepted) {
                project_out(x, q);
            }
            candidates.push_back(std::move(x));
        }

        // Each quaternion vector spans two complex dimensions; pick size/2 of them.
        for (Eigen::Index pick = 0; pick < size / 2; ++pick) {
            std::size_t best = 0;
            double best_norm = -1.0;
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                const double nrm = vnorm(candidates[c]);
                if (nrm > best_norm) {
                    best_norm = nrm;
                    best = c;
                }
            }
            if (best_norm < 1e-3) {
                throw StructuralError("qeig_hermitian: eigenvector pairing failed (degenerate candidate set)");
            }
            QVector q = candidates[best];
            // Second pass keeps orthogonality tight.
            for (const auto& prev : accepted) {
                project_out(q, prev);
            }
            const double qn = vnorm(q);
            for (auto& e : q) {
                e /= qn;
            }
            for (auto& cand : candidates) {
                project_out(cand, q);
            }
            accepted.push_back(std::move(q));
            out.eigenvalues.push_back(0.5 * (values(start + 2 * pick) + values(start + 2 * pick + 1)));
        }
        start = stop;
    }

    out.eigenvectors = QMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t m = 0; m < n; ++m) {
            out.eigenvectors(m, c) = accepted[c][m];
        }
    }
    return out;
}

QMatrix noise_subspace(const EigenDecomposition& eig, std::size_t m0) {
    const std::size_t n = eig.eigenvectors.rows();
    if (m0 < 1 || m0 > n) {
        std::ostringstream msg;
        msg << "noise_subspace: M0 = " << m0 << " outside [1, " << n << "]";
        throw std::invalid_argument(msg.str());
    }
    QMatrix out(n, m0);
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t c = 0; c < m0; ++c) {
            out(m, c) = eig.eigenvectors(m, c);
        }
    }
    return out;
}

}  // namespace qharm
