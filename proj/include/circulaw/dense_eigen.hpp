#pragma once

// Dense eigenvalue kernels: Householder reductions followed by implicit QL
// (Hermitian) or shifted QR (general). Eigenvalues only; no vectors are
// accumulated, so the QR sweeps touch the active window alone.

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace circulaw::dense {

using Complex = std::complex<double>;

/// Eigenvalues of a real symmetric matrix, ascending. Only the lower
/// triangle is read.
Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd a);

/// Eigenvalues of a complex Hermitian matrix, ascending. Only the lower
/// triangle is read.
Eigen::VectorXd hermitian_eigenvalues(Eigen::MatrixXcd a);

/// Eigenvalues of a symmetric tridiagonal matrix given its diagonal and
/// subdiagonal (size n-1), ascending.
Eigen::VectorXd tridiagonal_eigenvalues(Eigen::VectorXd diag, Eigen::VectorXd offdiag);

struct QrOptions {
    /// Cap on the total number of QR sweeps, as a multiple of n.
    std::size_t sweeps_per_dimension = 30;
};

/// Eigenvalues of a general real matrix (Hessenberg reduction + Francis
/// double-shift QR). Complex pairs come out exactly conjugate. Unordered.
std::vector<Complex> general_eigenvalues(Eigen::MatrixXd a, QrOptions options = {});

/// Eigenvalues of a general complex matrix (Hessenberg reduction + single
/// Wilkinson-shift QR). Unordered.
std::vector<Complex> general_eigenvalues(Eigen::MatrixXcd a, QrOptions options = {});

/// LU factorization with partial pivoting, PA = LU.
template <typename Scalar>
class PivotedLu {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit PivotedLu(Matrix a);

    /// True when some pivot is exactly zero.
    bool singular() const noexcept { return singular_; }
    /// Solves A x = b.
    Vector solve(const Vector& b) const;
    /// Solves A^* x = b.
    Vector solve_adjoint(const Vector& b) const;
    /// Determinant of A.
    Scalar determinant() const;

private:
    Matrix lu_;
    std::vector<Eigen::Index> perm_;  // row i of PA is row perm_[i] of A
    int sign_ = 1;
    bool singular_ = false;
};

extern template class PivotedLu<double>;
extern template class PivotedLu<Complex>;

}  // namespace circulaw::dense
