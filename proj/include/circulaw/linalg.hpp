#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "circulaw/ensemble.hpp"

namespace circulaw {

/// Eigenvalues of one matrix draw, sorted by (Re, Im).
struct ComplexSpectrum {
    std::vector<Complex> values;
    std::optional<EnsembleConfig> config;
    std::size_t trial_index = 0;

    std::size_t n() const noexcept { return values.size(); }
};

/// Singular values s_1 >= ... >= s_n >= 0 of X - zI (possibly smoothed by r).
struct SingularSpectrum {
    std::vector<double> values;
    Complex z{};
    double r = 0.0;
    double p_n = 1.0;
    std::size_t trial_index = 0;

    std::size_t n() const noexcept { return values.size(); }
};

/// X - zI. Throws UsageError if the sample was already shifted.
MatrixSample shift(const MatrixSample& sample, Complex z);

/// The 2n x 2n Hermitian matrix [[0, A], [A^*, 0]] for A = the sample entries.
ComplexMatrix hermitize(const MatrixSample& sample);

/// Singular values via the Hermitian eigenproblem of the Gram matrix A A^*.
/// A smallest value below 1e-6 s_1 is recomputed by inverse iteration through
/// an LU factorization of A, which keeps it accurate to ~eps s_1 absolute.
SingularSpectrum singular_values(const MatrixSample& sample);

/// Eigenvalues via Hessenberg reduction and shifted QR; real matrices use the
/// double-shift variant. Throws NumericError on non-convergence.
ComplexSpectrum eigenvalues(const MatrixSample& sample);

/// s_n; 0 for an exactly singular matrix.
double smallest_singular_value(const MatrixSample& sample);

/// s_1.
double operator_norm(const MatrixSample& sample);

/// Euclidean distance from column k to the span of the remaining columns.
double distance_to_span(const ComplexMatrix& columns, std::size_t k);

namespace detail {
/// s_n of A by inverse iteration on A^* A; 0 when A is exactly singular.
double smallest_sv_inverse_iteration(const ComplexMatrix& a, bool real_entries);
}  // namespace detail

}  // namespace circulaw
