#include "circulaw/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "circulaw/dense_eigen.hpp"
#include "circulaw/errors.hpp"

namespace circulaw {

namespace {

constexpr double kRefineRatio = 1e-6;

template <typename Scalar>
double inverse_iteration(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = a.rows();
    dense::PivotedLu<Scalar> lu(a);
    if (lu.singular()) return 0.0;
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = Scalar(1.0 + static_cast<double>(i) / static_cast<double>(n));
    x.normalize();
    double sigma = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 40; ++iter) {
        Vector w = lu.solve(lu.solve_adjoint(x));
        const double wn = w.norm();
        if (!std::isfinite(wn)) return 0.0;
        if (wn == 0.0) break;
        const double next = 1.0 / std::sqrt(wn);
        x = w / wn;
        const bool done = std::abs(next - sigma) <= 1e-15 * next;
        sigma = next;
        if (done) break;
    }
    return sigma;
}

}  // namespace

namespace detail {

double smallest_sv_inverse_iteration(const ComplexMatrix& a, bool real_entries) {
    if (real_entries) return inverse_iteration<double>(a.real());
    return inverse_iteration<Complex>(a);
}

}  // namespace detail

MatrixSample shift(const MatrixSample& sample, Complex z) {
    if (sample.applied_shift()) throw UsageError("shift: sample is already shifted");
    return sample.with_diagonal_shift(z, z, std::nullopt);
}

ComplexMatrix hermitize(const MatrixSample& sample) {
    const auto n = static_cast<Eigen::Index>(sample.n());
    ComplexMatrix w = ComplexMatrix::Zero(2 * n, 2 * n);
    w.topRightCorner(n, n) = sample.entries();
    w.bottomLeftCorner(n, n) = sample.entries().adjoint();
    return w;
}

SingularSpectrum singular_values(const MatrixSample& sample) {
    const ComplexMatrix& a = sample.entries();
    if (!a.allFinite()) throw NumericError("singular_values: non-finite entries");
    const bool real = sample.is_real();
    Eigen::VectorXd eig;
    if (real) {
        const Eigen::MatrixXd ar = a.real();
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(ar.rows(), ar.rows());
        gram.selfadjointView<Eigen::Lower>().rankUpdate(ar);
        eig = dense::symmetric_eigenvalues(std::move(gram));
    } else {
        ComplexMatrix gram = ComplexMatrix::Zero(a.rows(), a.rows());
        gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
        eig = dense::hermitian_eigenvalues(std::move(gram));
    }
    SingularSpectrum out;
    out.values.resize(static_cast<std::size_t>(eig.size()));
    // ascending eigenvalues -> descending singular values
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        out.values[static_cast<std::size_t>(eig.size() - 1 - i)] = std::sqrt(std::max(eig(i), 0.0));
    }
    if (!out.values.empty() && out.values.back() < kRefineRatio * out.values.front()) {
        double refined = detail::smallest_sv_inverse_iteration(a, real);
        if (out.values.size() > 1) refined = std::min(refined, out.values[out.values.size() - 2]);
        out.values.back() = refined;
    }
    out.z = sample.applied_shift().value_or(Complex{});
    out.r = sample.applied_smoothing() ? sample.applied_smoothing()->r : 0.0;
    out.p_n = sample.p_n();
    out.trial_index = sample.trial_index();
    return out;
}

ComplexSpectrum eigenvalues(const MatrixSample& sample) {
    std::vector<Complex> values = sample.is_real() ? dense::general_eigenvalues(Eigen::MatrixXd(sample.entries().real()))
                                                   : dense::general_eigenvalues(sample.entries());
    std::sort(values.begin(), values.end(), [](const Complex& x, const Complex& y) {
        return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
    });
    return ComplexSpectrum{std::move(values), sample.config(), sample.trial_index()};
}

double smallest_singular_value(const MatrixSample& sample) {
    const auto s = singular_values(sample);
    return s.values.empty() ? 0.0 : s.values.back();
}

double operator_norm(const MatrixSample& sample) {
    const auto s = singular_values(sample);
    return s.values.empty() ? 0.0 : s.values.front();
}

double distance_to_span(const ComplexMatrix& columns, std::size_t k) {
    const Eigen::Index n = columns.cols();
    if (n < 2) throw DomainError("distance_to_span: need at least two columns");
    if (static_cast<Eigen::Index>(k) >= n) throw DomainError("distance_to_span: column index out of range");
    // Orthonormal basis of the other columns by Gram-Schmidt with one
    // reorthogonalization pass; columns already in the span are dropped.
    const double scale = columns.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    std::vector<Eigen::VectorXcd> basis;
    basis.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == static_cast<Eigen::Index>(k)) continue;
        Eigen::VectorXcd v = columns.col(j);
        const double original = v.norm();
        if (original == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) v -= q.dot(v) * q;
        const double norm = v.norm();
        if (norm <= 1e-12 * original) continue;
        basis.push_back(v / norm);
    }
    Eigen::VectorXcd target = columns.col(static_cast<Eigen::Index>(k));
    const double target_norm = target.norm();
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) target -= q.dot(target) * q;
    const double residual = target.norm();
    if (residual <= 1e-13 * target_norm) return 0.0;
    return residual;
}

}  // namespace circulaw
