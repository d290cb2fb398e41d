#include "circulaw/dense_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "circulaw/errors.hpp"

namespace circulaw::dense {

namespace {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

double real_part(double x) { return x; }
double real_part(const Complex& x) { return x.real(); }

// Overwrites x with u such that (I - tau u u^*) x = beta e_1, returns tau.
// tau = 0 signals x = 0.
template <typename Scalar>
double make_reflector(Vector<Scalar>& x, Scalar& beta) {
    const double norm = x.norm();
    if (norm == 0.0) {
        beta = Scalar(0);
        return 0.0;
    }
    const Scalar phase = x(0) == Scalar(0) ? Scalar(1) : x(0) / std::abs(x(0));
    x(0) += phase * norm;
    beta = -phase * norm;
    return 2.0 / x.squaredNorm();
}

template <typename Scalar>
Eigen::VectorXd hermitian_eigs_impl(Matrix<Scalar> a) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw UsageError("hermitian eigenvalues: matrix must be square");
    if (n == 0) return {};
    if (!a.allFinite()) throw NumericError("hermitian eigenvalues: non-finite entries");
    Eigen::VectorXd d(n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const Eigen::Index m = n - k - 1;
        d(k) = real_part(a(k, k));
        if (m == 1) {
            e(k) = std::abs(a(k + 1, k));
            break;
        }
        Vector<Scalar> u = a.col(k).segment(k + 1, m);
        Scalar beta;
        const double tau = make_reflector(u, beta);
        e(k) = std::abs(beta);
        if (tau == 0.0) continue;
        auto a22 = a.bottomRightCorner(m, m);
        Vector<Scalar> p = tau * (a22.template selfadjointView<Eigen::Lower>() * u);
        const Scalar k_coef = Scalar(0.5 * tau) * u.dot(p);
        Vector<Scalar> w = p - k_coef * u;
        a22.template selfadjointView<Eigen::Lower>().rankUpdate(u, w, Scalar(-1));
    }
    d(n - 1) = real_part(a(n - 1, n - 1));
    return tridiagonal_eigenvalues(std::move(d), std::move(e));
}

template <typename Scalar>
void reduce_to_hessenberg(Matrix<Scalar>& a) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Eigen::Index m = n - k - 1;
        Vector<Scalar> u = a.col(k).segment(k + 1, m);
        Scalar beta;
        const double tau = make_reflector(u, beta);
        if (tau == 0.0) continue;
        auto left = a.bottomRightCorner(m, m);
        Eigen::Matrix<Scalar, 1, Eigen::Dynamic> t = u.adjoint() * left;
        left.noalias() -= (tau * u) * t;
        auto right = a.rightCols(m);
        Vector<Scalar> s = right * u;
        right.noalias() -= (tau * s) * u.adjoint();
        a(k + 1, k) = beta;
        a.col(k).tail(m - 1).setZero();
    }
}

[[noreturn]] void throw_no_convergence(const char* what, Eigen::Index n, std::size_t sweeps,
                                       Eigen::Index lo, Eigen::Index hi) {
    throw NumericError(std::string(what) + ": QR iteration did not converge (n=" + std::to_string(n) +
                       ", sweeps=" + std::to_string(sweeps) + ", active window [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "])");
}

// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
// 1-based indexing internally to mirror the classic EISPACK formulation.
std::vector<Complex> real_hessenberg_qr(Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& h,
                                       QrOptions options) {
    const int n = static_cast<int>(h.rows());
    auto a = [&h](int i, int j) -> double& { return h(i - 1, j - 1); };
    std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);
    const std::size_t sweep_cap = options.sweeps_per_dimension * static_cast<std::size_t>(std::max(n, 1));
    std::size_t sweeps = 0;

    double anorm = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

    int nn = n;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
    while (nn >= 1) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 2; --l) {
                s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= kEps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 1) l = 1;
            x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                --nn;
            } else {
                y = a(nn - 1, nn - 1);
                w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + std::copysign(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if (++sweeps > sweep_cap || its == 60) throw_no_convergence("real eigenvalues", n, sweeps, l, nn);
                    if (its == 10 || its == 20) {
                        // exceptional shift
                        t += x;
                        for (int i = 1; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= kEps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = std::copysign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
    return out;
}

// Givens rotation G = [c s; -conj(s) c] with G [a; b] = [rho; 0].
struct Givens {
    double c;
    Complex s;
};

Givens make_givens(Complex a, Complex b) {
    const double abs_a = std::abs(a);
    const double rho = std::hypot(abs_a, std::abs(b));
    if (rho == 0.0) return {1.0, Complex{}};
    if (abs_a == 0.0) return {0.0, Complex{1.0, 0.0}};
    return {abs_a / rho, (a / abs_a) * std::conj(b) / rho};
}

double abs1(const Complex& x) { return std::abs(x.real()) + std::abs(x.imag()); }

// Single-shift complex QR on an upper Hessenberg matrix, eigenvalues only.
std::vector<Complex> complex_hessenberg_qr(Eigen::MatrixXcd& h, QrOptions options) {
    const Eigen::Index n = h.rows();
    std::vector<Complex> eig(static_cast<std::size_t>(n));
    std::vector<Givens> rot(static_cast<std::size_t>(n));
    const std::size_t sweep_cap = options.sweeps_per_dimension * static_cast<std::size_t>(std::max<Eigen::Index>(n, 1));
    std::size_t sweeps = 0;
    double hnorm = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= std::min(j + 1, n - 1); ++i) hnorm += abs1(h(i, j));

    Eigen::Index hi = n - 1;
    int its = 0;
    while (hi >= 0) {
        Eigen::Index l = hi;
        for (; l > 0; --l) {
            double s = abs1(h(l - 1, l - 1)) + abs1(h(l, l));
            if (s == 0.0) s = hnorm;
            if (abs1(h(l, l - 1)) <= kEps * s) {
                h(l, l - 1) = Complex{};
                break;
            }
        }
        if (l == hi) {
            eig[static_cast<std::size_t>(hi)] = h(hi, hi);
            --hi;
            its = 0;
            continue;
        }
        if (++sweeps > sweep_cap || its == 60) throw_no_convergence("complex eigenvalues", n, sweeps, l, hi);

        Complex mu;
        if (its == 10 || its == 20) {
            mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1).real());
        } else {
            // Wilkinson shift: eigenvalue of the trailing 2x2 block closer to h(hi, hi).
            const Complex a = h(hi - 1, hi - 1);
            const Complex b = h(hi - 1, hi);
            const Complex c = h(hi, hi - 1);
            const Complex d = h(hi, hi);
            const Complex half = 0.5 * (a - d);
            const Complex root = std::sqrt(half * half + b * c);
            const Complex denom = std::abs(half + root) >= std::abs(half - root) ? half + root : half - root;
            mu = denom == Complex{} ? d : d - b * c / denom;
        }
        ++its;

        for (Eigen::Index k = l; k <= hi; ++k) h(k, k) -= mu;
        for (Eigen::Index k = l; k < hi; ++k) {
            const Givens g = make_givens(h(k, k), h(k + 1, k));
            rot[static_cast<std::size_t>(k)] = g;
            for (Eigen::Index j = k; j <= hi; ++j) {
                const Complex x = h(k, j);
                const Complex y = h(k + 1, j);
                h(k, j) = g.c * x + g.s * y;
                h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
            }
        }
        for (Eigen::Index k = l; k < hi; ++k) {
            const Givens& g = rot[static_cast<std::size_t>(k)];
            const Eigen::Index last = std::min(k + 2, hi);
            for (Eigen::Index i = l; i <= last; ++i) {
                const Complex x = h(i, k);
                const Complex y = h(i, k + 1);
                h(i, k) = x * g.c + y * std::conj(g.s);
                h(i, k + 1) = -x * g.s + y * g.c;
            }
        }
        for (Eigen::Index k = l; k <= hi; ++k) h(k, k) += mu;
    }
    return eig;
}

}  // namespace

Eigen::VectorXd tridiagonal_eigenvalues(Eigen::VectorXd d, Eigen::VectorXd offdiag) {
    const Eigen::Index n = d.size();
    if (n == 0) return d;
    if (offdiag.size() != n - 1) throw UsageError("tridiagonal eigenvalues: offdiagonal must have n-1 entries");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e.head(n - 1) = offdiag;
    for (Eigen::Index l = 0; l < n; ++l) {
        int iter = 0;
        Eigen::Index m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d(m)) + std::abs(d(m + 1));
                if (std::abs(e(m)) <= kEps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) {
                    throw NumericError("tridiagonal QL did not converge at index " + std::to_string(l));
                }
                double g = (d(l + 1) - d(l)) / (2.0 * e(l));
                double r = std::hypot(g, 1.0);
                g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                Eigen::Index i = m - 1;
                bool underflow = false;
                for (; i >= l; --i) {
                    const double f = s * e(i);
                    const double b = c * e(i);
                    r = std::hypot(f, g);
                    e(i + 1) = r;
                    if (r == 0.0) {
                        d(i + 1) -= p;
                        e(m) = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d(i + 1) - p;
                    r = (d(i) - g) * s + 2.0 * c * b;
                    p = s * r;
                    d(i + 1) = g + p;
                    g = c * r - b;
                }
                if (underflow) continue;
                d(l) -= p;
                e(l) = g;
                e(m) = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.data(), d.data() + n);
    return d;
}

Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd a) { return hermitian_eigs_impl<double>(std::move(a)); }

Eigen::VectorXd hermitian_eigenvalues(Eigen::MatrixXcd a) { return hermitian_eigs_impl<Complex>(std::move(a)); }

std::vector<Complex> general_eigenvalues(Eigen::MatrixXd a, QrOptions options) {
    if (a.rows() != a.cols()) throw UsageError("eigenvalues: matrix must be square");
    if (!a.allFinite()) throw NumericError("eigenvalues: non-finite entries");
    reduce_to_hessenberg<double>(a);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> h = a;
    return real_hessenberg_qr(h, options);
}

std::vector<Complex> general_eigenvalues(Eigen::MatrixXcd a, QrOptions options) {
    if (a.rows() != a.cols()) throw UsageError("eigenvalues: matrix must be square");
    if (!a.allFinite()) throw NumericError("eigenvalues: non-finite entries");
    reduce_to_hessenberg<Complex>(a);
    return complex_hessenberg_qr(a, options);
}

template <typename Scalar>
PivotedLu<Scalar>::PivotedLu(Matrix a) : lu_(std::move(a)) {
    const Eigen::Index n = lu_.rows();
    if (lu_.cols() != n) throw UsageError("LU: matrix must be square");
    perm_.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = k;
        lu_.col(k).tail(n - k).cwiseAbs().maxCoeff(&pivot);
        pivot += k;
        if (pivot != k) {
            lu_.row(k).swap(lu_.row(pivot));
            std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(pivot)]);
            sign_ = -sign_;
        }
        const Scalar piv = lu_(k, k);
        if (piv == Scalar(0)) {
            singular_ = true;
            continue;
        }
        const Eigen::Index rest = n - k - 1;
        if (rest == 0) continue;
        lu_.col(k).tail(rest) /= piv;
        lu_.bottomRightCorner(rest, rest).noalias() -= lu_.col(k).tail(rest) * lu_.row(k).tail(rest);
    }
}

template <typename Scalar>
typename PivotedLu<Scalar>::Vector PivotedLu<Scalar>::solve(const Vector& b) const {
    const Eigen::Index n = lu_.rows();
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = b(perm_[static_cast<std::size_t>(i)]);
    lu_.template triangularView<Eigen::UnitLower>().solveInPlace(x);
    lu_.template triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

template <typename Scalar>
typename PivotedLu<Scalar>::Vector PivotedLu<Scalar>::solve_adjoint(const Vector& b) const {
    // A^* = U^* L^* P, so solve U^* y = b, L^* w = y, x = P^T w.
    const Eigen::Index n = lu_.rows();
    Vector y = b;
    lu_.adjoint().template triangularView<Eigen::Lower>().solveInPlace(y);
    lu_.adjoint().template triangularView<Eigen::UnitUpper>().solveInPlace(y);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(perm_[static_cast<std::size_t>(i)]) = y(i);
    return x;
}

template <typename Scalar>
Scalar PivotedLu<Scalar>::determinant() const {
    Scalar det = lu_.diagonal().prod();
    return sign_ < 0 ? -det : det;
}

template class PivotedLu<double>;
template class PivotedLu<Complex>;

}  // namespace circulaw::dense
