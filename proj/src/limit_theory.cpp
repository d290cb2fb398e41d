#include "circulaw/limit_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "circulaw/dense_eigen.hpp"
#include "circulaw/errors.hpp"
#include "circulaw/quadrature.hpp"

namespace circulaw {

namespace {

// Panel layout in the angle variable of x = lo + (x1 - lo)(1 - cos theta)/2.
constexpr int kUniformPanels = 24;
constexpr int kGradedLevels = 14;
constexpr double kGradingRatio = 0.3;

template <typename T>
Complex cubic_value(Complex y, T x, double t) {
    return ((y - Complex(x)) * y + (1.0 - t)) * y + Complex(x) * t;
}

template <typename T>
Complex cubic_derivative(Complex y, T x, double t) {
    return (3.0 * y - 2.0 * Complex(x)) * y + (1.0 - t);
}

template <typename T>
Complex newton_polish(Complex y, T x, double t) {
    const Complex d = cubic_derivative(y, x, t);
    if (std::abs(d) == 0.0) return y;
    const Complex next = y - cubic_value(y, x, t) / d;
    // keep the polish only if it does not make things worse
    return std::abs(cubic_value(next, x, t)) <= std::abs(cubic_value(y, x, t)) ? next : y;
}

}  // namespace

SupportEndpoints support_endpoints(Complex z) {
    const double t = std::norm(z);
    const double base = (5.0 + 2.0 * t) / 2.0;
    // ((1 + 8t)^{3/2} - 1) / (8t), with its series below |z| = 1e-4
    double ratio_minus;
    if (t < 1e-8) {
        ratio_minus = 1.5 + 3.0 * t - 4.0 * t * t;
    } else {
        ratio_minus = std::expm1(1.5 * std::log1p(8.0 * t)) / (8.0 * t);
    }
    SupportEndpoints e;
    e.x1_squared = base + ratio_minus;
    e.x1 = std::sqrt(e.x1_squared);
    if (t == 0.0) {
        e.x2_squared = -std::numeric_limits<double>::infinity();
    } else {
        e.x2_squared = base - (std::pow(1.0 + 8.0 * t, 1.5) + 1.0) / (8.0 * t);
    }
    if (t >= 1.0) e.x2 = std::sqrt(std::max(e.x2_squared, 0.0));
    return e;
}

double cubic_discriminant(double x, Complex z) {
    const double t = std::norm(z);
    const double b = -x;
    const double c = 1.0 - t;
    const double d = x * t;
    return 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d;
}

std::array<Complex, 3> cubic_roots(double x, Complex z) {
    const double t = std::norm(z);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(3, 3);
    companion(0, 0) = x;
    companion(0, 1) = -(1.0 - t);
    companion(0, 2) = -x * t;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    const auto eig = dense::general_eigenvalues(companion);
    std::array<Complex, 3> roots{eig[0], eig[1], eig[2]};
    const double disc = cubic_discriminant(x, z);
    if (disc >= 0.0) {
        for (auto& r : roots) {
            r = Complex(r.real(), 0.0);
            r = Complex(newton_polish(r, x, t).real(), 0.0);
        }
        std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
        return roots;
    }
    // one real root (smallest |Im|) and a conjugate pair
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) { return std::abs(a.imag()) < std::abs(b.imag()); });
    Complex real_root = Complex(roots[0].real(), 0.0);
    real_root = Complex(newton_polish(real_root, x, t).real(), 0.0);
    Complex upper = roots[1].imag() > 0.0 ? roots[1] : roots[2];
    const Complex lower = roots[1].imag() > 0.0 ? roots[2] : roots[1];
    upper = 0.5 * (upper + std::conj(lower));
    upper = newton_polish(upper, x, t);
    if (upper.imag() < 0.0) upper = std::conj(upper);
    return {real_root, upper, std::conj(upper)};
}

std::array<Complex, 3> cubic_roots(Complex x, Complex z) {
    if (x.imag() == 0.0) return cubic_roots(x.real(), z);
    const double t = std::norm(z);
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(3, 3);
    companion(0, 0) = x;
    companion(0, 1) = -(1.0 - t);
    companion(0, 2) = -x * t;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    const auto eig = dense::general_eigenvalues(companion);
    std::array<Complex, 3> roots{};
    for (std::size_t i = 0; i < 3; ++i) roots[i] = newton_polish(eig[i], x, t);
    return roots;
}

double stieltjes_residual(Complex s, Complex alpha, Complex z) {
    const Complex y = s + alpha;
    return std::abs(s + y / (y * y - std::norm(z)));
}

Complex limit_stieltjes(Complex alpha, Complex z) {
    if (!(alpha.imag() > 0.0)) throw DomainError("limit_stieltjes: need Im(alpha) > 0");
    const auto roots = cubic_roots(alpha, z);
    int found = 0;
    Complex chosen{};
    for (const auto& y : roots) {
        const Complex s = y - alpha;
        if (s.imag() > 1e-12) {
            ++found;
            chosen = s;
        }
    }
    if (found != 1) {
        throw NumericError("limit_stieltjes: expected exactly one root with Im S > 0, found " + std::to_string(found) +
                           " at alpha=(" + std::to_string(alpha.real()) + "," + std::to_string(alpha.imag()) + ")");
    }
    return chosen;
}

double limit_density(double x, Complex z) {
    const double ax = std::abs(x);
    if (cubic_discriminant(ax, z) >= 0.0) return 0.0;
    const auto roots = cubic_roots(ax, z);
    return std::max(roots[1].imag(), 0.0) / std::numbers::pi;
}

double disc_potential(Complex z) {
    const double r = std::abs(z);
    return r <= 1.0 ? 0.5 * (1.0 - r * r) : -std::log(r);
}

double g_field(double s, double t) {
    const double rho2 = s * s + t * t;
    return rho2 > 1.0 ? 2.0 * s / rho2 : 2.0 * s;
}

LimitLaw::LimitLaw(Complex z) : z_(z), ends_(support_endpoints(z)) {
    lo_ = ends_.x2.value_or(0.0);
    breaks_ = quad::graded_breakpoints(0.0, std::numbers::pi, kUniformPanels, kGradedLevels, kGradingRatio, true, true);
    auto integrand = [this](double theta) { return density(x_of(theta)) * jacobian(theta); };
    const auto panels = quad::panel_integrals(integrand, breaks_);
    cumulative_.assign(breaks_.size(), 0.0);
    for (std::size_t i = 0; i < panels.size(); ++i) cumulative_[i + 1] = cumulative_[i] + panels[i];
    const auto mass = quad::composite(integrand, breaks_);
    half_mass_ = mass.value;
    half_mass_error_ = mass.error;

    auto log_integrand = [this](double theta) {
        const double x = x_of(theta);
        if (x <= 0.0) return 0.0;
        return std::log(x) * density(x) * jacobian(theta);
    };
    const auto pot = quad::composite(log_integrand, breaks_);
    potential_ = -2.0 * pot.value;
    potential_error_ = 2.0 * pot.error;
}

double LimitLaw::x_of(double theta) const {
    return lo_ + (ends_.x1 - lo_) * 0.5 * (1.0 - std::cos(theta));
}

double LimitLaw::jacobian(double theta) const { return (ends_.x1 - lo_) * 0.5 * std::sin(theta); }

double LimitLaw::theta_of(double t) const {
    const double u = std::clamp(1.0 - 2.0 * (t - lo_) / (ends_.x1 - lo_), -1.0, 1.0);
    return std::acos(u);
}

double LimitLaw::half_integral(double t) const {
    if (t <= lo_) return 0.0;
    if (t >= ends_.x1) return half_mass_;
    const double theta = theta_of(t);
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), theta);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breaks_.begin() - 1, 0));
    const double start = breaks_[k];
    if (theta <= start) return cumulative_[k];
    const double partial = quad::fine_rule().integrate(
        [this](double th) { return density(x_of(th)) * jacobian(th); }, start, theta);
    return cumulative_[k] + partial;
}

double LimitLaw::symmetric_cdf(double x) const {
    const double h = std::min(half_integral(std::abs(x)), 0.5);
    return x >= 0.0 ? 0.5 + h : 0.5 - h;
}

double LimitLaw::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return std::min(2.0 * half_integral(std::sqrt(x)), 1.0);
}

void LimitLaw::write_table(std::span<const double> grid, std::ostream& out) const {
    out << "x,density,cdf\n";
    char buf[96];
    for (double x : grid) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, density(x), symmetric_cdf(x));
        out << buf;
    }
}

double limit_cdf(double x, Complex z) { return LimitLaw(z).cdf(x); }

double potential_from_law(Complex z) {
    const LimitLaw law(z);
    if (law.potential_error() > 1e-4) {
        throw NumericError("potential_from_law: quadrature error estimate " + std::to_string(law.potential_error()) +
                           " exceeds 1e-4");
    }
    return law.potential();
}

}  // namespace circulaw
