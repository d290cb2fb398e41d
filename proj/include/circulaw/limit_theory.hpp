#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace circulaw {

using Complex = std::complex<double>;

/// Support edges of the symmetrized limiting singular-value law.
struct SupportEndpoints {
    double x1 = 0.0;                ///< outer edge
    std::optional<double> x2;       ///< inner edge; engaged iff |z| >= 1 (0 at |z| = 1)
    double x1_squared = 0.0;
    double x2_squared = 0.0;        ///< negative for |z| < 1
};

SupportEndpoints support_endpoints(Complex z);

/// Roots of y^3 - x y^2 + (1 - |z|^2) y + x |z|^2. For real x the roots are
/// either all real or one real plus an exact conjugate pair.
std::array<Complex, 3> cubic_roots(double x, Complex z);

/// Same cubic with a complex parameter in place of x.
std::array<Complex, 3> cubic_roots(Complex x, Complex z);

/// Discriminant of the real cubic; > 0 three distinct real roots, < 0 one.
double cubic_discriminant(double x, Complex z);

/// The solution of S = -(S + alpha) / ((S + alpha)^2 - |z|^2) with Im S > 0.
/// Throws DomainError for Im(alpha) <= 0 and NumericError when the root is
/// not unique.
Complex limit_stieltjes(Complex alpha, Complex z);

/// |S + (S + alpha) / ((S + alpha)^2 - |z|^2)|.
double stieltjes_residual(Complex s, Complex alpha, Complex z);

/// Density of the symmetrized law at x: (1/pi) Im y where y is the root of
/// the cubic with positive imaginary part, 0 where all roots are real.
double limit_density(double x, Complex z);

/// Logarithmic potential of the uniform law on the unit disc.
double disc_potential(Complex z);

/// 2s/(s^2+t^2) outside the unit disc, 2s inside.
double g_field(double s, double t);

/// Limiting law at fixed z with cached cumulative tables. Immutable after
/// construction; safe to share between threads.
class LimitLaw {
public:
    explicit LimitLaw(Complex z);

    Complex z() const noexcept { return z_; }
    const SupportEndpoints& endpoints() const noexcept { return ends_; }
    double x1() const noexcept { return ends_.x1; }
    std::optional<double> x2() const noexcept { return ends_.x2; }

    /// Density of the symmetrized law.
    double density(double x) const { return limit_density(x, z_); }
    /// CDF of the symmetrized law.
    double symmetric_cdf(double x) const;
    /// CDF of the squared singular-value law: F(x) = 2 (symmetric_cdf(sqrt x) - 1/2).
    double cdf(double x) const;
    /// Total mass of the density (should be 1).
    double total_mass() const noexcept { return 2.0 * half_mass_; }
    /// Estimated quadrature error of total_mass().
    double mass_error() const noexcept { return 2.0 * half_mass_error_; }

    /// -int ln|x| density(x) dx, with its quadrature error estimate.
    double potential() const noexcept { return potential_; }
    double potential_error() const noexcept { return potential_error_; }

    /// CSV `x,density,cdf` (cdf of the symmetrized law) on the given grid.
    void write_table(std::span<const double> grid, std::ostream& out) const;

private:
    double theta_of(double t) const;
    double x_of(double theta) const;
    double jacobian(double theta) const;
    double half_integral(double t) const;

    Complex z_;
    SupportEndpoints ends_;
    double lo_ = 0.0;   // lower end of the half-line support
    std::vector<double> breaks_;
    std::vector<double> cumulative_;
    double half_mass_ = 0.0;
    double half_mass_error_ = 0.0;
    double potential_ = 0.0;
    double potential_error_ = 0.0;
};

/// F(x, z) of the squared singular values; builds a LimitLaw per call.
double limit_cdf(double x, Complex z);

/// -int ln|x| nu~(dx, z) by quadrature. Throws NumericError when the
/// estimated error exceeds 1e-4.
double potential_from_law(Complex z);

}  // namespace circulaw
