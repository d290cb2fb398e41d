#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "circulaw/linalg.hpp"

namespace circulaw {

/// Discrete probability measure on the real line, stored as sorted distinct
/// atoms with positive weights summing to one.
class EmpiricalCDF {
public:
    EmpiricalCDF() = default;
    /// Uniform weights 1/size; equal points are merged.
    explicit EmpiricalCDF(std::vector<double> points);
    /// Arbitrary nonnegative weights; normalized, zero weights dropped.
    EmpiricalCDF(std::vector<double> points, std::vector<double> weights);

    const std::vector<double>& support() const noexcept { return support_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    bool empty() const noexcept { return support_.empty(); }

    /// F(x) = mass of (-inf, x].
    double operator()(double x) const;
    /// F(x-) = mass of (-inf, x).
    double left_limit(double x) const;
    /// Mean of the measure.
    double mean() const;

    /// Equal-weight mixture of several CDFs (the trial average).
    static EmpiricalCDF average(std::span<const EmpiricalCDF> parts);

private:
    void finalize(std::vector<std::pair<double, double>> atoms);

    std::vector<double> support_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
};

/// CSV with header `x,weight`.
void write_csv(const EmpiricalCDF& cdf, std::ostream& out);
EmpiricalCDF read_cdf_csv(std::istream& in);

/// Atoms at s_j^2, weight 1/n each.
EmpiricalCDF sv_squared_cdf(const SingularSpectrum& s);

/// Push-forward under x -> +-sqrt(x) with half weight each. Throws DomainError
/// if some atom is negative.
EmpiricalCDF symmetrize(const EmpiricalCDF& f);

/// (1/2n) sum_j [(s_j - alpha)^{-1} + (-s_j - alpha)^{-1}]. Throws DomainError
/// unless Im(alpha) > 0.
Complex stieltjes_empirical(const SingularSpectrum& s, Complex alpha);

/// (1/n) sum_j (s_j^2 - w)^{-1}, the transform of the squared-sv measure.
Complex stieltjes_squared(const SingularSpectrum& s, Complex w);

/// Distribution function evaluated on the real line.
using CdfFunction = std::function<double(double)>;

/// sup_x |F(x) - G(x)|, checking both sides of every atom of F. G's left
/// limit is read as G(nextafter(x, -inf)).
double ks_distance(const EmpiricalCDF& f, const CdfFunction& g);
/// Kolmogorov distance between two step functions.
double ks_distance(const EmpiricalCDF& f, const EmpiricalCDF& g);

struct PotentialEstimate {
    Complex z{};
    double r = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    std::size_t truncation_count = 0;
};

/// Mean over trials of -(1/n) sum ln s_j, keeping only trials with
/// s_n >= c_cut / n^b_exponent and s_1 <= n sqrt(p_n). Throws EstimationError
/// when every trial is excluded.
PotentialEstimate log_potential_empirical(std::span<const SingularSpectrum> spectra, double b_exponent = 3.0,
                                          double c_cut = 1.0);

/// CDFs of |lambda|^2 and arg(lambda)/2pi with arg in [0, 2pi).
std::pair<EmpiricalCDF, EmpiricalCDF> radial_angular_cdfs(const ComplexSpectrum& spectrum);

/// Order-independent pairwise sum.
double pairwise_sum(std::span<const double> values);

/// Sample mean with its jackknife standard error.
std::pair<double, double> mean_with_jackknife(std::span<const double> values);

}  // namespace circulaw
