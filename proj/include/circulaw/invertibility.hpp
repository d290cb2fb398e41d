#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "circulaw/ensemble.hpp"

namespace circulaw {

enum class VectorClassTag { Sparse, Compressible, Incompressible };

/// Position of a unit vector relative to Sparse(delta): residual is the
/// exact Euclidean distance to the set of floor(delta n)-sparse vectors.
struct VectorClass {
    VectorClassTag tag = VectorClassTag::Sparse;
    double delta = 0.0;
    double rho = 0.0;
    double residual = 0.0;
};

/// Throws DomainError unless ||x|| = 1 within 1e-10, 0 < delta <= 1 and 0 < rho < 1.
VectorClass classify_vector(std::span<const Complex> x, double delta, double rho);

/// Indices k with rho/sqrt(2n) <= |x_k| <= 1/sqrt(n delta/2). Requires an
/// incompressible x; the result has at least n delta/2 elements carrying
/// squared mass at least rho^2/2 (checked, NumericError otherwise).
std::vector<std::size_t> spread_set(std::span<const Complex> x, double delta, double rho);

struct MonteCarloBudget {
    std::size_t samples = 200000;
    std::uint64_t seed = 1;
};

/// sup_u P{|X - u| <= eta}. Exact for atomic laws, Monte Carlo otherwise.
double concentration_Q(const EntryDistribution& dist, double eta, MonteCarloBudget budget = {});

/// Monte Carlo estimate of sup_u P{|sum_k x_k eps_k X_k - u| <= eta}.
/// Throws DomainError for fewer than 1e4 trials.
double small_ball(std::span<const Complex> x, const EntryDistribution& dist, double p_n, double eta,
                  std::size_t trials, std::uint64_t seed = 1);

/// Largest fraction of real samples inside a closed window of width 2 eta.
double max_window_fraction(std::vector<double> samples, double eta);
/// Largest fraction of complex samples inside a closed disc of radius eta
/// centred on a hexagonal lattice of pitch eta/2.
double max_disc_fraction(std::span<const Complex> samples, double eta);

/// Empirical tail of the smallest singular value, restricted to the event
/// s_1 <= K n sqrt(p_n).
struct TailTable {
    std::vector<double> thresholds;
    std::vector<double> frequencies;
    std::size_t trials = 0;
    std::size_t n = 0;
    double p_n = 1.0;
    Complex z{};
    double k_factor = 1.0;
    /// Frequency of s_1 > K n sqrt(p_n).
    double s1_violation_frequency = 0.0;
};

/// Throws DomainError for fewer than 50 trials or unsorted thresholds.
TailTable min_sv_tail(const EnsembleConfig& config, Complex z, std::size_t trials, std::vector<double> thresholds,
                      std::size_t threads = 0);

/// Frequency of s_1 >= threshold over `trials` draws of X (no shift).
double largest_sv_frequency(const EnsembleConfig& config, std::size_t trials, double threshold,
                            std::size_t threads = 0);

/// Frequency of s_1 >= n sqrt(p_n). Throws DomainError for fewer than 50 trials.
double largest_sv_tail(const EnsembleConfig& config, std::size_t trials, std::size_t threads = 0);

/// CSV `threshold,frequency,trials,n,p_n,z_re,z_im`.
void write_csv(const TailTable& table, std::ostream& out);

}  // namespace circulaw
