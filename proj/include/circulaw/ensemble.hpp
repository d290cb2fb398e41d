#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "circulaw/rng.hpp"
#include "json.hpp"

namespace circulaw {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

enum class DistributionTag {
    ComplexGaussian,
    RealGaussian,
    Rademacher,
    ComplexRademacher,
    UniformSymmetric,
    TwoPoint,
};

/// Law of a single matrix entry. Every variant has mean 0 and E|X|^2 = 1;
/// complex variants have independent real and imaginary parts of variance 1/2.
class EntryDistribution {
public:
    static EntryDistribution complex_gaussian() { return EntryDistribution{DistributionTag::ComplexGaussian}; }
    static EntryDistribution real_gaussian() { return EntryDistribution{DistributionTag::RealGaussian}; }
    static EntryDistribution rademacher() { return EntryDistribution{DistributionTag::Rademacher}; }
    static EntryDistribution complex_rademacher() { return EntryDistribution{DistributionTag::ComplexRademacher}; }
    /// Uniform on [-sqrt(3), sqrt(3)].
    static EntryDistribution uniform_symmetric() { return EntryDistribution{DistributionTag::UniformSymmetric}; }
    /// Takes value `a` with probability `p` and -a p/(1-p) otherwise.
    /// Throws ConfigError unless a^2 p/(1-p) = 1 (unit variance).
    static EntryDistribution two_point(double a, double p);
    /// The positive-atom TwoPoint law with P{X = a} = p, a = sqrt((1-p)/p).
    static EntryDistribution two_point_from_p(double p);

    DistributionTag tag() const noexcept { return tag_; }
    bool is_real() const noexcept;
    bool is_discrete() const noexcept;

    /// Atoms and their masses for discrete variants; empty for continuous ones.
    std::vector<std::pair<Complex, double>> atoms() const;

    /// Only meaningful for TwoPoint.
    double two_point_a() const noexcept { return a_; }
    double two_point_p() const noexcept { return p_; }

    /// Canonical tag string used in JSON ("real_gaussian", "two_point", ...).
    std::string_view tag_name() const noexcept;
    static EntryDistribution from_tag_name(std::string_view name);

    friend bool operator==(const EntryDistribution&, const EntryDistribution&) = default;

private:
    explicit EntryDistribution(DistributionTag tag) : tag_(tag) {}

    DistributionTag tag_;
    double a_ = 0.0;
    double p_ = 0.0;
};

/// One draw from `dist`.
Complex draw_entry(const EntryDistribution& dist, Stream& stream);

/// Recipe for one random-matrix law: X = (eps_jk X_jk) / sqrt(n p_n).
struct EnsembleConfig {
    std::size_t n = 1;
    double p_n = 1.0;
    EntryDistribution dist = EntryDistribution::real_gaussian();
    std::uint64_t master_seed = 0;
    /// Sparsity exponent when p_n was derived as n^{-(1-theta)}.
    std::optional<double> theta;

    /// Config with p_n = n^{-(1-theta)}.
    static EnsembleConfig with_theta(std::size_t n, double theta, EntryDistribution dist,
                                     std::uint64_t seed);

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    /// The same law at a different dimension; p_n follows theta when present.
    EnsembleConfig resized(std::size_t new_n) const;

    friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

nlohmann::json to_json(const EnsembleConfig& config);
/// Strict parse: unknown fields and ill-typed values raise ConfigError.
EnsembleConfig ensemble_from_json(const nlohmann::json& j);

struct Smoothing {
    double r = 0.0;
    Complex xi{};
};

/// An immutable matrix draw plus the transformations applied to it.
class MatrixSample {
public:
    /// Wraps an arbitrary square matrix (no ensemble provenance).
    explicit MatrixSample(ComplexMatrix entries);
    MatrixSample(ComplexMatrix entries, EnsembleConfig config, std::size_t trial_index);

    const ComplexMatrix& entries() const noexcept { return entries_; }
    std::size_t n() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const std::optional<EnsembleConfig>& config() const noexcept { return config_; }
    std::size_t trial_index() const noexcept { return trial_; }
    const std::optional<Complex>& applied_shift() const noexcept { return shift_; }
    const std::optional<Smoothing>& applied_smoothing() const noexcept { return smoothing_; }
    /// Sparsity parameter of the source law, 1 without provenance.
    double p_n() const noexcept { return config_ ? config_->p_n : 1.0; }

    /// True when every entry has a zero imaginary part.
    bool is_real() const noexcept;

    /// Copy with entries replaced by `entries - diag` and metadata updated.
    MatrixSample with_diagonal_shift(Complex diag, std::optional<Complex> shift,
                                     std::optional<Smoothing> smoothing) const;

private:
    ComplexMatrix entries_;
    std::optional<EnsembleConfig> config_;
    std::size_t trial_ = 0;
    std::optional<Complex> shift_;
    std::optional<Smoothing> smoothing_;
};

/// Entry (j, k) of trial t is eps_jk X_jk / sqrt(n p_n), drawn from a stream
/// keyed by (master_seed, t, j, k) only.
MatrixSample sample_matrix(const EnsembleConfig& config, std::size_t trial_index);

/// Stream for trial-level randomness that is not an entry (e.g. the smoothing xi).
Stream trial_stream(const EnsembleConfig& config, std::size_t trial_index, std::uint64_t purpose);

/// X - r xi I with one xi uniform on the unit disc. Throws UsageError on a
/// sample that is already smoothed and DomainError for r < 0.
MatrixSample smoothing_shift(const MatrixSample& sample, double r, Stream& stream);

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Estimate of E|X|^2 (ln(1+|X|))^{19+eta}. Exact for atomic laws; Monte
/// Carlo with `m` draws otherwise.
MomentEstimate log_moment_estimate(const EntryDistribution& dist, std::size_t m, double eta,
                                   std::uint64_t seed = 0x5eed);

}  // namespace circulaw
