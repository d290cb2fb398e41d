#include "circulaw/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "circulaw/errors.hpp"

namespace circulaw {

namespace {

constexpr std::uint64_t kBernoulliSalt = 0xb3a1e5c4d2f60718ULL;

double log_moment_weight(double abs_x, double eta) {
    return abs_x * abs_x * std::pow(std::log1p(abs_x), 19.0 + eta);
}

}  // namespace

EntryDistribution EntryDistribution::two_point(double a, double p) {
    if (!(p > 0.0 && p < 1.0) || !std::isfinite(a) || a == 0.0) {
        throw ConfigError("two_point: need 0 < p < 1 and a != 0");
    }
    const double variance = a * a * p / (1.0 - p);
    if (std::abs(variance - 1.0) > 1e-12) {
        throw ConfigError("two_point: a^2 p / (1 - p) must equal 1 (got " + std::to_string(variance) + ")");
    }
    EntryDistribution d{DistributionTag::TwoPoint};
    d.a_ = a;
    d.p_ = p;
    return d;
}

EntryDistribution EntryDistribution::two_point_from_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("two_point: need 0 < p < 1");
    return two_point(std::sqrt((1.0 - p) / p), p);
}

bool EntryDistribution::is_real() const noexcept {
    return tag_ != DistributionTag::ComplexGaussian && tag_ != DistributionTag::ComplexRademacher;
}

bool EntryDistribution::is_discrete() const noexcept {
    return tag_ == DistributionTag::Rademacher || tag_ == DistributionTag::ComplexRademacher ||
           tag_ == DistributionTag::TwoPoint;
}

std::vector<std::pair<Complex, double>> EntryDistribution::atoms() const {
    const double h = std::numbers::sqrt2 / 2.0;
    switch (tag_) {
        case DistributionTag::Rademacher:
            return {{Complex{-1.0, 0.0}, 0.5}, {Complex{1.0, 0.0}, 0.5}};
        case DistributionTag::ComplexRademacher:
            return {{Complex{h, h}, 0.25}, {Complex{h, -h}, 0.25}, {Complex{-h, h}, 0.25}, {Complex{-h, -h}, 0.25}};
        case DistributionTag::TwoPoint:
            return {{Complex{a_, 0.0}, p_}, {Complex{-a_ * p_ / (1.0 - p_), 0.0}, 1.0 - p_}};
        default:
            return {};
    }
}

std::string_view EntryDistribution::tag_name() const noexcept {
    switch (tag_) {
        case DistributionTag::ComplexGaussian: return "complex_gaussian";
        case DistributionTag::RealGaussian: return "real_gaussian";
        case DistributionTag::Rademacher: return "rademacher";
        case DistributionTag::ComplexRademacher: return "complex_rademacher";
        case DistributionTag::UniformSymmetric: return "uniform_symmetric";
        case DistributionTag::TwoPoint: return "two_point";
    }
    return "unknown";
}

EntryDistribution EntryDistribution::from_tag_name(std::string_view name) {
    if (name == "complex_gaussian") return complex_gaussian();
    if (name == "real_gaussian") return real_gaussian();
    if (name == "rademacher") return rademacher();
    if (name == "complex_rademacher") return complex_rademacher();
    if (name == "uniform_symmetric") return uniform_symmetric();
    throw ConfigError("unknown distribution tag '" + std::string(name) + "'");
}

Complex draw_entry(const EntryDistribution& dist, Stream& stream) {
    const double h = std::numbers::sqrt2 / 2.0;
    switch (dist.tag()) {
        case DistributionTag::ComplexGaussian: {
            const double re = stream.normal();
            const double im = stream.normal();
            return {re * h, im * h};
        }
        case DistributionTag::RealGaussian:
            return {stream.normal(), 0.0};
        case DistributionTag::Rademacher:
            return {(stream() >> 63) ? 1.0 : -1.0, 0.0};
        case DistributionTag::ComplexRademacher: {
            const auto bits = stream();
            return {(bits >> 63) ? h : -h, ((bits >> 62) & 1U) ? h : -h};
        }
        case DistributionTag::UniformSymmetric:
            return {std::numbers::sqrt3 * (2.0 * stream.uniform() - 1.0), 0.0};
        case DistributionTag::TwoPoint: {
            const double p = dist.two_point_p();
            const double a = dist.two_point_a();
            return {stream.uniform() < p ? a : -a * p / (1.0 - p), 0.0};
        }
    }
    return {};
}

EnsembleConfig EnsembleConfig::with_theta(std::size_t n, double theta, EntryDistribution dist,
                                          std::uint64_t seed) {
    EnsembleConfig c;
    c.n = n;
    c.theta = theta;
    c.p_n = std::pow(static_cast<double>(n), -(1.0 - theta));
    c.dist = dist;
    c.master_seed = seed;
    c.validate();
    return c;
}

void EnsembleConfig::validate() const {
    if (n == 0) throw ConfigError("ensemble: n must be positive");
    if (!(p_n > 0.0 && p_n <= 1.0)) throw ConfigError("ensemble: p_n must lie in (0, 1]");
    if (theta) {
        if (!(*theta > 0.0 && *theta <= 1.0)) throw ConfigError("ensemble: theta must lie in (0, 1]");
        const double expected = std::pow(static_cast<double>(n), -(1.0 - *theta));
        if (std::abs(p_n - expected) > 1e-12 * expected) {
            throw ConfigError("ensemble: p_n inconsistent with theta (expected " + std::to_string(expected) + ")");
        }
    }
}

EnsembleConfig EnsembleConfig::resized(std::size_t new_n) const {
    EnsembleConfig c = *this;
    c.n = new_n;
    if (theta) c.p_n = std::pow(static_cast<double>(new_n), -(1.0 - *theta));
    c.validate();
    return c;
}

nlohmann::json to_json(const EnsembleConfig& config) {
    nlohmann::json params = nlohmann::json::object();
    if (config.dist.tag() == DistributionTag::TwoPoint) {
        params["a"] = config.dist.two_point_a();
        params["p"] = config.dist.two_point_p();
    }
    nlohmann::json j = {
        {"n", config.n},
        {"p_n", config.p_n},
        {"dist", {{"tag", std::string(config.dist.tag_name())}, {"params", params}}},
        {"master_seed", config.master_seed},
    };
    if (config.theta) j["theta"] = *config.theta;
    return j;
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError(std::string(where) + ": unknown field '" + key + "'");
    }
}

}  // namespace

EnsembleConfig ensemble_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("ensemble: expected a JSON object");
    reject_unknown(j, {"n", "p_n", "dist", "master_seed", "theta"}, "ensemble");
    try {
        EnsembleConfig c;
        if (!j.at("n").is_number_unsigned()) throw ConfigError("ensemble: n must be a positive integer");
        c.n = j.at("n").get<std::size_t>();
        c.p_n = j.at("p_n").get<double>();
        if (!j.at("master_seed").is_number_unsigned()) throw ConfigError("ensemble: master_seed must be unsigned");
        c.master_seed = j.at("master_seed").get<std::uint64_t>();
        const auto& dist = j.at("dist");
        if (!dist.is_object()) throw ConfigError("ensemble: dist must be an object");
        reject_unknown(dist, {"tag", "params"}, "ensemble.dist");
        const auto tag = dist.at("tag").get<std::string>();
        const auto params = dist.value("params", nlohmann::json::object());
        if (tag == "two_point") {
            reject_unknown(params, {"a", "p"}, "ensemble.dist.params");
            c.dist = EntryDistribution::two_point(params.at("a").get<double>(), params.at("p").get<double>());
        } else {
            if (!params.empty()) throw ConfigError("ensemble.dist.params: '" + tag + "' takes no parameters");
            c.dist = EntryDistribution::from_tag_name(tag);
        }
        if (j.contains("theta")) c.theta = j.at("theta").get<double>();
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("ensemble: ") + e.what());
    }
}

MatrixSample::MatrixSample(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw UsageError("MatrixSample: matrix must be square");
}

MatrixSample::MatrixSample(ComplexMatrix entries, EnsembleConfig config, std::size_t trial_index)
    : entries_(std::move(entries)), config_(std::move(config)), trial_(trial_index) {
    if (entries_.rows() != entries_.cols()) throw UsageError("MatrixSample: matrix must be square");
}

bool MatrixSample::is_real() const noexcept {
    return (entries_.imag().array() == 0.0).all();
}

MatrixSample MatrixSample::with_diagonal_shift(Complex diag, std::optional<Complex> shift,
                                               std::optional<Smoothing> smoothing) const {
    MatrixSample out = *this;
    if (diag != Complex{}) out.entries_.diagonal().array() -= diag;
    if (shift) out.shift_ = shift;
    if (smoothing) out.smoothing_ = smoothing;
    return out;
}

MatrixSample sample_matrix(const EnsembleConfig& config, std::size_t trial_index) {
    config.validate();
    const auto n = static_cast<Eigen::Index>(config.n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(config.n) * config.p_n);
    const bool dense = config.p_n == 1.0;
    ComplexMatrix m(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < n; ++j) {
            Stream s{derive_key(config.master_seed, trial_index, static_cast<std::uint64_t>(j),
                                static_cast<std::uint64_t>(k))};
            if (!dense) {
                Stream mask{s.key() ^ kBernoulliSalt};
                if (!(mask.uniform() < config.p_n)) {
                    m(j, k) = Complex{};
                    continue;
                }
            }
            m(j, k) = draw_entry(config.dist, s) * scale;
        }
    }
    return MatrixSample{std::move(m), config, trial_index};
}

Stream trial_stream(const EnsembleConfig& config, std::size_t trial_index, std::uint64_t purpose) {
    // Entry streams use (j, k) < n; the all-ones sentinel in j keeps these disjoint.
    return Stream{derive_key(config.master_seed, trial_index, ~std::uint64_t{0}, purpose)};
}

MatrixSample smoothing_shift(const MatrixSample& sample, double r, Stream& stream) {
    if (sample.applied_smoothing()) throw UsageError("smoothing_shift: sample is already smoothed");
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("smoothing_shift: r must be finite and >= 0");
    const Complex xi = stream.unit_disc();
    return sample.with_diagonal_shift(r * xi, std::nullopt, Smoothing{r, xi});
}

MomentEstimate log_moment_estimate(const EntryDistribution& dist, std::size_t m, double eta,
                                   std::uint64_t seed) {
    if (!(eta > 0.0)) throw DomainError("log_moment_estimate: eta must be positive");
    if (dist.is_discrete()) {
        double value = 0.0;
        for (const auto& [atom, mass] : dist.atoms()) value += mass * log_moment_weight(std::abs(atom), eta);
        return {value, 0.0};
    }
    if (m < 10000) throw DomainError("log_moment_estimate: need m >= 1e4 draws");
    Stream s{derive_key(seed, 0x10c, 0)};
    // Welford keeps the variance stable for the heavy right tail of the weight.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = log_moment_weight(std::abs(draw_entry(dist, s)), eta);
        const double delta = w - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (w - mean);
    }
    const double var = m2 / static_cast<double>(m - 1);
    return {mean, std::sqrt(var / static_cast<double>(m))};
}

}  // namespace circulaw
