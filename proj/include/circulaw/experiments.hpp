#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circulaw/ensemble.hpp"
#include "circulaw/report.hpp"
#include "json.hpp"

namespace circulaw {

enum class ExperimentKind { CircularLaw, SvLaw, Potential, MinSv, MaxSv, TailIndex };

std::string_view kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(std::string_view name);

/// Smoothing radius: a fixed value or 1/sqrt(n p_n) resolved per dimension.
struct SmoothingRadius {
    bool automatic = false;
    double value = 0.0;

    double resolve(std::size_t n, double p_n) const;
    friend bool operator==(const SmoothingRadius&, const SmoothingRadius&) = default;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::CircularLaw;
    EnsembleConfig ensemble;
    std::size_t trials = 1;
    std::vector<Complex> z_points;
    SmoothingRadius r;
    /// MinSv thresholds; empty means the single threshold c_cut / n^b_exponent.
    std::vector<double> thresholds;
    /// Dimensions for SvLaw, MinSv and MaxSv; empty means {ensemble.n}.
    std::vector<std::size_t> n_ladder;
    double b_exponent = 3.0;
    double c_cut = 1.0;
    double q = 18.0;
    double R = 3.0;
    /// CircularLaw: radius for the outer-fraction statistic.
    double outer_radius = 1.15;
    std::string output;
    std::optional<std::string> format;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
    std::vector<std::size_t> dimensions() const;

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

nlohmann::json to_json(const ExperimentSpec& spec);
/// Strict parse: unknown fields and ill-typed values raise ConfigError.
ExperimentSpec experiment_from_json(const nlohmann::json& j);
ExperimentSpec load_experiment(const std::string& path);

/// 16 hex digits of FNV-1a over the canonical JSON of the spec.
std::string spec_hash(const ExperimentSpec& spec);

/// Parses "a+bi", "a-bi", "a", "bi" (no spaces).
Complex parse_complex(std::string_view text);

struct RunOptions {
    /// 0 = all hardware threads (still capped by CIRCULAW_THREADS).
    std::size_t threads = 0;
};

ExperimentReport run_circular_law(const ExperimentSpec& spec, RunOptions options = {});
ExperimentReport run_sv_law(const ExperimentSpec& spec, RunOptions options = {});
ExperimentReport run_potential(const ExperimentSpec& spec, RunOptions options = {});
ExperimentReport run_minsv(const ExperimentSpec& spec, RunOptions options = {});
ExperimentReport run_maxsv(const ExperimentSpec& spec, RunOptions options = {});
ExperimentReport tail_index_check(const ExperimentSpec& spec, double q, double R, RunOptions options = {});
/// Dispatches on spec.kind (TailIndex uses spec.q and spec.R).
ExperimentReport run_experiment(const ExperimentSpec& spec, RunOptions options = {});

/// Kolmogorov distance between the trial-averaged squared-sv CDF of X - zI
/// and the limit law, over trials 0..trials-1 of `config`.
double sv_law_distance(const EnsembleConfig& config, Complex z, std::size_t trials, std::size_t threads = 0);

struct TailIndex {
    std::size_t k1 = 1;
    bool clamped = false;
};

/// k1 = floor(delta^{(q+6)/(2q)} n ln n), clamped into [1, n-1].
TailIndex tail_index(double delta, double q, std::size_t n);

}  // namespace circulaw
