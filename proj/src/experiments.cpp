#include "circulaw/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "circulaw/errors.hpp"
#include "circulaw/invertibility.hpp"
#include "circulaw/limit_theory.hpp"
#include "circulaw/linalg.hpp"
#include "circulaw/parallel.hpp"
#include "circulaw/spectral_measures.hpp"

namespace circulaw {

namespace {

constexpr std::uint64_t kSmoothingPurpose = 0x736d6f6f7468ULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct KindName {
    ExperimentKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::CircularLaw, "circular_law"}, {ExperimentKind::SvLaw, "sv_law"},
    {ExperimentKind::Potential, "potential"},      {ExperimentKind::MinSv, "min_sv"},
    {ExperimentKind::MaxSv, "max_sv"},             {ExperimentKind::TailIndex, "tail_index"},
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

ReportMetadata metadata_for(const ExperimentSpec& spec) {
    ReportMetadata m;
    m.kind = std::string(kind_name(spec.kind));
    m.spec_hash = spec_hash(spec);
    m.seed = spec.ensemble.master_seed;
    return m;
}

void require_kind(const ExperimentSpec& spec, ExperimentKind kind) {
    spec.validate();
    if (spec.kind != kind) {
        throw ConfigError("experiment kind '" + std::string(kind_name(spec.kind)) + "' passed to the '" +
                          std::string(kind_name(kind)) + "' runner");
    }
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    if (!text.empty() && text.front() == '+') ++first;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw ConfigError("cannot parse number '" + std::string(text) + "'");
    }
    return v;
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

/// Least-squares slope of ln y against ln x; NaN with fewer than two usable points.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0 && y[i] > 0 && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) return kNaN;
    const double k = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : kNaN;
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
    for (const auto& k : kKindNames)
        if (k.kind == kind) return k.name;
    return "unknown";
}

ExperimentKind kind_from_name(std::string_view name) {
    for (const auto& k : kKindNames)
        if (k.name == name) return k.kind;
    throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

double SmoothingRadius::resolve(std::size_t n, double p_n) const {
    return automatic ? 1.0 / std::sqrt(static_cast<double>(n) * p_n) : value;
}

void ExperimentSpec::validate() const {
    ensemble.validate();
    if (trials < 1) throw ConfigError("experiment: trials must be at least 1");
    const bool needs_z = kind == ExperimentKind::SvLaw || kind == ExperimentKind::Potential ||
                         kind == ExperimentKind::MinSv;
    if (needs_z && z_points.empty()) throw ConfigError("experiment: z_points must be nonempty for this kind");
    for (const auto& z : z_points)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ConfigError("experiment: non-finite z");
    if (!r.automatic && !(r.value >= 0.0 && std::isfinite(r.value))) throw ConfigError("experiment: r must be >= 0");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0)) throw ConfigError("experiment: thresholds must be positive");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1])) throw ConfigError("experiment: thresholds must ascend");
    }
    for (auto n : n_ladder) ensemble.resized(n).validate();
    if (!(b_exponent > 0.0) || !(c_cut > 0.0)) throw ConfigError("experiment: b_exponent and c_cut must be positive");
    if (!(outer_radius > 0.0)) throw ConfigError("experiment: outer_radius must be positive");
    if (kind == ExperimentKind::TailIndex) {
        if (!(q > 6.0)) throw ConfigError("experiment: q must exceed 6");
        if (!(R > 0.0)) throw ConfigError("experiment: R must be positive");
        if (ensemble.n < 2) throw ConfigError("experiment: tail_index needs n >= 2");
    }
    if (format && *format != "csv" && *format != "json") throw ConfigError("experiment: format must be csv or json");
}

std::vector<std::size_t> ExperimentSpec::dimensions() const {
    return n_ladder.empty() ? std::vector<std::size_t>{ensemble.n} : n_ladder;
}

nlohmann::json to_json(const ExperimentSpec& spec) {
    nlohmann::json zs = nlohmann::json::array();
    for (const auto& z : spec.z_points) zs.push_back({z.real(), z.imag()});
    nlohmann::json j = {
        {"kind", std::string(kind_name(spec.kind))},
        {"ensemble", to_json(spec.ensemble)},
        {"trials", spec.trials},
        {"z_points", zs},
        {"thresholds", spec.thresholds},
        {"n_ladder", spec.n_ladder},
        {"b_exponent", spec.b_exponent},
        {"c_cut", spec.c_cut},
        {"q", spec.q},
        {"R", spec.R},
        {"outer_radius", spec.outer_radius},
        {"output", spec.output},
    };
    if (spec.r.automatic) j["r"] = "auto";
    else j["r"] = spec.r.value;
    if (spec.format) j["format"] = *spec.format;
    return j;
}

ExperimentSpec experiment_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("experiment: expected a JSON object");
    static constexpr std::string_view allowed[] = {"kind",   "ensemble",   "trials", "z_points", "r",
                                                   "thresholds", "n_ladder", "b_exponent", "c_cut", "q",
                                                   "R",      "outer_radius", "output", "format"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(allowed), std::end(allowed), key) == std::end(allowed))
            throw ConfigError("experiment: unknown field '" + key + "'");
    }
    try {
        ExperimentSpec s;
        s.kind = kind_from_name(j.at("kind").get<std::string>());
        s.ensemble = ensemble_from_json(j.at("ensemble"));
        if (!j.at("trials").is_number_unsigned()) throw ConfigError("experiment: trials must be a positive integer");
        s.trials = j.at("trials").get<std::size_t>();
        if (j.contains("z_points")) {
            for (const auto& z : j.at("z_points")) {
                if (z.is_string()) s.z_points.push_back(parse_complex(z.get<std::string>()));
                else if (z.is_array() && z.size() == 2) s.z_points.emplace_back(z[0].get<double>(), z[1].get<double>());
                else if (z.is_number()) s.z_points.emplace_back(z.get<double>(), 0.0);
                else throw ConfigError("experiment: z_points entries must be [re, im], numbers or \"a+bi\"");
            }
        }
        if (j.contains("r")) {
            const auto& r = j.at("r");
            if (r.is_string()) {
                if (r.get<std::string>() != "auto") throw ConfigError("experiment: r must be a number or \"auto\"");
                s.r.automatic = true;
            } else {
                s.r.value = r.get<double>();
            }
        }
        if (j.contains("thresholds")) s.thresholds = j.at("thresholds").get<std::vector<double>>();
        if (j.contains("n_ladder")) s.n_ladder = j.at("n_ladder").get<std::vector<std::size_t>>();
        s.b_exponent = j.value("b_exponent", s.b_exponent);
        s.c_cut = j.value("c_cut", s.c_cut);
        s.q = j.value("q", s.q);
        s.R = j.value("R", s.R);
        s.outer_radius = j.value("outer_radius", s.outer_radius);
        s.output = j.value("output", std::string{});
        if (j.contains("format")) s.format = j.at("format").get<std::string>();
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment: ") + e.what());
    }
}

ExperimentSpec load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open spec file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("spec file '" + path + "': " + e.what());
    }
    return experiment_from_json(j);
}

std::string spec_hash(const ExperimentSpec& spec) {
    const std::string canonical = to_json(spec).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Complex parse_complex(std::string_view text) {
    if (text.empty()) throw ConfigError("empty complex number");
    if (text.back() != 'i') return {parse_double(text), 0.0};
    const std::string_view body = text.substr(0, text.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag_of = [](std::string_view s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return parse_double(s);
    };
    if (split == std::string_view::npos) return {0.0, imag_of(body)};
    return {parse_double(body.substr(0, split)), imag_of(body.substr(split))};
}

double sv_law_distance(const EnsembleConfig& config, Complex z, std::size_t trials, std::size_t threads) {
    std::vector<EmpiricalCDF> parts(trials);
    parallel_for(trials, worker_count(threads), [&](std::size_t t) {
        parts[t] = sv_squared_cdf(singular_values(shift(sample_matrix(config, t), z)));
    });
    const auto averaged = EmpiricalCDF::average(parts);
    const LimitLaw law(z);
    return ks_distance(averaged, [&law](double x) { return law.cdf(x); });
}

TailIndex tail_index(double delta, double q, std::size_t n) {
    if (n < 2) throw DomainError("tail_index: n must be at least 2");
    const double nn = static_cast<double>(n);
    const double raw = std::floor(std::pow(delta, (q + 6.0) / (2.0 * q)) * nn * std::log(nn));
    TailIndex out;
    if (!(raw >= 1.0)) {
        out.k1 = 1;
        out.clamped = true;
    } else if (raw >= nn) {
        out.k1 = n - 1;
        out.clamped = true;
    } else {
        out.k1 = static_cast<std::size_t>(raw);
    }
    return out;
}

ExperimentReport run_circular_law(const ExperimentSpec& spec, RunOptions options) {
    require_kind(spec, ExperimentKind::CircularLaw);
    const auto start = Clock::now();
    const auto& cfg = spec.ensemble;
    const double nn = static_cast<double>(cfg.n);
    const double outlier_radius = 1.0 + 3.0 * std::pow(nn, -0.25);

    struct TrialStats {
        bool ok = false;
        double radial = kNaN, angular = kNaN, outlier = kNaN, outer = kNaN;
        std::size_t count = 0;
    };
    std::vector<TrialStats> stats(spec.trials);
    parallel_for(spec.trials, worker_count(options.threads), [&](std::size_t t) {
        ComplexSpectrum spectrum;
        try {
            spectrum = eigenvalues(sample_matrix(cfg, t));
        } catch (const NumericError&) {
            return;
        }
        auto& s = stats[t];
        const auto [radial, angular] = radial_angular_cdfs(spectrum);
        auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
        s.radial = ks_distance(radial, uniform);
        s.angular = ks_distance(angular, uniform);
        std::size_t outliers = 0, outer = 0;
        for (const auto& l : spectrum.values) {
            const double a = std::abs(l);
            outliers += a > outlier_radius;
            outer += a > spec.outer_radius;
        }
        s.count = spectrum.values.size();
        s.outlier = static_cast<double>(outliers) / static_cast<double>(s.count);
        s.outer = static_cast<double>(outer) / static_cast<double>(s.count);
        s.ok = true;
    });

    ExperimentReport report(metadata_for(spec),
                            {"row", "trial", "n", "p_n", "trials", "included", "excluded", "radial_ks", "angular_ks",
                             "outlier_fraction", "outer_fraction", "eigenvalue_count"});
    std::vector<double> radial, angular, outlier, outer;
    for (std::size_t t = 0; t < spec.trials; ++t) {
        const auto& s = stats[t];
        report.add_row({std::string("trial"), as_int(t), as_int(cfg.n), cfg.p_n, std::int64_t{1},
                        std::int64_t{s.ok ? 1 : 0}, std::int64_t{s.ok ? 0 : 1}, s.radial, s.angular, s.outlier,
                        s.outer, as_int(s.count)});
        if (s.ok) {
            radial.push_back(s.radial);
            angular.push_back(s.angular);
            outlier.push_back(s.outlier);
            outer.push_back(s.outer);
        }
    }
    const auto included = radial.size();
    auto summary = [&](const std::vector<double>& v) {
        return v.empty() ? std::pair{kNaN, kNaN} : mean_with_jackknife(v);
    };
    const auto r = summary(radial), a = summary(angular), o = summary(outlier), u = summary(outer);
    const std::int64_t total = as_int(spec.trials), inc = as_int(included), exc = total - inc;
    report.add_row({std::string("mean"), std::int64_t{-1}, as_int(cfg.n), cfg.p_n, total, inc, exc, r.first, a.first,
                    o.first, u.first, as_int(cfg.n)});
    report.add_row({std::string("stderr"), std::int64_t{-1}, as_int(cfg.n), cfg.p_n, total, inc, exc, r.second,
                    a.second, o.second, u.second, as_int(cfg.n)});
    report.metadata().wall_time_seconds = seconds_since(start);
    return report;
}

ExperimentReport run_sv_law(const ExperimentSpec& spec, RunOptions options) {
    require_kind(spec, ExperimentKind::SvLaw);
    const auto start = Clock::now();
    const auto dims = spec.dimensions();
    ExperimentReport report(metadata_for(spec), {"z_re", "z_im", "n", "p_n", "trials", "included", "excluded",
                                                 "delta_n", "slope"});
    for (const auto& z : spec.z_points) {
        std::vector<double> ns, deltas;
        std::vector<double> p_values;
        for (auto n : dims) {
            const auto cfg = spec.ensemble.resized(n);
            ns.push_back(static_cast<double>(n));
            p_values.push_back(cfg.p_n);
            deltas.push_back(sv_law_distance(cfg, z, spec.trials, options.threads));
        }
        const double slope = log_log_slope(ns, deltas);
        for (std::size_t i = 0; i < dims.size(); ++i) {
            report.add_row({z.real(), z.imag(), as_int(dims[i]), p_values[i], as_int(spec.trials),
                            as_int(spec.trials), std::int64_t{0}, deltas[i], slope});
        }
    }
    report.metadata().wall_time_seconds = seconds_since(start);
    return report;
}

ExperimentReport run_potential(const ExperimentSpec& spec, RunOptions options) {
    require_kind(spec, ExperimentKind::Potential);
    const auto start = Clock::now();
    const auto& zs = spec.z_points;
    std::vector<double> disc(zs.size()), law(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        disc[i] = disc_potential(zs[i]);
        law[i] = potential_from_law(zs[i]);
    }
    ExperimentReport report(metadata_for(spec),
                            {"z_re", "z_im", "n", "p_n", "r", "trials", "included", "excluded", "estimate",
                             "std_error", "disc_potential", "law_potential", "gap_disc", "gap_law", "flagged"});
    for (auto n : spec.dimensions()) {
        const auto cfg = spec.ensemble.resized(n);
        const double r = spec.r.resolve(n, cfg.p_n);
        // spectra[i * trials + t]: point i, trial t.
        std::vector<SingularSpectrum> spectra(zs.size() * spec.trials);
        parallel_for(spec.trials, worker_count(options.threads), [&](std::size_t t) {
            auto sample = sample_matrix(cfg, t);
            if (r > 0.0) {
                auto stream = trial_stream(cfg, t, kSmoothingPurpose);
                sample = smoothing_shift(sample, r, stream);
            }
            for (std::size_t i = 0; i < zs.size(); ++i) spectra[i * spec.trials + t] = singular_values(shift(sample, zs[i]));
        });
        for (std::size_t i = 0; i < zs.size(); ++i) {
            std::span<const SingularSpectrum> slice(spectra.data() + i * spec.trials, spec.trials);
            double value = kNaN, se = kNaN;
            std::size_t excluded = spec.trials;
            bool flagged = false;
            try {
                const auto est = log_potential_empirical(slice, spec.b_exponent, spec.c_cut);
                value = est.value;
                se = est.std_error;
                excluded = est.truncation_count;
            } catch (const EstimationError&) {
                flagged = true;
            }
            report.add_row({zs[i].real(), zs[i].imag(), as_int(n), cfg.p_n, r, as_int(spec.trials),
                            as_int(spec.trials - excluded), as_int(excluded), value, se, disc[i], law[i],
                            std::abs(value - disc[i]), std::abs(value - law[i]), std::int64_t{flagged ? 1 : 0}});
        }
    }
    report.metadata().wall_time_seconds = seconds_since(start);
    return report;
}

ExperimentReport run_minsv(const ExperimentSpec& spec, RunOptions options) {
    require_kind(spec, ExperimentKind::MinSv);
    const auto start = Clock::now();
    ExperimentReport report(metadata_for(spec), {"n", "p_n", "z_re", "z_im", "threshold", "frequency", "trials",
                                                 "included", "excluded", "s1_violation_frequency"});
    for (auto n : spec.dimensions()) {
        const auto cfg = spec.ensemble.resized(n);
        auto thresholds = spec.thresholds;
        if (thresholds.empty()) thresholds.push_back(spec.c_cut / std::pow(static_cast<double>(n), spec.b_exponent));
        for (const auto& z : spec.z_points) {
            const auto table = min_sv_tail(cfg, z, spec.trials, thresholds, options.threads);
            for (std::size_t i = 0; i < table.thresholds.size(); ++i) {
                report.add_row({as_int(n), cfg.p_n, z.real(), z.imag(), table.thresholds[i], table.frequencies[i],
                                as_int(table.trials), as_int(table.trials), std::int64_t{0},
                                table.s1_violation_frequency});
            }
        }
    }
    report.metadata().wall_time_seconds = seconds_since(start);
    return report;
}

ExperimentReport run_maxsv(const ExperimentSpec& spec, RunOptions options) {
    require_kind(spec, ExperimentKind::MaxSv);
    const auto start = Clock::now();
    ExperimentReport report(metadata_for(spec),
                            {"n", "p_n", "threshold", "frequency", "trials", "included", "excluded", "max_s1"});
    for (auto n : spec.dimensions()) {
        const auto cfg = spec.ensemble.resized(n);
        std::vector<double> s1(spec.trials);
        parallel_for(spec.trials, worker_count(options.threads),
                     [&](std::size_t t) { s1[t] = operator_norm(sample_matrix(cfg, t)); });
        const double threshold = static_cast<double>(n) * std::sqrt(cfg.p_n);
        std::size_t hits = 0;
        double largest = 0.0;
        for (double s : s1) {
            hits += s >= threshold;
            largest = std::max(largest, s);
        }
        report.add_row({as_int(n), cfg.p_n, threshold,
                        static_cast<double>(hits) / static_cast<double>(spec.trials), as_int(spec.trials),
                        as_int(spec.trials), std::int64_t{0}, largest});
    }
    report.metadata().wall_time_seconds = seconds_since(start);
    return report;
}

ExperimentReport tail_index_check(const ExperimentSpec& spec, double q, double R, RunOptions options) {
    if (!(q > 6.0)) throw DomainError("tail_index_check: q must exceed 6");
    if (!(R > 0.0)) throw DomainError("tail_index_check: R must be positive");
    require_kind(spec, ExperimentKind::TailIndex);
    const auto start = Clock::now();
    const auto& cfg = spec.ensemble;
    const double delta = sv_law_distance(cfg, Complex{}, spec.trials, options.threads);
    const auto index = tail_index(delta, q, cfg.n);

    struct TrialStats {
        bool ok = false;
        double top = kNaN, kth = kNaN;
    };
    std::vector<TrialStats> stats(spec.trials);
    parallel_for(spec.trials, worker_count(options.threads), [&](std::size_t t) {
        ComplexSpectrum spectrum;
        try {
            spectrum = eigenvalues(sample_matrix(cfg, t));
        } catch (const NumericError&) {
            return;
        }
        std::vector<double> moduli;
        moduli.reserve(spectrum.values.size());
        for (const auto& l : spectrum.values) moduli.push_back(std::abs(l));
        std::sort(moduli.begin(), moduli.end(), std::greater<>());
        stats[t] = {true, moduli.front(), moduli[index.k1 - 1]};
    });

    ExperimentReport report(metadata_for(spec),
                            {"row", "trial", "n", "p_n", "q", "R", "delta_n", "k1", "clamped", "trials", "included",
                             "excluded", "abs_lambda_1", "abs_lambda_k1", "frequency"});
    const std::int64_t k1 = as_int(index.k1), clamped = index.clamped ? 1 : 0;
    std::size_t included = 0, exceed = 0;
    for (std::size_t t = 0; t < spec.trials; ++t) {
        const auto& s = stats[t];
        const bool hit = s.ok && s.kth > R;
        included += s.ok;
        exceed += hit;
        report.add_row({std::string("trial"), as_int(t), as_int(cfg.n), cfg.p_n, q, R, delta, k1, clamped,
                        std::int64_t{1}, std::int64_t{s.ok ? 1 : 0}, std::int64_t{s.ok ? 0 : 1}, s.top, s.kth,
                        s.ok ? (hit ? 1.0 : 0.0) : kNaN});
    }
    const double frequency = included ? static_cast<double>(exceed) / static_cast<double>(included) : kNaN;
    report.add_row({std::string("summary"), std::int64_t{-1}, as_int(cfg.n), cfg.p_n, q, R, delta, k1, clamped,
                    as_int(spec.trials), as_int(included), as_int(spec.trials - included), kNaN, kNaN, frequency});
    report.metadata().wall_time_seconds = seconds_since(start);
    return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, RunOptions options) {
    switch (spec.kind) {
        case ExperimentKind::CircularLaw: return run_circular_law(spec, options);
        case ExperimentKind::SvLaw: return run_sv_law(spec, options);
        case ExperimentKind::Potential: return run_potential(spec, options);
        case ExperimentKind::MinSv: return run_minsv(spec, options);
        case ExperimentKind::MaxSv: return run_maxsv(spec, options);
        case ExperimentKind::TailIndex: return tail_index_check(spec, spec.q, spec.R, options);
    }
    throw ConfigError("unknown experiment kind");
}

}  // namespace circulaw
