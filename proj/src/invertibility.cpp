#include "circulaw/invertibility.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "circulaw/errors.hpp"
#include "circulaw/linalg.hpp"
#include "circulaw/parallel.hpp"
#include "circulaw/spectral_measures.hpp"

namespace circulaw {

namespace {

constexpr std::uint64_t kConcentrationPurpose = 0xc0c0;
constexpr std::uint64_t kSmallBallPurpose = 0x5b5b;

void check_unit(std::span<const Complex> x, const char* where) {
    if (x.empty()) throw DomainError(std::string(where) + ": empty vector");
    double sq = 0.0;
    for (const auto& v : x) sq += std::norm(v);
    if (std::abs(std::sqrt(sq) - 1.0) > 1e-10) throw DomainError(std::string(where) + ": vector must have unit norm");
}

struct Circle {
    Complex centre;
    double radius;
};

bool contains(const Circle& c, Complex p) { return std::abs(p - c.centre) <= c.radius * (1.0 + 1e-12) + 1e-15; }

// Smallest enclosing circle by brute force over pair and triple circles;
// only used for the handful of atoms of a discrete law.
double enclosing_radius(const std::vector<Complex>& pts) {
    if (pts.size() <= 1) return 0.0;
    std::vector<Circle> candidates;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            candidates.push_back({0.5 * (pts[i] + pts[j]), 0.5 * std::abs(pts[i] - pts[j])});
            for (std::size_t k = j + 1; k < pts.size(); ++k) {
                const Complex a = pts[i];
                const Complex b = pts[j] - a;
                const Complex c = pts[k] - a;
                const double d = 2.0 * (b.real() * c.imag() - b.imag() * c.real());
                if (d == 0.0) continue;
                const double bb = std::norm(b);
                const double cc = std::norm(c);
                const Complex centre{(c.imag() * bb - b.imag() * cc) / d, (b.real() * cc - c.real() * bb) / d};
                candidates.push_back({a + centre, std::abs(centre)});
            }
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        if (c.radius >= best) continue;
        if (std::all_of(pts.begin(), pts.end(), [&](Complex p) { return contains(c, p); })) best = c.radius;
    }
    return best;
}

}  // namespace

VectorClass classify_vector(std::span<const Complex> x, double delta, double rho) {
    check_unit(x, "classify_vector");
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("classify_vector: delta must lie in (0, 1]");
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("classify_vector: rho must lie in (0, 1)");
    const std::size_t n = x.size();
    const auto keep = static_cast<std::size_t>(std::floor(delta * static_cast<double>(n) + 1e-12));
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = std::norm(x[i]);
    // the best floor(delta n)-sparse approximation keeps the largest coordinates
    const std::size_t drop = n - std::min(keep, n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sq[a] < sq[b]; });
    std::vector<char> dropped(n, 0);
    for (std::size_t i = 0; i < drop; ++i) dropped[order[i]] = 1;
    double tail = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (dropped[i]) tail += sq[i];
    const double residual = std::sqrt(tail);
    VectorClass out{VectorClassTag::Sparse, delta, rho, residual};
    if (residual == 0.0) {
        out.tag = VectorClassTag::Sparse;
    } else if (residual <= rho) {
        out.tag = VectorClassTag::Compressible;
    } else {
        out.tag = VectorClassTag::Incompressible;
    }
    return out;
}

std::vector<std::size_t> spread_set(std::span<const Complex> x, double delta, double rho) {
    const auto cls = classify_vector(x, delta, rho);
    if (cls.tag != VectorClassTag::Incompressible) throw DomainError("spread_set: vector is not incompressible");
    const double n = static_cast<double>(x.size());
    const double lower = rho / std::sqrt(2.0 * n);
    const double upper = 1.0 / std::sqrt(n * delta / 2.0);
    std::vector<std::size_t> sigma;
    double mass = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = std::abs(x[k]);
        if (a >= lower && a <= upper) {
            sigma.push_back(k);
            mass += a * a;
        }
    }
    if (static_cast<double>(sigma.size()) < n * delta / 2.0 || mass < rho * rho / 2.0 * (1.0 - 1e-12)) {
        throw NumericError("spread_set: size or mass guarantee violated");
    }
    return sigma;
}

double max_window_fraction(std::vector<double> samples, double eta) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const double width = 2.0 * eta;
    std::size_t best = 0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < samples.size(); ++hi) {
        while (samples[hi] - samples[lo] > width) ++lo;
        best = std::max(best, hi - lo + 1);
    }
    return static_cast<double>(best) / static_cast<double>(samples.size());
}

double max_disc_fraction(std::span<const Complex> samples, double eta) {
    if (samples.empty()) return 0.0;
    if (eta <= 0.0) {
        // only coincident points can share a degenerate disc
        std::vector<std::pair<double, double>> pts;
        pts.reserve(samples.size());
        for (const auto& s : samples) pts.emplace_back(s.real(), s.imag());
        std::sort(pts.begin(), pts.end());
        std::size_t best = 1;
        std::size_t run = 1;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            run = pts[i] == pts[i - 1] ? run + 1 : 1;
            best = std::max(best, run);
        }
        return static_cast<double>(best) / static_cast<double>(samples.size());
    }
    const double pitch = eta / 2.0;
    const double row = pitch * std::sqrt(3.0) / 2.0;
    std::unordered_map<std::int64_t, std::uint32_t> counts;
    counts.reserve(samples.size() * 4);
    auto key = [](std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xffffffff); };
    for (const auto& p : samples) {
        const auto j0 = static_cast<std::int64_t>(std::floor((p.imag() - eta) / row));
        const auto j1 = static_cast<std::int64_t>(std::ceil((p.imag() + eta) / row));
        for (std::int64_t j = j0; j <= j1; ++j) {
            const double offset = (j & 1) ? pitch / 2.0 : 0.0;
            const auto i0 = static_cast<std::int64_t>(std::floor((p.real() - eta - offset) / pitch));
            const auto i1 = static_cast<std::int64_t>(std::ceil((p.real() + eta - offset) / pitch));
            for (std::int64_t i = i0; i <= i1; ++i) {
                const Complex centre{static_cast<double>(i) * pitch + offset, static_cast<double>(j) * row};
                if (std::abs(p - centre) <= eta) ++counts[key(i, j)];
            }
        }
    }
    std::uint32_t best = 0;
    for (const auto& [k, c] : counts) best = std::max(best, c);
    return static_cast<double>(best) / static_cast<double>(samples.size());
}

double concentration_Q(const EntryDistribution& dist, double eta, MonteCarloBudget budget) {
    if (!(eta >= 0.0)) throw DomainError("concentration_Q: eta must be >= 0");
    if (dist.is_discrete()) {
        const auto atoms = dist.atoms();
        double best = 0.0;
        const std::size_t subsets = std::size_t{1} << atoms.size();
        for (std::size_t mask = 1; mask < subsets; ++mask) {
            std::vector<Complex> pts;
            double mass = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (mask & (std::size_t{1} << i)) {
                    pts.push_back(atoms[i].first);
                    mass += atoms[i].second;
                }
            }
            if (mass > best && enclosing_radius(pts) <= eta * (1.0 + 1e-12)) best = mass;
        }
        return std::min(best, 1.0);
    }
    if (eta == 0.0) return 0.0;
    Stream s{derive_key(budget.seed, kConcentrationPurpose)};
    if (dist.is_real()) {
        std::vector<double> xs(budget.samples);
        for (auto& v : xs) v = draw_entry(dist, s).real();
        return max_window_fraction(std::move(xs), eta);
    }
    std::vector<Complex> xs(budget.samples);
    for (auto& v : xs) v = draw_entry(dist, s);
    return max_disc_fraction(xs, eta);
}

double small_ball(std::span<const Complex> x, const EntryDistribution& dist, double p_n, double eta,
                  std::size_t trials, std::uint64_t seed) {
    if (trials < 10000) throw DomainError("small_ball: need at least 1e4 trials");
    if (!(p_n > 0.0 && p_n <= 1.0)) throw DomainError("small_ball: p_n must lie in (0, 1]");
    if (!(eta >= 0.0)) throw DomainError("small_ball: eta must be >= 0");
    const bool real = dist.is_real() && std::all_of(x.begin(), x.end(), [](Complex v) { return v.imag() == 0.0; });
    std::vector<Complex> sums(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        Stream s{derive_key(seed, kSmallBallPurpose, t)};
        Complex acc{};
        for (const auto& xk : x) {
            if (p_n < 1.0 && !(s.uniform() < p_n)) continue;
            acc += xk * draw_entry(dist, s);
        }
        sums[t] = acc;
    }
    if (real) {
        std::vector<double> re(trials);
        for (std::size_t t = 0; t < trials; ++t) re[t] = sums[t].real();
        return max_window_fraction(std::move(re), eta);
    }
    return max_disc_fraction(sums, eta);
}

TailTable min_sv_tail(const EnsembleConfig& config, Complex z, std::size_t trials, std::vector<double> thresholds,
                      std::size_t threads) {
    if (trials < 50) throw DomainError("min_sv_tail: need at least 50 trials");
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) throw DomainError("min_sv_tail: thresholds must ascend");
    config.validate();
    std::vector<double> smallest(trials);
    std::vector<double> largest(trials);
    parallel_for(trials, worker_count(threads), [&](std::size_t t) {
        const auto s = singular_values(shift(sample_matrix(config, t), z));
        smallest[t] = s.values.back();
        largest[t] = s.values.front();
    });
    TailTable table;
    table.thresholds = std::move(thresholds);
    table.trials = trials;
    table.n = config.n;
    table.p_n = config.p_n;
    table.z = z;
    const double kn = table.k_factor * static_cast<double>(config.n) * std::sqrt(config.p_n);
    std::size_t violations = 0;
    for (double s1 : largest) violations += s1 > kn ? 1 : 0;
    table.s1_violation_frequency = static_cast<double>(violations) / static_cast<double>(trials);
    for (double threshold : table.thresholds) {
        std::size_t count = 0;
        for (std::size_t t = 0; t < trials; ++t) count += (smallest[t] <= threshold && largest[t] <= kn) ? 1 : 0;
        table.frequencies.push_back(static_cast<double>(count) / static_cast<double>(trials));
    }
    return table;
}

double largest_sv_frequency(const EnsembleConfig& config, std::size_t trials, double threshold, std::size_t threads) {
    config.validate();
    if (trials == 0) throw DomainError("largest_sv_frequency: need at least one trial");
    std::vector<char> hit(trials, 0);
    parallel_for(trials, worker_count(threads), [&](std::size_t t) {
        hit[t] = operator_norm(sample_matrix(config, t)) >= threshold ? 1 : 0;
    });
    const auto count = static_cast<double>(std::count(hit.begin(), hit.end(), 1));
    return count / static_cast<double>(trials);
}

double largest_sv_tail(const EnsembleConfig& config, std::size_t trials, std::size_t threads) {
    if (trials < 50) throw DomainError("largest_sv_tail: need at least 50 trials");
    return largest_sv_frequency(config, trials, static_cast<double>(config.n) * std::sqrt(config.p_n), threads);
}

void write_csv(const TailTable& table, std::ostream& out) {
    out << "threshold,frequency,trials,n,p_n,z_re,z_im\n";
    char buf[256];
    for (std::size_t i = 0; i < table.thresholds.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%zu,%.17g,%.17g,%.17g\n", table.thresholds[i],
                      table.frequencies[i], table.trials, table.n, table.p_n, table.z.real(), table.z.imag());
        out << buf;
    }
}

}  // namespace circulaw
