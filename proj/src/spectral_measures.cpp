#include "circulaw/spectral_measures.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "circulaw/errors.hpp"

namespace circulaw {

EmpiricalCDF::EmpiricalCDF(std::vector<double> points) {
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(points.size());
    const double w = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
    for (double p : points) atoms.emplace_back(p, w);
    finalize(std::move(atoms));
}

EmpiricalCDF::EmpiricalCDF(std::vector<double> points, std::vector<double> weights) {
    if (points.size() != weights.size()) throw UsageError("EmpiricalCDF: points and weights differ in length");
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw DomainError("EmpiricalCDF: negative weight");
        if (weights[i] > 0.0) atoms.emplace_back(points[i], weights[i]);
    }
    finalize(std::move(atoms));
}

void EmpiricalCDF::finalize(std::vector<std::pair<double, double>> atoms) {
    for (const auto& a : atoms)
        if (!std::isfinite(a.first)) throw DomainError("EmpiricalCDF: non-finite support point");
    std::sort(atoms.begin(), atoms.end());
    support_.clear();
    weights_.clear();
    for (const auto& [x, w] : atoms) {
        if (!support_.empty() && support_.back() == x) {
            weights_.back() += w;
        } else {
            support_.push_back(x);
            weights_.push_back(w);
        }
    }
    const double total = pairwise_sum(weights_);
    if (!weights_.empty() && total <= 0.0) throw DomainError("EmpiricalCDF: total weight must be positive");
    for (double& w : weights_) w /= total;
    cumulative_.resize(weights_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        acc += weights_[i];
        cumulative_[i] = acc;
    }
    if (!cumulative_.empty()) cumulative_.back() = 1.0;
}

double EmpiricalCDF::operator()(double x) const {
    const auto it = std::upper_bound(support_.begin(), support_.end(), x);
    if (it == support_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double EmpiricalCDF::left_limit(double x) const {
    const auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double EmpiricalCDF::mean() const {
    std::vector<double> terms(support_.size());
    for (std::size_t i = 0; i < support_.size(); ++i) terms[i] = support_[i] * weights_[i];
    return pairwise_sum(terms);
}

EmpiricalCDF EmpiricalCDF::average(std::span<const EmpiricalCDF> parts) {
    std::vector<double> points;
    std::vector<double> weights;
    for (const auto& part : parts) {
        points.insert(points.end(), part.support_.begin(), part.support_.end());
        for (double w : part.weights_) weights.push_back(w / static_cast<double>(parts.size()));
    }
    return EmpiricalCDF(std::move(points), std::move(weights));
}

void write_csv(const EmpiricalCDF& cdf, std::ostream& out) {
    out << "x,weight\n";
    char buf[64];
    for (std::size_t i = 0; i < cdf.support().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", cdf.support()[i], cdf.weights()[i]);
        out << buf;
    }
}

EmpiricalCDF read_cdf_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "x,weight") throw IoError("cdf csv: missing 'x,weight' header");
    std::vector<double> xs;
    std::vector<double> ws;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("no comma");
            std::size_t used = 0;
            xs.push_back(std::stod(line.substr(0, comma), &used));
            ws.push_back(std::stod(line.substr(comma + 1), &used));
        } catch (const std::exception&) {
            throw IoError("cdf csv: malformed line " + std::to_string(lineno));
        }
    }
    return EmpiricalCDF(std::move(xs), std::move(ws));
}

EmpiricalCDF sv_squared_cdf(const SingularSpectrum& s) {
    std::vector<double> sq(s.values.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = s.values[i] * s.values[i];
    return EmpiricalCDF(std::move(sq));
}

EmpiricalCDF symmetrize(const EmpiricalCDF& f) {
    std::vector<double> points;
    std::vector<double> weights;
    points.reserve(2 * f.support().size());
    weights.reserve(2 * f.support().size());
    for (std::size_t i = 0; i < f.support().size(); ++i) {
        const double x = f.support()[i];
        if (x < 0.0) throw DomainError("symmetrize: support must lie in [0, inf)");
        const double root = std::sqrt(x);
        points.push_back(root);
        weights.push_back(0.5 * f.weights()[i]);
        points.push_back(-root);
        weights.push_back(0.5 * f.weights()[i]);
    }
    return EmpiricalCDF(std::move(points), std::move(weights));
}

Complex stieltjes_empirical(const SingularSpectrum& s, Complex alpha) {
    if (!(alpha.imag() > 0.0)) throw DomainError("stieltjes_empirical: need Im(alpha) > 0");
    if (s.values.empty()) throw DomainError("stieltjes_empirical: empty spectrum");
    std::vector<double> re(s.values.size());
    std::vector<double> im(s.values.size());
    for (std::size_t j = 0; j < s.values.size(); ++j) {
        const Complex term = 1.0 / (s.values[j] - alpha) + 1.0 / (-s.values[j] - alpha);
        re[j] = term.real();
        im[j] = term.imag();
    }
    const double scale = 0.5 / static_cast<double>(s.values.size());
    return {scale * pairwise_sum(re), scale * pairwise_sum(im)};
}

Complex stieltjes_squared(const SingularSpectrum& s, Complex w) {
    if (s.values.empty()) throw DomainError("stieltjes_squared: empty spectrum");
    std::vector<double> re(s.values.size());
    std::vector<double> im(s.values.size());
    for (std::size_t j = 0; j < s.values.size(); ++j) {
        const Complex term = 1.0 / (s.values[j] * s.values[j] - w);
        re[j] = term.real();
        im[j] = term.imag();
    }
    const double scale = 1.0 / static_cast<double>(s.values.size());
    return {scale * pairwise_sum(re), scale * pairwise_sum(im)};
}

double ks_distance(const EmpiricalCDF& f, const CdfFunction& g) {
    double sup = 0.0;
    for (double x : f.support()) {
        sup = std::max(sup, std::abs(f(x) - g(x)));
        const double below = std::nextafter(x, -std::numeric_limits<double>::infinity());
        sup = std::max(sup, std::abs(f.left_limit(x) - g(below)));
    }
    return sup;
}

double ks_distance(const EmpiricalCDF& f, const EmpiricalCDF& g) {
    double sup = 0.0;
    auto visit = [&](double x) {
        sup = std::max(sup, std::abs(f(x) - g(x)));
        sup = std::max(sup, std::abs(f.left_limit(x) - g.left_limit(x)));
    };
    for (double x : f.support()) visit(x);
    for (double x : g.support()) visit(x);
    return sup;
}

PotentialEstimate log_potential_empirical(std::span<const SingularSpectrum> spectra, double b_exponent,
                                          double c_cut) {
    if (spectra.empty()) throw DomainError("log_potential_empirical: no spectra");
    const auto& first = spectra.front();
    PotentialEstimate est;
    est.z = first.z;
    est.r = first.r;
    est.trials = spectra.size();
    std::vector<double> per_trial;
    per_trial.reserve(spectra.size());
    for (const auto& s : spectra) {
        if (s.z != first.z || s.r != first.r) throw DomainError("log_potential_empirical: spectra must share (z, r)");
        if (s.values.empty()) throw DomainError("log_potential_empirical: empty spectrum");
        const double n = static_cast<double>(s.values.size());
        const bool small_ok = s.values.back() >= c_cut / std::pow(n, b_exponent);
        const bool large_ok = s.values.front() <= n * std::sqrt(s.p_n);
        if (!small_ok || !large_ok) {
            ++est.truncation_count;
            continue;
        }
        std::vector<double> logs(s.values.size());
        for (std::size_t j = 0; j < logs.size(); ++j) logs[j] = std::log(s.values[j]);
        per_trial.push_back(-pairwise_sum(logs) / n);
    }
    if (per_trial.empty()) {
        throw EstimationError("log_potential_empirical: all " + std::to_string(spectra.size()) +
                              " trials excluded by the truncation filter");
    }
    const auto [mean, se] = mean_with_jackknife(per_trial);
    est.value = mean;
    est.std_error = se;
    return est;
}

std::pair<EmpiricalCDF, EmpiricalCDF> radial_angular_cdfs(const ComplexSpectrum& spectrum) {
    std::vector<double> radial;
    std::vector<double> angular;
    radial.reserve(spectrum.values.size());
    angular.reserve(spectrum.values.size());
    for (const Complex& l : spectrum.values) {
        radial.push_back(std::norm(l));
        double arg = std::atan2(l.imag(), l.real());
        if (arg < 0.0) arg += 2.0 * std::numbers::pi;
        double frac = arg / (2.0 * std::numbers::pi);
        if (frac >= 1.0) frac = 0.0;
        angular.push_back(frac);
    }
    return {EmpiricalCDF(std::move(radial)), EmpiricalCDF(std::move(angular))};
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::pair<double, double> mean_with_jackknife(std::span<const double> values) {
    const std::size_t m = values.size();
    if (m == 0) throw EstimationError("mean_with_jackknife: no values");
    const double total = pairwise_sum(values);
    const double mean = total / static_cast<double>(m);
    if (m == 1) return {mean, 0.0};
    std::vector<double> dev(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double loo = (total - values[i]) / static_cast<double>(m - 1);
        const double d = loo - mean;
        dev[i] = d * d;
    }
    const double var = static_cast<double>(m - 1) / static_cast<double>(m) * pairwise_sum(dev);
    return {mean, std::sqrt(var)};
}

}  // namespace circulaw
