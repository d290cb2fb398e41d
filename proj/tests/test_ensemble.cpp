#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <thread>

#include <Eigen/Eigenvalues>

#include "circulaw/ensemble.hpp"
#include "circulaw/errors.hpp"
#include "circulaw/rng.hpp"

using namespace circulaw;

namespace {

std::vector<EntryDistribution> shipped_laws() {
    return {EntryDistribution::complex_gaussian(), EntryDistribution::real_gaussian(),
            EntryDistribution::rademacher(),       EntryDistribution::complex_rademacher(),
            EntryDistribution::uniform_symmetric(), EntryDistribution::two_point(3.0, 0.1)};
}

struct Moments {
    double mean_re, mean_im, se_re, se_im, second, se_second;
};

Moments moments(const EntryDistribution& d, std::size_t m, std::uint64_t seed) {
    Stream s{derive_key(seed, 99)};
    double sr = 0, si = 0, srr = 0, sii = 0, s2 = 0, s4 = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const Complex x = draw_entry(d, s);
        const double a = std::norm(x);
        sr += x.real();
        si += x.imag();
        srr += x.real() * x.real();
        sii += x.imag() * x.imag();
        s2 += a;
        s4 += a * a;
    }
    const double k = static_cast<double>(m);
    Moments out;
    out.mean_re = sr / k;
    out.mean_im = si / k;
    out.se_re = std::sqrt(std::max(0.0, srr / k - out.mean_re * out.mean_re) / k);
    out.se_im = std::sqrt(std::max(0.0, sii / k - out.mean_im * out.mean_im) / k);
    out.second = s2 / k;
    out.se_second = std::sqrt(std::max(0.0, s4 / k - out.second * out.second) / k);
    return out;
}

bool bitwise_equal(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.data(), b.data(), sizeof(Complex) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("every shipped law has mean 0 and unit second moment within 5 sigma") {
    for (const auto& d : shipped_laws()) {
        CAPTURE(d.tag_name());
        const auto m = moments(d, 1000000, 17);
        CHECK(std::abs(m.mean_re) <= 5 * m.se_re + 1e-15);
        CHECK(std::abs(m.mean_im) <= 5 * m.se_im + 1e-15);
        CHECK(std::abs(m.second - 1.0) <= 5 * m.se_second + 1e-12);
    }
}

TEST_CASE("complex laws split the variance evenly between real and imaginary parts") {
    for (const auto& d : {EntryDistribution::complex_gaussian(), EntryDistribution::complex_rademacher()}) {
        Stream s{derive_key(5, 6)};
        double re2 = 0, im2 = 0, cross = 0;
        const std::size_t m = 400000;
        for (std::size_t i = 0; i < m; ++i) {
            const Complex x = draw_entry(d, s);
            re2 += x.real() * x.real();
            im2 += x.imag() * x.imag();
            cross += x.real() * x.imag();
        }
        CHECK(re2 / m == doctest::Approx(0.5).epsilon(0.01));
        CHECK(im2 / m == doctest::Approx(0.5).epsilon(0.01));
        CHECK(std::abs(cross / m) < 0.005);
    }
}

TEST_CASE("Rademacher draws are +-1 and complex Rademacher draws are (+-1 +- i)/sqrt2") {
    Stream s{derive_key(1, 2)};
    for (int i = 0; i < 1000; ++i) {
        const Complex x = draw_entry(EntryDistribution::rademacher(), s);
        CHECK((x == Complex{1, 0} || x == Complex{-1, 0}));
        const Complex y = draw_entry(EntryDistribution::complex_rademacher(), s);
        CHECK(std::abs(std::abs(y.real()) - M_SQRT1_2) < 1e-15);
        CHECK(std::abs(std::abs(y.imag()) - M_SQRT1_2) < 1e-15);
    }
}

TEST_CASE("two-point constructor enforces unit variance") {
    CHECK_NOTHROW(EntryDistribution::two_point(3.0, 0.1));
    CHECK_THROWS_AS(EntryDistribution::two_point(3.0, 1.0 / 9.0), ConfigError);
    CHECK_THROWS_AS(EntryDistribution::two_point(1.0, 0.0), ConfigError);
    const auto d = EntryDistribution::two_point_from_p(0.2);
    CHECK(d.two_point_a() == doctest::Approx(2.0));
    const auto atoms = d.atoms();
    REQUIRE(atoms.size() == 2);
    double mean = 0, var = 0;
    for (const auto& [x, w] : atoms) {
        mean += w * x.real();
        var += w * std::norm(x);
    }
    CHECK(std::abs(mean) < 1e-15);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dense Rademacher sample has entries +-1/2 at n = 4 and is reproducible") {
    EnsembleConfig c{4, 1.0, EntryDistribution::rademacher(), 7, std::nullopt};
    const auto a = sample_matrix(c, 0);
    const auto b = sample_matrix(c, 0);
    CHECK(bitwise_equal(a.entries(), b.entries()));
    for (Eigen::Index j = 0; j < 4; ++j)
        for (Eigen::Index k = 0; k < 4; ++k) CHECK(std::abs(a.entries()(j, k)) == 0.5);
    CHECK_FALSE(bitwise_equal(a.entries(), sample_matrix(c, 1).entries()));
}

TEST_CASE("entry (j,k) depends only on (seed, trial, j, k)") {
    EnsembleConfig small{5, 1.0, EntryDistribution::complex_gaussian(), 11, std::nullopt};
    EnsembleConfig large = small;
    large.n = 9;
    const ComplexMatrix a = sample_matrix(small, 3).entries() * std::sqrt(5.0);
    const ComplexMatrix b = sample_matrix(large, 3).entries() * std::sqrt(9.0);
    for (Eigen::Index j = 0; j < 5; ++j)
        for (Eigen::Index k = 0; k < 5; ++k) CHECK(std::abs(a(j, k) - b(j, k)) < 1e-14);
}

TEST_CASE("samples generated concurrently are bitwise identical to serial ones") {
    EnsembleConfig c{48, 0.3, EntryDistribution::real_gaussian(), 42, std::nullopt};
    std::vector<ComplexMatrix> par(6);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < par.size(); ++t) pool.emplace_back([&, t] { par[t] = sample_matrix(c, t).entries(); });
    for (auto& th : pool) th.join();
    for (std::size_t t = 0; t < par.size(); ++t) CHECK(bitwise_equal(par[t], sample_matrix(c, t).entries()));
}

TEST_CASE("sparse zero fraction lies inside the 99.9% binomial interval") {
    EnsembleConfig c{1024, 0.1, EntryDistribution::real_gaussian(), 3, std::nullopt};
    const auto m = sample_matrix(c, 0).entries();
    const double total = static_cast<double>(m.size());
    const double zeros = static_cast<double>((m.array() == Complex{}).count());
    const double sd = std::sqrt(0.9 * 0.1 / total);
    CHECK(std::abs(zeros / total - 0.9) <= 3.2905 * sd);
}

TEST_CASE("nonzero fraction within 5 sqrt(p(1-p)/n^2) for several n >= 256") {
    for (std::size_t n : {256, 512}) {
        for (double p : {0.05, 0.5, 0.9}) {
            EnsembleConfig c{n, p, EntryDistribution::rademacher(), 8, std::nullopt};
            const auto m = sample_matrix(c, 2).entries();
            const double frac = static_cast<double>((m.array() != Complex{}).count()) / static_cast<double>(m.size());
            CHECK(std::abs(frac - p) <= 5.0 * std::sqrt(p * (1 - p)) / static_cast<double>(n));
        }
    }
}

TEST_CASE("dense Gaussian: mean |entry|^2 within 5 sigma of 1/n, no structural zeros") {
    EnsembleConfig c{512, 1.0, EntryDistribution::real_gaussian(), 21, std::nullopt};
    const auto m = sample_matrix(c, 0).entries();
    const double mean = m.cwiseAbs2().mean();
    // |X|^2 ~ chi^2_1 has variance 2
    const double sd = std::sqrt(2.0 / static_cast<double>(m.size())) / 512.0;
    CHECK(std::abs(mean - 1.0 / 512.0) <= 5 * sd);
    CHECK((m.array() == Complex{}).count() == 0);
}

TEST_CASE("entry scaling E|entry|^2 = 1/n across trials, sparse ensemble") {
    EnsembleConfig c{64, 0.25, EntryDistribution::uniform_symmetric(), 4, std::nullopt};
    double s2 = 0, s4 = 0;
    const std::size_t trials = 60;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto m = sample_matrix(c, t).entries();
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            const double a = std::norm(m.data()[i]);
            s2 += a;
            s4 += a * a;
        }
    }
    const double k = static_cast<double>(trials) * 64 * 64;
    const double mean = s2 / k;
    const double se = std::sqrt((s4 / k - mean * mean) / k);
    CHECK(std::abs(mean - 1.0 / 64.0) <= 5 * se);
}

TEST_CASE("configuration validation") {
    EnsembleConfig c{0, 1.0, EntryDistribution::rademacher(), 1, std::nullopt};
    CHECK_THROWS_AS(sample_matrix(c, 0), ConfigError);
    c.n = 4;
    c.p_n = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.p_n = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.p_n = 0.3;
    c.theta = 0.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    const auto t = EnsembleConfig::with_theta(1024, 0.5, EntryDistribution::real_gaussian(), 1);
    CHECK(t.p_n == doctest::Approx(1.0 / 32.0).epsilon(1e-13));
    CHECK_NOTHROW(t.validate());
    const auto r = t.resized(256);
    CHECK(r.p_n == doctest::Approx(1.0 / 16.0).epsilon(1e-13));
}

TEST_CASE("EnsembleConfig JSON round trip and strictness") {
    const auto c = EnsembleConfig::with_theta(100, 0.7, EntryDistribution::two_point(3.0, 0.1), 123456789012345ULL);
    const auto j = to_json(c);
    CHECK(ensemble_from_json(j) == c);
    CHECK(ensemble_from_json(nlohmann::json::parse(j.dump())) == c);
    auto bad = j;
    bad["extra"] = 1;
    CHECK_THROWS_AS(ensemble_from_json(bad), ConfigError);
    auto bad_dist = j;
    bad_dist["dist"]["flavour"] = "x";
    CHECK_THROWS_AS(ensemble_from_json(bad_dist), ConfigError);
    auto bad_type = j;
    bad_type["n"] = "ten";
    CHECK_THROWS_AS(ensemble_from_json(bad_type), ConfigError);
    auto bad_tag = to_json(EnsembleConfig{3, 1.0, EntryDistribution::rademacher(), 1, std::nullopt});
    bad_tag["dist"]["tag"] = "cauchy";
    CHECK_THROWS_AS(ensemble_from_json(bad_tag), ConfigError);
}

TEST_CASE("smoothing with r = 0 leaves entries unchanged and records xi") {
    EnsembleConfig c{6, 1.0, EntryDistribution::complex_gaussian(), 9, std::nullopt};
    const auto s = sample_matrix(c, 0);
    auto stream = trial_stream(c, 0, 1);
    const auto t = smoothing_shift(s, 0.0, stream);
    CHECK(bitwise_equal(s.entries(), t.entries()));
    REQUIRE(t.applied_smoothing().has_value());
    CHECK(std::abs(t.applied_smoothing()->xi) <= 1.0);
    CHECK_THROWS_AS(smoothing_shift(t, 0.1, stream), UsageError);
    CHECK_THROWS_AS(smoothing_shift(s, -0.1, stream), DomainError);
}

TEST_CASE("smoothing shifts every eigenvalue by -r xi") {
    for (std::size_t n : {8, 33, 64}) {
        EnsembleConfig c{n, 1.0, EntryDistribution::real_gaussian(), 77, std::nullopt};
        const auto s = sample_matrix(c, 1);
        auto stream = trial_stream(c, 1, 2);
        const auto t = smoothing_shift(s, 0.7, stream);
        const Complex shift = 0.7 * t.applied_smoothing()->xi;
        Eigen::ComplexEigenSolver<ComplexMatrix> before(s.entries(), false), after(t.entries(), false);
        std::vector<Complex> a(before.eigenvalues().data(), before.eigenvalues().data() + n);
        std::vector<Complex> b(after.eigenvalues().data(), after.eigenvalues().data() + n);
        for (auto& v : a) v -= shift;
        // match each shifted eigenvalue to its nearest partner
        for (const auto& v : a) {
            double best = 1e300;
            for (const auto& w : b) best = std::min(best, std::abs(v - w));
            CHECK(best <= 1e-8);
        }
    }
}

TEST_CASE("xi is uniform on the unit disc") {
    EnsembleConfig c{2, 1.0, EntryDistribution::real_gaussian(), 5, std::nullopt};
    const auto s = sample_matrix(c, 0);
    std::size_t inner = 0, upper = 0;
    const std::size_t m = 40000;
    for (std::size_t t = 0; t < m; ++t) {
        auto stream = trial_stream(c, t, 3);
        const Complex xi = smoothing_shift(s, 1.0, stream).applied_smoothing()->xi;
        REQUIRE(std::abs(xi) <= 1.0);
        inner += std::abs(xi) <= 0.5;
        upper += xi.imag() > 0;
    }
    const double k = static_cast<double>(m);
    CHECK(std::abs(inner / k - 0.25) < 5 * std::sqrt(0.25 * 0.75 / k));
    CHECK(std::abs(upper / k - 0.5) < 5 * std::sqrt(0.25 / k));
}

TEST_CASE("pooled smoothed spectrum matches the input spectrum convolved with the r-disc") {
    // two-sample KS at level 1e-3 on real parts and squared moduli
    const std::size_t n = 64, trials = 200;
    const double r = 0.5;
    EnsembleConfig c{n, 1.0, EntryDistribution::complex_gaussian(), 31, std::nullopt};
    std::vector<double> smooth_re, smooth_abs, conv_re, conv_abs;
    Stream disc{derive_key(404, 1)};
    for (std::size_t t = 0; t < trials; ++t) {
        auto stream = trial_stream(c, t, 7);
        const auto s = smoothing_shift(sample_matrix(c, t), r, stream);
        Eigen::ComplexEigenSolver<ComplexMatrix> es(s.entries(), false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            smooth_re.push_back(es.eigenvalues()(i).real());
            smooth_abs.push_back(std::norm(es.eigenvalues()(i)));
        }
        // independent trials for the convolution sample
        Eigen::ComplexEigenSolver<ComplexMatrix> raw(sample_matrix(c, t + trials).entries(), false);
        for (Eigen::Index i = 0; i < raw.eigenvalues().size(); ++i) {
            const Complex v = raw.eigenvalues()(i) - r * disc.unit_disc();
            conv_re.push_back(v.real());
            conv_abs.push_back(std::norm(v));
        }
    }
    auto ks2 = [](std::vector<double> a, std::vector<double> b) {
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        std::size_t i = 0, j = 0;
        double d = 0;
        while (i < a.size() && j < b.size()) {
            const double x = std::min(a[i], b[j]);
            while (i < a.size() && a[i] <= x) ++i;
            while (j < b.size() && b[j] <= x) ++j;
            d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
        }
        return d;
    };
    const double m = static_cast<double>(n * trials);
    const double critical = std::sqrt(-std::log(1e-3 / 2) / 2) * std::sqrt(2.0 / m);
    CHECK(ks2(smooth_re, conv_re) < critical);
    CHECK(ks2(smooth_abs, conv_abs) < critical);
}

TEST_CASE("log-moment functional") {
    const double exact = std::pow(std::log(2.0), 20.0);
    const auto r = log_moment_estimate(EntryDistribution::rademacher(), 10000, 1.0);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-14));
    CHECK(r.std_error == 0.0);
    CHECK(exact == doctest::Approx(6.5e-4).epsilon(0.02));
    const auto g = log_moment_estimate(EntryDistribution::real_gaussian(), 1000000, 1.0);
    CHECK(std::isfinite(g.value));
    CHECK(g.value > 0.0);
    CHECK(g.std_error < 0.05 * g.value);
    CHECK_THROWS_AS(log_moment_estimate(EntryDistribution::real_gaussian(), 100, 1.0), DomainError);
    CHECK_THROWS_AS(log_moment_estimate(EntryDistribution::real_gaussian(), 10000, 0.0), DomainError);
}
