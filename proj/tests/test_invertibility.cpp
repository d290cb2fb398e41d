#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "circulaw/errors.hpp"
#include "circulaw/invertibility.hpp"
#include "circulaw/linalg.hpp"
#include "circulaw/rng.hpp"

using namespace circulaw;

namespace {

std::vector<Complex> unit_vector(std::size_t n, std::uint64_t seed, bool real = false) {
    Stream s{derive_key(seed, 77)};
    std::vector<Complex> x(n);
    double norm = 0;
    for (auto& v : x) {
        v = real ? Complex{s.normal(), 0} : Complex{s.normal(), s.normal()};
        norm += std::norm(v);
    }
    for (auto& v : x) v /= std::sqrt(norm);
    return x;
}

std::vector<Complex> uniform_vector(std::size_t n) { return std::vector<Complex>(n, Complex{1.0 / std::sqrt(double(n)), 0}); }

// Minimum over all supports of size k of the norm of x off the support.
double brute_force_residual(const std::vector<Complex>& x, std::size_t k) {
    const std::size_t n = x.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        double tail = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!(mask & (1u << i))) tail += std::norm(x[i]);
        best = std::min(best, std::sqrt(tail));
    }
    return best;
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<EntryDistribution> shipped_laws() {
    return {EntryDistribution::complex_gaussian(), EntryDistribution::real_gaussian(), EntryDistribution::rademacher(),
            EntryDistribution::complex_rademacher(), EntryDistribution::uniform_symmetric()};
}

}  // namespace

TEST_CASE("classify_vector: hand cases") {
    std::vector<Complex> e(10, Complex{});
    e[3] = 1.0;
    const auto c = classify_vector(e, 0.1, 0.5);
    CHECK(c.tag == VectorClassTag::Sparse);
    CHECK(c.residual == 0.0);

    const auto u = classify_vector(uniform_vector(100), 0.5, 0.1);
    CHECK(u.residual == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(u.tag == VectorClassTag::Incompressible);

    const auto x = unit_vector(20, 3);
    CHECK(classify_vector(x, 1.0, 0.3).tag == VectorClassTag::Sparse);

    std::vector<Complex> comp(10, Complex{});
    comp[0] = std::sqrt(0.99);
    comp[1] = 0.1;
    const auto cc = classify_vector(comp, 0.1, 0.2);
    CHECK(cc.tag == VectorClassTag::Compressible);
    CHECK(cc.residual == doctest::Approx(0.1));

    CHECK_THROWS_AS(classify_vector(std::vector<Complex>(4, Complex{1, 0}), 0.5, 0.1), DomainError);
    CHECK_THROWS_AS(classify_vector(e, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(classify_vector(e, 0.5, 1.0), DomainError);
}

TEST_CASE("classify_vector residual equals the brute-force minimum over supports (n <= 12)") {
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            const auto x = unit_vector(n, 1000 * n + seed, seed % 2 == 0);
            for (double delta : {0.05, 0.2, 0.35, 0.5, 0.75, 1.0}) {
                const auto k = static_cast<std::size_t>(std::floor(delta * static_cast<double>(n) + 1e-12));
                const auto cls = classify_vector(x, delta, 0.3);
                CHECK(cls.residual == brute_force_residual(x, k));
                if (cls.tag == VectorClassTag::Sparse) CHECK(cls.residual == 0.0);
                if (cls.tag == VectorClassTag::Compressible) CHECK((cls.residual > 0.0 && cls.residual <= 0.3));
                if (cls.tag == VectorClassTag::Incompressible) CHECK(cls.residual > 0.3);
                ++checked;
            }
        }
    }
    CHECK(checked == 12 * 8 * 6);
}

TEST_CASE("spread set") {
    const auto sigma = spread_set(uniform_vector(64), 0.5, 0.5);
    CHECK(sigma.size() == 64);
    std::vector<Complex> e(16, Complex{});
    e[0] = 1.0;
    CHECK_THROWS_AS(spread_set(e, 0.5, 0.5), DomainError);

    std::size_t fuzzed = 0;
    for (std::uint64_t seed = 0; fuzzed < 1000; ++seed) {
        const std::size_t n = 20 + seed % 80;
        const double delta = 0.1 + 0.4 * static_cast<double>(seed % 5) / 4.0;
        const double rho = 0.1 + 0.05 * static_cast<double>(seed % 7);
        const auto x = unit_vector(n, seed + 5000);
        if (classify_vector(x, delta, rho).tag != VectorClassTag::Incompressible) continue;
        const auto s = spread_set(x, delta, rho);
        const double nd = static_cast<double>(n);
        CHECK(static_cast<double>(s.size()) >= nd * delta / 2.0);
        double mass = 0.0;
        for (auto k : s) {
            const double a = std::abs(x[k]);
            CHECK(a >= rho / std::sqrt(2 * nd));
            CHECK(a <= 1.0 / std::sqrt(nd * delta / 2.0));
            mass += a * a;
        }
        CHECK(mass >= rho * rho / 2.0 - 1e-12);
        ++fuzzed;
    }
}

TEST_CASE("concentration function") {
    CHECK(concentration_Q(EntryDistribution::rademacher(), 0.5) == 0.5);
    CHECK(concentration_Q(EntryDistribution::rademacher(), 1.0) == 1.0);
    CHECK(concentration_Q(EntryDistribution::complex_rademacher(), 0.5) == 0.25);
    CHECK(concentration_Q(EntryDistribution::complex_rademacher(), 0.71) == 0.5);
    CHECK(concentration_Q(EntryDistribution::complex_rademacher(), 1.0) == 1.0);
    const auto tp = EntryDistribution::two_point(3.0, 0.1);
    CHECK(concentration_Q(tp, 0.5) == doctest::Approx(0.9));
    for (const auto& d : {EntryDistribution::real_gaussian(), EntryDistribution::complex_gaussian(),
                          EntryDistribution::uniform_symmetric()})
        CHECK(concentration_Q(d, 0.0) == 0.0);
    CHECK(std::abs(concentration_Q(EntryDistribution::real_gaussian(), 0.5) - (2 * gaussian_cdf(0.5) - 1)) <= 0.01);
    CHECK(std::abs(concentration_Q(EntryDistribution::uniform_symmetric(), 0.5) - 1.0 / (2 * std::sqrt(3.0))) <= 0.01);
    // P{|Z| <= eta} for standard complex Gaussian is 1 - exp(-eta^2)
    CHECK(std::abs(concentration_Q(EntryDistribution::complex_gaussian(), 0.5) - (1 - std::exp(-0.25))) <= 0.01);
    for (const auto& d : shipped_laws()) {
        CAPTURE(d.tag_name());
        double prev = 0.0;
        for (double eta : {0.0, 0.1, 0.3, 0.5, 1.0, 2.0}) {
            const double q = concentration_Q(d, eta);
            CHECK(q >= prev);
            CHECK(q <= 1.0);
            prev = q;
        }
        // a witness (eta0, r0) = (0.5, 0.6)
        CHECK(concentration_Q(d, 0.5) <= 0.6);
    }
}

TEST_CASE("small-ball probability: Littlewood-Offord binomial oracle") {
    const double exact = 252.0 / 1024.0;
    const double est = small_ball(uniform_vector(10), EntryDistribution::rademacher(), 1.0, 0.01 / std::sqrt(10.0), 100000);
    CHECK(std::abs(est - exact) <= 0.02);
    CHECK_THROWS_AS(small_ball(uniform_vector(10), EntryDistribution::rademacher(), 1.0, 0.1, 100), DomainError);
}

TEST_CASE("small-ball probability: trivial cases, monotonicity, sign flips") {
    CHECK(small_ball(uniform_vector(5), EntryDistribution::uniform_symmetric(), 1.0, 100.0, 10000) == 1.0);
    std::vector<Complex> e(6, Complex{});
    e[0] = 1.0;
    for (const auto& d : shipped_laws()) {
        CAPTURE(d.tag_name());
        const double sb = small_ball(e, d, 1.0, 0.5, 20000);
        CHECK(std::abs(sb - concentration_Q(d, 0.5)) <= 0.02);
    }
    const auto x = unit_vector(12, 8, true);
    auto flipped = x;
    for (std::size_t i = 0; i < flipped.size(); i += 2) flipped[i] = -flipped[i];
    double prev = 0;
    for (double eta : {0.01, 0.05, 0.1, 0.3, 0.8}) {
        const double a = small_ball(x, EntryDistribution::real_gaussian(), 0.7, eta, 20000);
        const double b = small_ball(flipped, EntryDistribution::real_gaussian(), 0.7, eta, 20000, 99);
        CHECK(a >= prev);
        CHECK(std::abs(a - b) <= 0.03);
        prev = a;
    }
}

TEST_CASE("small-ball shape for incompressible vectors") {
    const std::size_t n = 100;
    const double rho = 0.5;
    const auto x = uniform_vector(n);
    REQUIRE(classify_vector(x, 0.5, rho).tag == VectorClassTag::Incompressible);
    const double eta = 0.5 * rho / std::sqrt(2.0 * n);
    for (const auto& d : shipped_laws()) {
        CAPTURE(d.tag_name());
        CHECK(small_ball(x, d, 0.5, eta, 20000) < 0.95);
    }
}

TEST_CASE("window and disc estimators") {
    CHECK(max_window_fraction({0.0, 0.1, 0.2, 5.0}, 0.1) == 0.75);
    CHECK(max_window_fraction({}, 1.0) == 0.0);
    const std::vector<Complex> pts{Complex{0, 0}, Complex{0.1, 0}, Complex{0, 0.1}, Complex{3, 3}};
    CHECK(max_disc_fraction(pts, 0.2) == 0.75);
    CHECK(max_disc_fraction(pts, 0.0) == 0.25);
}

TEST_CASE("min_sv_tail") {
    EnsembleConfig c{40, 1.0, EntryDistribution::real_gaussian(), 12, std::nullopt};
    std::vector<double> smallest;
    for (std::size_t t = 0; t < 60; ++t) smallest.push_back(smallest_singular_value(shift(sample_matrix(c, t), Complex{0.3, 0})));
    const double lo = *std::min_element(smallest.begin(), smallest.end());
    const double hi = *std::max_element(smallest.begin(), smallest.end());
    const auto table = min_sv_tail(c, Complex{0.3, 0}, 60, {lo / 2, lo, (lo + hi) / 2, hi * 1.01});
    CHECK(table.frequencies[0] == 0.0);
    CHECK(table.frequencies[1] == doctest::Approx(1.0 / 60));
    CHECK(table.frequencies[3] == 1.0);
    CHECK(table.s1_violation_frequency == 0.0);
    CHECK(table.k_factor == 1.0);
    for (std::size_t i = 1; i < table.frequencies.size(); ++i) CHECK(table.frequencies[i] >= table.frequencies[i - 1]);
    for (double f : table.frequencies) CHECK(std::abs(f * 60 - std::round(f * 60)) < 1e-9);
    CHECK_THROWS_AS(min_sv_tail(c, Complex{}, 10, {0.1}), DomainError);
    CHECK_THROWS_AS(min_sv_tail(c, Complex{}, 60, {0.2, 0.1}), DomainError);

    std::ostringstream out;
    write_csv(table, out);
    CHECK(out.str().rfind("threshold,frequency,trials,n,p_n,z_re,z_im\n", 0) == 0);
}

TEST_CASE("min_sv_tail: Gaussian n = 200 never has s_n <= 1e-9 in 200 trials") {
    EnsembleConfig c{200, 1.0, EntryDistribution::real_gaussian(), 2718, std::nullopt};
    const auto table = min_sv_tail(c, Complex{}, 200, {1e-9});
    CHECK(table.frequencies[0] == 0.0);
}

TEST_CASE("largest_sv_tail") {
    EnsembleConfig one{1, 1.0, EntryDistribution::rademacher(), 1, std::nullopt};
    CHECK(largest_sv_tail(one, 50) == 1.0);
    EnsembleConfig g{256, 1.0, EntryDistribution::real_gaussian(), 5, std::nullopt};
    CHECK(largest_sv_tail(g, 200) == 0.0);
    EnsembleConfig small{30, 1.0, EntryDistribution::real_gaussian(), 6, std::nullopt};
    CHECK(largest_sv_frequency(small, 60, 30.0) <= largest_sv_frequency(small, 60, 2.0));
    CHECK_THROWS_AS(largest_sv_tail(g, 10), DomainError);
}
