#include "circulaw/rng.hpp"

#include <cmath>
#include <numbers>

namespace circulaw {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c, std::uint64_t d) noexcept {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ a);
    h = mix64(h ^ (b + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
    h = mix64(h ^ (d + 0x2545f4914f6cdd1dULL));
    return h;
}

Stream::result_type Stream::operator()() noexcept {
    // Two rounds so that adjacent counters of adjacent keys stay decorrelated.
    return mix64(mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_) ^ key_);
}

double Stream::uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Stream::uniform_open_zero() noexcept {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

double Stream::normal() noexcept {
    const double u1 = uniform_open_zero();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Stream::unit_disc() noexcept {
    const double radius = std::sqrt(uniform());
    const double angle = 2.0 * std::numbers::pi * uniform();
    return std::polar(radius, angle);
}

}  // namespace circulaw
