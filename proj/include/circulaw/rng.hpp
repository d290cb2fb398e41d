#pragma once

#include <complex>
#include <cstdint>

namespace circulaw {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines a master seed with a path of indices into one stream key.
/// Order matters: key(s, {1, 2}) != key(s, {2, 1}).
std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0, std::uint64_t d = 0) noexcept;

/// Small counter-based random stream. Each (key, counter) pair maps to one
/// 64-bit word, so a stream is fully determined by its key and the number of
/// draws already taken. Satisfies UniformRandomBitGenerator.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1], safe as a log argument.
    double uniform_open_zero() noexcept;
    /// Standard normal via Box-Muller; both uniforms are consumed per call.
    double normal() noexcept;
    /// Uniform on the closed unit disc (polar method, radius sqrt(u)).
    std::complex<double> unit_disc() noexcept;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace circulaw
