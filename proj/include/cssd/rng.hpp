#pragma once

#include <cstdint>

namespace cssd {

/// SplitMix64 evaluated in counter mode.
///
/// Output k of a stream is mix(key + (k + 1) * golden), where mix is the
/// SplitMix64 finalizer (Steele, Lea & Flood 2014) and the key is derived
/// from (seed, stream). Any draw can be computed without generating the
/// preceding ones, so replicate r of a simulation always sees the same
/// numbers regardless of which thread runs it or in what order.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + kGolden))) {}

    /// Raw 64-bit output at an absolute position.
    constexpr std::uint64_t at(std::uint64_t counter) const { return mix(key_ + (counter + 1) * kGolden); }

    constexpr std::uint64_t next() { return at(counter_++); }

    /// Uniform on the open interval (0, 1): 53-bit mantissa, midpoint offset.
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by inversion of a uniform draw.
    double normal();

    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace cssd
