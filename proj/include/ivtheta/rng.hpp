#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace ivtheta {

// splitmix64 finalizer; also used to mix (seed, stream, counter) into a state.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// FNV-1a, for deriving named stream ids from subcommand / operation names.
inline std::uint64_t stream_id(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Counter-based substream: the state is a pure function of (seed, stream,
// counter), so draws for record k of stream s are identical no matter in
// which order (or on which thread) they are generated.
class Substream {
public:
    Substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
        : state_(mix64(mix64(mix64(seed) ^ stream) ^ counter)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Box-Muller, cosine branch only. Two u64 per variate, no hidden state,
    // so the draw sequence is reproducible bit for bit everywhere.
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

// standard normal CDF
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

} // namespace ivtheta
