#pragma once

#include <cstdint>
#include <string_view>

namespace toolforge {

// SplitMix64. Chosen over std::mt19937_64 + distributions because the
// standard distributions are implementation-defined; this generator plus the
// explicit double conversion below gives bit-identical streams on every
// platform, which the reproducibility contract depends on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1). 53 mantissa bits, exact halving, no rounding surprises.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

    // Uniform integer in [0, n). Rejection-free modulo bias is irrelevant at
    // our n (<< 2^32) but kept exact anyway via 128-bit multiply-shift.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic seed derivation: every stage, feature, grid index and target
// draws from a stream keyed off one master seed, so runs are reproducible and
// independent of evaluation order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = detail::mix(master ^ 0x8BADF00D5EEDULL);
    h = detail::mix(h ^ detail::fnv1a(tag));
    h = detail::mix(h ^ (a + 0x9E3779B97F4A7C15ULL));
    h = detail::mix(h ^ (b + 0x632BE59BD9B4E019ULL));
    return h;
}

}  // namespace toolforge
