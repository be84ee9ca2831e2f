#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1tree {

// Error taxonomy, mapped to CLI exit codes (2/3/4).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolName = "l1tree";
inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Random numbers.
//
// All randomness in the project flows from a single uint64 seed through
// splitmix64. Streams for sub-tasks (folds, replicates, synthetic features)
// are derived with Rng::derive(seed, stream), so results do not depend on
// execution order or on the platform's std::shuffle / distribution
// implementations.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // Burn one step so seed 0 does not start at 0.
        splitmix64(state_);
    }

    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = stream;
        std::uint64_t mixed = splitmix64(s);
        return Rng(seed ^ mixed);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps the
    // result exactly uniform and platform independent.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller (one value per call; cached pair unused
    // intentionally to keep the stream position simple).
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// FNV-1a, used for dataset fingerprints and training-index hashes.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xCBF29CE484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::string hex64(std::uint64_t v);

// Shortest round-trip decimal form of a double ("the data's precision").
std::string format_double(double v);

// Percent with two decimals, half away from zero (used only in renderings).
std::string format_percent(double fraction);

std::uint64_t hash_indices(const std::vector<int>& indices);

}  // namespace l1tree
