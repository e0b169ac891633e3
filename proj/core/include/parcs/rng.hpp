#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace parcs {

// All randomness in the engine flows through named substreams derived from one
// master seed, so that adding or removing a node never perturbs the draws of
// any other node.  The derivations below are frozen and documented in the
// README so external tooling can reproduce every stream.

// Sebastiano Vigna's splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// FNV-1a over the bytes of a name; stable across platforms.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

// substream for a named column: splitmix64(master ^ fnv1a64(name))
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name) {
    return splitmix64(master ^ fnv1a64(name));
}

// derived seed for iteration i of a multi-dataset run
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

// Uniform stream over the open interval (0,1), built on std::mt19937_64 whose
// output sequence is pinned by the standard.  The float mapping uses the top
// 53 bits directly instead of std::uniform_real_distribution (whose exact
// output is implementation-defined), keeping runs bit-reproducible.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // strictly inside (0,1): ((x >> 11) + 0.5) * 2^-53
    double next() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

    // index in [0, n); n must be > 0
    std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(next() * static_cast<double>(n));
        return i >= n ? n - 1 : i;
    }

    bool bernoulli(double p) { return next() < p; }

private:
    std::mt19937_64 eng_;
};

} // namespace parcs
