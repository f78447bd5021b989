#pragma once

#include <cstdint>
#include <random>

namespace panelfuse {

/// 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is fixed by
/// the C++ standard) with portable uniform and normal transforms, so a seed
/// reproduces the same draws on every platform and standard library.
/// Child streams are derived by hashing (seed, stream id) with SplitMix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const { return seed_; }

    /// Independent generator for a numbered sub-stream.
    Rng split(std::uint64_t stream) const {
        return Rng(mix(seed_ ^ mix(stream + 0x632BE59BD9B4E019ULL)));
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n) by rejection.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller; pairs are cached.
    double normal();

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace panelfuse
