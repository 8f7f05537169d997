#pragma once

#include <cstdint>
#include <random>

namespace dualsat {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and an index:
/// splitmix64(parent ^ splitmix64(index + stream_tag)). Used for trial seeds
/// (parent = master seed, index = trial index) and for sub-streams of a trial.
constexpr std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t index, std::uint64_t stream_tag = 0)
{
    return splitmix64(parent ^ splitmix64(index + 0x632BE59BD9B4E019ULL * (stream_tag + 1)));
}

/// Platform-stable random source. std::mt19937_64's output sequence is fixed by
/// the standard; the distributions below are written out so results do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound), bound > 0.
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x = engine_();
        while (x >= limit)
            x = engine_();
        return x % bound;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace dualsat
