#ifndef MINOBS_RNG_HPP
#define MINOBS_RNG_HPP

#include <cstdint>

namespace minobs {

/// Deterministic generator with a fully specified algorithm (splitmix64),
/// so that identical seeds give bit-identical streams on every platform
/// and standard library. All stochastic draws in the project go through
/// this type.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound)
    {
        // Fixed-point multiply; bias is negligible for the bounds used here
        // and the mapping is deterministic, which is what matters.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    int next_bit() { return static_cast<int>(next_u64() >> 63); }

    /// Uniform double in [0, 1).
    double next_double()
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p)
    {
        if (p <= 0.0) {
            next_double(); // keep stream position independent of p
            return false;
        }
        return next_double() < p;
    }

    /// Derives an independent stream, e.g. one per trial.
    Rng split(std::uint64_t stream_id)
    {
        return Rng(next_u64() ^ (stream_id * 0xd1342543de82ef95ULL));
    }

private:
    std::uint64_t state_;
};

} // namespace minobs

#endif // MINOBS_RNG_HPP
