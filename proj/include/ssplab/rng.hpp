// Deterministic, seedable, splittable random streams.
//
// Reproducibility contract: every stochastic consumer (environment transition
// draws, cost observation noise, instance randomization in tests) owns a named
// child stream derived from the run seed, and consumes draws in a documented
// order. Draw semantics are implemented here (not via std::*_distribution,
// whose output is implementation-defined), so identical (seed, program) pairs
// produce bit-identical traces.
#pragma once

#include "ssplab/common.hpp"

#include <cstdint>
#include <random>

namespace ssplab {

/// splitmix64 step; used to derive child seeds and to decorrelate raw seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// A named random stream: mt19937_64 seeded via splitmix64(seed, stream id).
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s ^= 0x632be59bd9b4e019ull * (stream + 1);
        std::uint64_t b = splitmix64(s);
        gen_.seed(a ^ (b << 1));
        seed_ = seed;
        stream_ = stream;
    }

    /// Child stream keyed by id; independent of draws made on this stream.
    Rng child(std::uint64_t id) const { return Rng(seed_ ^ (0x9e3779b97f4a7c15ull * (id + 1)), id); }

    /// Uniform double in [0, 1) with 53 random bits.
    prec_t uniform() { return static_cast<prec_t>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    prec_t uniform(prec_t lo, prec_t hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    int uniform_int(int n) {
        assert(n > 0);
        return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
    }

    /// Sample an index from an (unnormalized up to ROW_SUM_TOL) probability row
    /// by inverse CDF; one uniform draw per call. Returns the last index with
    /// positive mass if rounding pushes the cumulative sum below the draw.
    int categorical(const prec_t* probs, int n) {
        assert(n > 0);
        const prec_t u = uniform();
        prec_t cum = 0;
        int last_positive = 0;
        for (int i = 0; i < n; ++i) {
            if (probs[i] > 0) last_positive = i;
            cum += probs[i];
            if (u < cum) return i;
        }
        return last_positive;
    }

    int categorical(const numvec& probs) {
        return categorical(probs.data(), static_cast<int>(probs.size()));
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
};

/// Stream ids used by learning runs (documented draw order).
namespace stream {
constexpr std::uint64_t ENV_TRANSITIONS = 0; ///< one draw per environment step
constexpr std::uint64_t COST_NOISE = 1;      ///< one draw per step, stochastic-cost mode only
} // namespace stream

} // namespace ssplab
