// rng.hpp — Deterministic splittable random number streams. Trajectory k of a
// run draws from the stream (master_seed, k), independent of scheduling.

#pragma once

#include <cstdint>

namespace oqs {

// SplitMix64; used to expand seeds into generator state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ seeded from (master_seed, stream_index) via SplitMix64.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed), stream_index_(stream_index) {
        SplitMix64 mix(master_seed ^ scramble(stream_index));
        for (auto& w : s_) w = mix.next();
        // xoshiro256++ requires a nonzero state
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0,1) with 53 significant bits.
    double uniform() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0,1]; safe as an exponential/threshold draw.
    double uniform_positive() {
        return 1.0 - uniform();
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t scramble(std::uint64_t x) {
        SplitMix64 mix(x);
        return mix.next();
    }

    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t s_[4];
};

} // namespace oqs
