#pragma once

// Deterministic random streams. Every stochastic routine in the library
// takes one of these by reference; independent per-run streams are derived
// from (master_seed, run_index) so results do not depend on how runs are
// scheduled across threads.

#include <cstdint>

namespace blindsearch {

// SplitMix64 step (public-domain mixer by Sebastiano Vigna).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform double in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [1, n].
    int next_index(int n) {
        int v = 1 + static_cast<int>(next_double() * static_cast<double>(n));
        return v > n ? n : v;
    }

  private:
    std::uint64_t state_;
};

// Stream seed for run `run_index` under `master_seed`. Double mixing keeps
// nearby run indices statistically unrelated.
inline std::uint64_t run_stream_seed(std::uint64_t master_seed, std::uint64_t run_index) {
    std::uint64_t s = master_seed ^ (0xA0761D6478BD642FULL * (run_index + 1));
    std::uint64_t t = splitmix64(s);
    return splitmix64(t);
}

inline Rng run_rng(std::uint64_t master_seed, std::uint64_t run_index) {
    return Rng(run_stream_seed(master_seed, run_index));
}

}  // namespace blindsearch
