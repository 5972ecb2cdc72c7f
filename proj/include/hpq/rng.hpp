#pragma once

#include <cstdint>

namespace hpq {

// splitmix64; used both as a stream generator and as a stateless hash.
// Deterministic across platforms, unlike the std <random> distributions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) { (void)splitmix64(state_); }

    // independent substream, e.g. one per construction step or sample batch
    Rng stream(std::uint64_t tag) const { return Rng(hash_combine(state_, tag)); }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [-1, 1)
    double next_signed() { return 2.0 * next_double() - 1.0; }

    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

// stateless hash-to-[0,1) for reproducible per-key noise
inline double hash_unit(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b) {
    std::uint64_t s = hash_combine(hash_combine(seed, key_a), key_b);
    return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

}  // namespace hpq
