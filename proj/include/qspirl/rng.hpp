#pragma once

#include <cstdint>

namespace qspirl {

// Counter-based splitmix64 generator. Standard-library distributions are not
// reproducible across implementations, so all randomness in the project goes
// through this class: identical seeds give identical streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n). Rejection sampling keeps the stream portable.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Derives an independent stream from a base seed and a stream index.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        Rng mixer(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        return Rng(mixer.next_u64());
    }

  private:
    std::uint64_t state_;
};

} // namespace qspirl
