#pragma once

#include <cstdint>
#include <string_view>

namespace mefgen {

// splitmix64: tiny, fast, and fully specified, so streams are identical on
// every platform and toolchain. All pipeline randomness goes through this.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view s);

// Derive a sub-stream seed from a parent seed and a label. Used for the
// per-image / per-group determinism contract: worker scheduling can never
// change which stream an item sees.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mefgen
