#include "mefgen/rng.hpp"

namespace mefgen {

std::uint64_t Rng::below(std::uint64_t n) {
    // rejection sampling over the largest multiple of n
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v > limit);
    return v % n;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    Rng r(seed ^ fnv1a64(label));
    return r.next_u64();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return r.next_u64();
}

}  // namespace mefgen
