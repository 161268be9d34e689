#pragma once

#include <cstdint>

namespace rcs {

// Counter-based randomness. Every draw is a pure function of a key tuple,
// so generation order and thread count cannot change results.

namespace detail {

inline uint64_t mix64(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace detail

inline uint64_t hash_key(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = detail::mix64(seed);
    h = detail::mix64(h ^ a);
    h = detail::mix64(h ^ b);
    h = detail::mix64(h ^ c);
    return h;
}

// Sequential stream seeded from a key tuple; used where one site needs
// several draws (per-shot sampling, restart perturbations).
class RngStream {
public:
    explicit RngStream(uint64_t state) : state_(state) {}
    RngStream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0)
        : state_(hash_key(seed, a, b, c)) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n)
    uint64_t next_below(uint64_t n) {
        return next_u64() % n;
    }

private:
    uint64_t state_;
};

} // namespace rcs
