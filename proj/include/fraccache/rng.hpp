#pragma once

// Counter-based random streams. A stream is fully determined by
// (seed, stream index), so trial t of a simulation can be generated
// independently of trials 0..t-1 and parallel/serial execution give
// identical results.

#include <cmath>
#include <cstdint>

namespace fraccache {

namespace detail {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(detail::mix64(detail::mix64(seed) ^
                               detail::mix64(stream + 0x6a09e667f3bcc909ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // Exp(1) via inverse CDF; 1 - U is in (0, 1] so the log is finite.
    double exponential() { return -std::log(1.0 - next_double()); }

    // Poisson count as arrivals of a unit-rate process on [0, mean). Exact
    // for any mean, O(mean) draws.
    std::uint64_t poisson(double mean) {
        std::uint64_t k = 0;
        double acc = exponential();
        while (acc <= mean) {
            ++k;
            acc += exponential();
        }
        return k;
    }

private:
    std::uint64_t state_;
};

} // namespace fraccache
