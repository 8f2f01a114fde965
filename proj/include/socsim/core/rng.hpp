#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "socsim/core/hash.hpp"

namespace socsim::core {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based random stream keyed by (master seed, purpose tag, entity key).
// Value i of a stream is a pure function of the key tuple and i, so draws are
// independent of evaluation order and of any other stream. Every stochastic
// choice in the simulator goes through one of these.
class RngStream {
public:
    RngStream(std::uint64_t master, std::string_view purpose, std::uint64_t key = 0)
        : base_(splitmix64(splitmix64(master ^ fnv1a64(purpose)) ^ splitmix64(key))) {}

    std::uint64_t at(std::uint64_t i) const { return splitmix64(base_ + (i + 1) * kGolden); }

    std::uint64_t next() { return at(counter_++); }

    // Uniform in [0, 1).
    double next_double() { return double(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), unbiased. n must be > 0.
    std::uint64_t next_below(std::uint64_t n);

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + std::int64_t(next_below(std::uint64_t(hi - lo) + 1));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct values from [0, population), returned ascending.
    std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population, std::uint64_t k);

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

} // namespace socsim::core
