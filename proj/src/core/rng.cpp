#include "socsim/core/rng.hpp"

#include <algorithm>
#include <unordered_set>

#include "socsim/core/error.hpp"

namespace socsim::core {

std::uint64_t RngStream::next_below(std::uint64_t n) {
    if (n == 0) {
        raise(Errc::InvalidParams, "next_below(0)");
    }
    // Rejection sampling over the largest multiple of n.
    std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t v;
    do {
        v = next();
    } while (v >= limit);
    return v % n;
}

std::vector<std::uint64_t> RngStream::sample_without_replacement(std::uint64_t population,
                                                                 std::uint64_t k) {
    if (k > population) {
        raise(Errc::InvalidParams, "sample k > population");
    }
    std::vector<std::uint64_t> out;
    out.reserve(std::size_t(k));
    if (k * 3 >= population) {
        // Dense case: partial Fisher-Yates over the full index range.
        std::vector<std::uint64_t> idx(static_cast<std::size_t>(population));
        for (std::uint64_t i = 0; i < population; ++i) idx[std::size_t(i)] = i;
        for (std::uint64_t i = 0; i < k; ++i) {
            std::uint64_t j = i + next_below(population - i);
            std::swap(idx[std::size_t(i)], idx[std::size_t(j)]);
            out.push_back(idx[std::size_t(i)]);
        }
    } else {
        // Sparse case: Floyd's algorithm.
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(std::size_t(k) * 2);
        for (std::uint64_t j = population - k; j < population; ++j) {
            std::uint64_t t = next_below(j + 1);
            if (!seen.insert(t).second) {
                seen.insert(j);
                out.push_back(j);
            } else {
                out.push_back(t);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace socsim::core
