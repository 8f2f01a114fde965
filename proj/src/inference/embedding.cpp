#include "socsim/inference/embedding.hpp"

#include <cctype>
#include <cmath>

#include "socsim/core/hash.hpp"

namespace socsim::inference {

bool PromptEmbedding::is_zero() const {
    for (float x : v) {
        if (x != 0.0f) return false;
    }
    return true;
}

PromptEmbedding embed_prompt(std::string_view text, std::size_t dim) {
    std::vector<double> acc(dim, 0.0);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        const std::uint64_t h = core::fnv1a64(token);
        const std::size_t bucket = std::size_t(h % dim);
        const double sign = ((h >> 8) & 1u) ? 1.0 : -1.0;
        acc[bucket] += sign;
        token.clear();
    };
    for (char ch : text) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            token.push_back(char(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();

    double norm_sq = 0.0;
    for (double x : acc) norm_sq += x * x;
    PromptEmbedding out;
    out.v.resize(dim);
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t i = 0; i < dim; ++i) out.v[i] = float(acc[i] * inv);
    }
    return out;
}

double cosine(const PromptEmbedding& a, const PromptEmbedding& b) {
    // Stored embeddings are unit (or zero) vectors, so the dot product is
    // already the cosine. Four accumulators keep the loop vectorizable;
    // the cache scan path is hot.
    const std::size_t n = std::min(a.v.size(), b.v.size());
    const float* pa = a.v.data();
    const float* pb = b.v.data();
    double d0 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        d0 += double(pa[i]) * double(pb[i]);
        d1 += double(pa[i + 1]) * double(pb[i + 1]);
        d2 += double(pa[i + 2]) * double(pb[i + 2]);
        d3 += double(pa[i + 3]) * double(pb[i + 3]);
    }
    for (; i < n; ++i) d0 += double(pa[i]) * double(pb[i]);
    return (d0 + d1) + (d2 + d3);
}

} // namespace socsim::inference
