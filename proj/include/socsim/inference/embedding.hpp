#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace socsim::inference {

// Signed feature-hashing embedding: deterministic, no external model.
// Tokens are lowercased alphanumeric runs; each token adds +-1 to bucket
// hash(token) mod dim with the sign taken from bit 8 of the hash. The
// accumulated vector is L2-normalized (an empty prompt stays the zero
// vector).
struct PromptEmbedding {
    std::vector<float> v;

    bool is_zero() const;
};

PromptEmbedding embed_prompt(std::string_view text, std::size_t dim = 256);

// Cosine similarity; zero vectors yield 0 against anything.
double cosine(const PromptEmbedding& a, const PromptEmbedding& b);

} // namespace socsim::inference
