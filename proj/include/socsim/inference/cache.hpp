#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socsim/inference/embedding.hpp"
#include "socsim/inference/request.hpp"

namespace socsim::inference {

struct CacheConfig {
    bool enabled = true;
    double tau = 0.95;          // similarity threshold for semantic hits
    std::size_t dim = 256;      // embedding dimension
    std::size_t capacity = 1'000'000;
    std::size_t bucketed_cutoff = 50'000; // linear scan below, hyperplane buckets above
    std::uint64_t seed = 0;               // hyperplane seed
    std::string persist_path;             // optional
};

struct CacheEntry {
    std::uint64_t exact_hash = 0;
    PromptEmbedding embedding;
    InferenceResponse response; // stored as a non-hit response
    std::uint64_t hits = 0;
    std::uint64_t inserted_at = 0;
};

// Semantic prompt cache. Exact-hash matches return immediately; otherwise
// the nearest stored embedding by cosine is a hit iff similarity >= tau.
// Above the cutoff the scan is restricted to a 16-way partition induced by
// 4 seeded random hyperplanes, with multi-probing of every bucket whose
// sign pattern could hold an entry within the tau+0.01 ball, so decisions
// match the linear scan whenever the best similarity clears tau by > 0.01.
class PromptCache {
public:
    explicit PromptCache(CacheConfig cfg);

    struct Decision {
        bool hit = false;
        bool exact = false;
        double similarity = 0.0;       // best candidate similarity (0 if none)
        std::uint64_t entry_hash = 0;  // valid when hit
    };

    std::optional<InferenceResponse> lookup(const std::string& prompt);
    Decision probe(const std::string& prompt) const; // no hit-count side effects
    void insert(const std::string& prompt, const InferenceResponse& response);

    std::size_t size() const { return entries_.size(); }
    double tau() const { return cfg_.tau; }
    std::uint64_t hit_count() const { return hit_count_; }
    std::uint64_t miss_count() const { return miss_count_; }
    std::uint64_t near_threshold_hits() const { return near_threshold_hits_; }

    // Oracle access for verification: best entry by linear scan / via index.
    std::optional<std::pair<std::uint64_t, double>> best_linear(const PromptEmbedding& q) const;
    std::optional<std::pair<std::uint64_t, double>> best_indexed(const PromptEmbedding& q) const;
    const CacheEntry* entry(std::uint64_t exact_hash) const;

    void save(const std::filesystem::path& path) const;
    void load(const std::filesystem::path& path);

private:
    void build_hyperplanes();
    unsigned bucket_of(const PromptEmbedding& e) const;
    void index_insert(std::uint64_t hash, const PromptEmbedding& e);
    void evict_if_needed();

    CacheConfig cfg_;
    // Ordered by exact_hash so scans are deterministic.
    std::map<std::uint64_t, CacheEntry> entries_;
    // Eviction index: (hits, inserted_at, exact_hash), smallest evicted first.
    std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, std::uint64_t> evict_order_;
    std::vector<std::vector<std::uint64_t>> buckets_; // 16 sign-pattern buckets
    std::vector<std::vector<float>> hyperplanes_;     // 4 unit vectors
    std::uint64_t insert_counter_ = 0;
    std::uint64_t hit_count_ = 0;
    std::uint64_t miss_count_ = 0;
    mutable std::uint64_t near_threshold_hits_ = 0;
};

void to_json(core::Json& j, const InferenceResponse& r);
void from_json(const core::Json& j, InferenceResponse& r);

} // namespace socsim::inference
