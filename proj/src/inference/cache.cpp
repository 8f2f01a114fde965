#include "socsim/inference/cache.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "socsim/core/error.hpp"
#include "socsim/core/hash.hpp"
#include "socsim/core/rng.hpp"

namespace socsim::inference {

using core::Errc;
using core::raise;

void to_json(core::Json& j, const InferenceResponse& r) {
    j = core::Json{{"fields", r.fields},       {"tokens_in", r.tokens_in},
                   {"tokens_out", r.tokens_out}, {"backend_id", r.backend_id},
                   {"cache_hit", r.cache_hit},   {"latency_ms", r.latency_ms},
                   {"failed", r.failed},         {"error", r.error}};
}

void from_json(const core::Json& j, InferenceResponse& r) {
    r.fields = j.at("fields");
    r.tokens_in = j.at("tokens_in").get<std::uint64_t>();
    r.tokens_out = j.at("tokens_out").get<std::uint64_t>();
    r.backend_id = j.at("backend_id").get<std::string>();
    r.cache_hit = j.at("cache_hit").get<bool>();
    r.latency_ms = j.at("latency_ms").get<double>();
    r.failed = j.at("failed").get<bool>();
    r.error = j.at("error").get<std::string>();
}

PromptCache::PromptCache(CacheConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.dim == 0 || !(cfg_.tau > 0.0) || cfg_.tau > 1.0) {
        raise(Errc::InvalidParams, "bad cache config");
    }
    build_hyperplanes();
    buckets_.assign(16, {});
}

void PromptCache::build_hyperplanes() {
    core::RngStream rng(cfg_.seed, "cache_hyperplanes");
    hyperplanes_.assign(4, std::vector<float>(cfg_.dim));
    for (auto& h : hyperplanes_) {
        double norm_sq = 0.0;
        std::vector<double> tmp(cfg_.dim);
        for (std::size_t i = 0; i < cfg_.dim; ++i) {
            // Sum of three uniforms, centered: cheap symmetric draw.
            double g = rng.next_double() + rng.next_double() + rng.next_double() - 1.5;
            tmp[i] = g;
            norm_sq += g * g;
        }
        const double inv = norm_sq > 0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
        for (std::size_t i = 0; i < cfg_.dim; ++i) h[i] = float(tmp[i] * inv);
    }
}

unsigned PromptCache::bucket_of(const PromptEmbedding& e) const {
    unsigned b = 0;
    for (unsigned p = 0; p < 4; ++p) {
        double dot = 0.0;
        for (std::size_t i = 0; i < cfg_.dim; ++i) dot += double(hyperplanes_[p][i]) * double(e.v[i]);
        if (dot >= 0.0) b |= (1u << p);
    }
    return b;
}

void PromptCache::index_insert(std::uint64_t hash, const PromptEmbedding& e) {
    buckets_[bucket_of(e)].push_back(hash);
}

std::optional<std::pair<std::uint64_t, double>> PromptCache::best_linear(
    const PromptEmbedding& q) const {
    std::optional<std::pair<std::uint64_t, double>> best;
    for (const auto& [hash, entry] : entries_) {
        const double s = cosine(q, entry.embedding);
        if (!best || s > best->second) {
            best = {hash, s};
        }
    }
    return best;
}

std::optional<std::pair<std::uint64_t, double>> PromptCache::best_indexed(
    const PromptEmbedding& q) const {
    if (entries_.size() < cfg_.bucketed_cutoff) {
        return best_linear(q);
    }
    // Probe every bucket whose sign pattern may differ only in planes where
    // the query projection is within the tau+0.01 chord radius.
    double proj[4];
    unsigned base = 0;
    for (unsigned p = 0; p < 4; ++p) {
        double dot = 0.0;
        for (std::size_t i = 0; i < cfg_.dim; ++i) dot += double(hyperplanes_[p][i]) * double(q.v[i]);
        proj[p] = dot;
        if (dot >= 0.0) base |= (1u << p);
    }
    const double margin = 1.0 - (cfg_.tau + 0.01);
    const double radius = margin > 0.0 ? std::sqrt(2.0 * margin) : 0.0;
    unsigned flex = 0;
    for (unsigned p = 0; p < 4; ++p) {
        if (std::fabs(proj[p]) <= radius) flex |= (1u << p);
    }
    std::optional<std::pair<std::uint64_t, double>> best;
    // Enumerate subsets of the flexible planes.
    for (unsigned sub = flex;; sub = (sub - 1) & flex) {
        const unsigned bucket = base ^ sub;
        for (std::uint64_t hash : buckets_[bucket]) {
            auto it = entries_.find(hash);
            if (it == entries_.end()) continue; // evicted
            const double s = cosine(q, it->second.embedding);
            if (!best || s > best->second || (s == best->second && hash < best->first)) {
                best = {hash, s};
            }
        }
        if (sub == 0) break;
    }
    return best;
}

PromptCache::Decision PromptCache::probe(const std::string& prompt) const {
    Decision d;
    const std::uint64_t exact = core::fnv1a64(prompt);
    if (entries_.count(exact)) {
        d.hit = true;
        d.exact = true;
        d.similarity = 1.0;
        d.entry_hash = exact;
        return d;
    }
    if (entries_.empty()) return d;
    const PromptEmbedding q = embed_prompt(prompt, cfg_.dim);
    auto best = best_indexed(q);
    if (!best) return d;
    d.similarity = best->second;
    if (best->second >= cfg_.tau) {
        d.hit = true;
        d.entry_hash = best->first;
        if (best->second < cfg_.tau + 0.01) ++near_threshold_hits_;
    }
    return d;
}

std::optional<InferenceResponse> PromptCache::lookup(const std::string& prompt) {
    Decision d = probe(prompt);
    if (!d.hit) {
        ++miss_count_;
        return std::nullopt;
    }
    auto it = entries_.find(d.entry_hash);
    CacheEntry& e = it->second;
    evict_order_.erase({e.hits, e.inserted_at, e.exact_hash});
    ++e.hits;
    evict_order_.emplace(std::make_tuple(e.hits, e.inserted_at, e.exact_hash), e.exact_hash);
    ++hit_count_;
    InferenceResponse out = e.response;
    out.cache_hit = true;
    out.latency_ms = 0.0;
    return out;
}

void PromptCache::insert(const std::string& prompt, const InferenceResponse& response) {
    const std::uint64_t exact = core::fnv1a64(prompt);
    if (entries_.count(exact)) {
        return; // one entry per exact hash; first insertion wins
    }
    CacheEntry e;
    e.exact_hash = exact;
    e.embedding = embed_prompt(prompt, cfg_.dim);
    e.response = response;
    e.response.cache_hit = false;
    e.hits = 0;
    e.inserted_at = insert_counter_++;
    index_insert(exact, e.embedding);
    evict_order_.emplace(std::make_tuple(e.hits, e.inserted_at, e.exact_hash), exact);
    entries_.emplace(exact, std::move(e));
    evict_if_needed();
}

void PromptCache::evict_if_needed() {
    while (entries_.size() > cfg_.capacity && !evict_order_.empty()) {
        auto it = evict_order_.begin();
        const std::uint64_t hash = it->second;
        evict_order_.erase(it);
        entries_.erase(hash);
        // Bucket lists keep stale hashes; scans skip entries that no longer
        // resolve. Rebuild when staleness dominates.
        std::size_t bucketed = 0;
        for (const auto& b : buckets_) bucketed += b.size();
        if (bucketed > 4 * (entries_.size() + 16)) {
            for (auto& b : buckets_) b.clear();
            for (const auto& [h, entry] : entries_) index_insert(h, entry.embedding);
        }
    }
}

const CacheEntry* PromptCache::entry(std::uint64_t exact_hash) const {
    auto it = entries_.find(exact_hash);
    return it == entries_.end() ? nullptr : &it->second;
}

namespace {
constexpr char kCacheMagic[4] = {'L', 'S', 'P', 'C'};
constexpr std::uint16_t kCacheVersion = 1;
} // namespace

void PromptCache::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::Io, "cannot write " + path.string());
    out.write(kCacheMagic, 4);
    std::uint16_t version = kCacheVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    std::uint32_t dim = std::uint32_t(cfg_.dim);
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    std::uint64_t count = entries_.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& [hash, e] : entries_) {
        out.write(reinterpret_cast<const char*>(&hash), sizeof(hash));
        out.write(reinterpret_cast<const char*>(e.embedding.v.data()),
                  std::streamsize(cfg_.dim * sizeof(float)));
        const std::string blob = core::Json(e.response).dump();
        std::uint32_t len = std::uint32_t(blob.size());
        out.write(reinterpret_cast<const char*>(&len), sizeof(len));
        out.write(blob.data(), std::streamsize(blob.size()));
    }
    if (!out) raise(Errc::Io, "write failed for " + path.string());
}

void PromptCache::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::Io, "cannot read " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kCacheMagic, 4) != 0) {
        raise(Errc::BadMagic, "not a cache file: " + path.string());
    }
    std::uint16_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != kCacheVersion) {
        raise(Errc::VersionMismatch, "cache file version " + std::to_string(version));
    }
    std::uint32_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (dim != cfg_.dim) {
        raise(Errc::VersionMismatch, "cache dim " + std::to_string(dim) + " != configured " +
                                         std::to_string(cfg_.dim));
    }
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    entries_.clear();
    evict_order_.clear();
    for (auto& b : buckets_) b.clear();
    insert_counter_ = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        CacheEntry e;
        in.read(reinterpret_cast<char*>(&e.exact_hash), sizeof(e.exact_hash));
        e.embedding.v.resize(cfg_.dim);
        in.read(reinterpret_cast<char*>(e.embedding.v.data()),
                std::streamsize(cfg_.dim * sizeof(float)));
        std::uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof(len));
        std::string blob(len, '\0');
        in.read(blob.data(), std::streamsize(len));
        if (!in) raise(Errc::TruncatedFile, "cache file ends mid-record: " + path.string());
        e.response = core::Json::parse(blob).get<InferenceResponse>();
        e.hits = 0;
        e.inserted_at = insert_counter_++;
        index_insert(e.exact_hash, e.embedding);
        evict_order_.emplace(std::make_tuple(e.hits, e.inserted_at, e.exact_hash), e.exact_hash);
        entries_.emplace(e.exact_hash, std::move(e));
    }
}

} // namespace socsim::inference
