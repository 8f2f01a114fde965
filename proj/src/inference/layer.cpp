#include "socsim/inference/layer.hpp"

#include <chrono>
#include <thread>

#include "socsim/core/error.hpp"
#include "socsim/core/hash.hpp"

namespace socsim::inference {

using core::Errc;
using core::raise;

InferenceLayer::InferenceLayer(LayerConfig cfg)
    : cfg_(cfg), cache_([&] {
          CacheConfig c = cfg.cache;
          c.seed = c.seed ? c.seed : cfg.master_seed;
          return c;
      }()),
      router_(cfg.router, cfg.master_seed) {}

void InferenceLayer::register_backend(std::unique_ptr<Backend> backend, BackendConfig meta) {
    if (has_backend(meta.id)) {
        raise(Errc::InvalidConfig, "duplicate backend id '" + meta.id + "'");
    }
    router_.add_backend(meta.id, meta.fidelity_rank, meta.capacity, meta.weight);
    auto stats = std::make_unique<BackendStats>();
    stats->backend_id = meta.id;
    backends_.push_back(Registered{std::move(backend), std::move(meta), std::move(stats)});
}

void InferenceLayer::bind_task(const std::string& task_class, const std::string& backend_id) {
    router_.bind_task(task_class, backend_id);
}

void InferenceLayer::set_task_system_template(const std::string& task_class,
                                              const std::string& template_id) {
    task_system_templates_[task_class] = template_id;
}

void InferenceLayer::register_schema(const std::string& schema_id, SchemaValidator validator) {
    schemas_[schema_id] = std::move(validator);
}

bool InferenceLayer::has_backend(const std::string& id) const {
    for (const auto& r : backends_) {
        if (r.meta.id == id) return true;
    }
    return false;
}

std::vector<std::string> InferenceLayer::backend_ids() const {
    std::vector<std::string> ids;
    ids.reserve(backends_.size());
    for (const auto& r : backends_) ids.push_back(r.meta.id);
    return ids;
}

InferenceLayer::Registered& InferenceLayer::registered(const std::string& id) {
    for (auto& r : backends_) {
        if (r.meta.id == id) return r;
    }
    raise(Errc::InvalidConfig, "backend '" + id + "' is not registered");
}

const InferenceLayer::Registered& InferenceLayer::registered(const std::string& id) const {
    for (const auto& r : backends_) {
        if (r.meta.id == id) return r;
    }
    raise(Errc::InvalidConfig, "backend '" + id + "' is not registered");
}

const BackendStats& InferenceLayer::stats(const std::string& backend_id) const {
    return *registered(backend_id).stats;
}

std::string InferenceLayer::render_prompt(const InferenceRequest& req) const {
    std::string prompt;
    auto sys = task_system_templates_.find(req.task_class);
    if (sys != task_system_templates_.end()) {
        prompt = templates_.text(sys->second);
        prompt += "\n\n";
    }
    prompt += templates_.render(req.template_id, req.variables);
    return prompt;
}

std::string InferenceLayer::route(const InferenceRequest& req) {
    std::lock_guard lock(mu_);
    return router_.route(req.task_class, request_seq_++);
}

BackendReply InferenceLayer::invoke_with_retries(Backend& b, const RenderedRequest& r) {
    const int attempts = b.kind() == BackendKind::Remote ? cfg_.remote_retries + 1 : 1;
    for (int attempt = 0;; ++attempt) {
        try {
            return b.invoke(r);
        } catch (const core::SimError&) {
            if (attempt + 1 >= attempts) throw;
            // Deterministic backoff schedule for remote transport errors.
            std::this_thread::sleep_for(std::chrono::milliseconds(50 << attempt));
        }
    }
}

InferenceResponse InferenceLayer::execute_one(const InferenceRequest& req) {
    return execute(std::span<const InferenceRequest>(&req, 1)).front();
}

std::vector<InferenceResponse> InferenceLayer::execute(std::span<const InferenceRequest> reqs,
                                                       int workers) {
    std::lock_guard lock(mu_);
    if (workers <= 0) workers = cfg_.default_workers;
    const std::size_t n = reqs.size();
    std::vector<InferenceResponse> results(n);

    enum class Kind { Hit, Miss, Linked, Failed };
    struct Plan {
        Kind kind = Kind::Failed;
        std::string prompt;
        std::uint64_t exact_hash = 0;
        std::size_t linked_to = 0;
        Backend* backend = nullptr;
        BackendStats* stats = nullptr;
        InferenceResponse hit;        // Kind::Hit
        std::string error;            // Kind::Failed
        // Invoke results (Kind::Miss), filled by workers.
        BackendReply reply;
        bool invoke_failed = false;
        std::string invoke_error;
        double latency_ms = 0.0;
    };
    std::vector<Plan> plans(n);
    std::map<std::uint64_t, std::size_t> pending; // exact hash -> first miss index
    std::vector<std::size_t> miss_indices;

    // Plan phase: render, cache decisions and routing, strictly in order.
    for (std::size_t i = 0; i < n; ++i) {
        Plan& p = plans[i];
        const InferenceRequest& req = reqs[i];
        const std::uint64_t seq = request_seq_++;
        try {
            p.prompt = render_prompt(req);
        } catch (const core::SimError& e) {
            p.kind = Kind::Failed;
            p.error = e.what();
            continue;
        }
        p.exact_hash = core::fnv1a64(p.prompt);
        if (cfg_.cache.enabled && req.cacheable) {
            if (auto it = pending.find(p.exact_hash); it != pending.end()) {
                p.kind = Kind::Linked;
                p.linked_to = it->second;
                continue;
            }
            if (auto hit = cache_.lookup(p.prompt)) {
                p.kind = Kind::Hit;
                p.hit = std::move(*hit);
                continue;
            }
        }
        try {
            const std::string backend_id = router_.route(req.task_class, seq);
            auto& reg = registered(backend_id);
            p.backend = reg.backend.get();
            p.stats = reg.stats.get();
        } catch (const core::SimError& e) {
            p.kind = Kind::Failed;
            p.error = e.what();
            continue;
        }
        p.kind = Kind::Miss;
        miss_indices.push_back(i);
        if (cfg_.cache.enabled && req.cacheable) {
            pending.emplace(p.exact_hash, i);
        }
    }

    for (auto& reg : backends_) {
        reg.stats->inflight = router_.inflight(reg.meta.id);
    }

    // Invoke phase: backend calls fan out across workers; each worker owns a
    // static slice so result slots are written race-free.
    auto run_slice = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const std::size_t i = miss_indices[k];
            Plan& p = plans[i];
            RenderedRequest rendered{&reqs[i], p.prompt, 0, p.exact_hash};
            const auto t0 = std::chrono::steady_clock::now();
            try {
                p.reply = invoke_with_retries(*p.backend, rendered);
            } catch (const core::SimError& e) {
                p.invoke_failed = true;
                p.invoke_error = e.what();
            }
            p.latency_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        }
    };
    const std::size_t misses = miss_indices.size();
    const std::size_t nworkers = std::min<std::size_t>(std::size_t(std::max(workers, 1)), std::max<std::size_t>(misses, 1));
    if (nworkers <= 1 || misses < 2) {
        run_slice(0, misses);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (std::size_t w = 0; w < nworkers; ++w) {
            const std::size_t begin = misses * w / nworkers;
            const std::size_t end = misses * (w + 1) / nworkers;
            pool.emplace_back(run_slice, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    // Finalize in input order: validation, stats, cache inserts, accounting.
    for (std::size_t i = 0; i < n; ++i) {
        Plan& p = plans[i];
        InferenceResponse& r = results[i];
        const InferenceRequest& req = reqs[i];
        switch (p.kind) {
        case Kind::Failed:
            r.failed = true;
            r.error = p.error;
            break;
        case Kind::Hit:
            r = p.hit; // cache_hit already set by lookup()
            break;
        case Kind::Linked: {
            r = results[p.linked_to];
            if (!r.failed) r.cache_hit = true;
            break;
        }
        case Kind::Miss: {
            r.backend_id = p.stats->backend_id;
            r.latency_ms = p.latency_ms;
            if (p.invoke_failed) {
                r.failed = true;
                r.error = p.invoke_error;
                p.stats->error_count.fetch_add(1);
                break;
            }
            std::optional<std::string> schema_err;
            if (!req.decode.json_schema_id.empty()) {
                auto it = schemas_.find(req.decode.json_schema_id);
                if (it == schemas_.end()) {
                    schema_err = "unknown schema '" + req.decode.json_schema_id + "'";
                } else {
                    schema_err = it->second(p.reply.fields);
                }
            }
            if (schema_err) {
                r.failed = true;
                r.error = "SchemaViolation: " + *schema_err;
                p.stats->error_count.fetch_add(1);
                break;
            }
            r.fields = std::move(p.reply.fields);
            r.tokens_in = p.reply.tokens_in;
            r.tokens_out = p.reply.tokens_out;
            p.stats->total_requests.fetch_add(1);
            p.stats->total_tokens.fetch_add(r.tokens_in + r.tokens_out);
            if (!p.stats->ewma_primed) {
                p.stats->ewma_latency_ms = p.latency_ms;
                p.stats->ewma_primed = true;
            } else {
                p.stats->ewma_latency_ms = 0.9 * p.stats->ewma_latency_ms + 0.1 * p.latency_ms;
            }
            if (cfg_.cache.enabled && req.cacheable) {
                cache_.insert(p.prompt, r);
            }
            break;
        }
        }
        std::vector<std::uint64_t> row(backends_.size(), 0);
        if (!token_series_.empty()) row = token_series_.back();
        if (p.kind == Kind::Miss && !r.failed) {
            for (std::size_t b = 0; b < backends_.size(); ++b) {
                if (backends_[b].stats.get() == p.stats) {
                    row[b] += r.tokens_in + r.tokens_out;
                }
            }
        }
        token_series_.push_back(std::move(row));
    }
    router_.complete_batch();
    for (auto& reg : backends_) {
        reg.stats->inflight = 0;
    }
    return results;
}

core::Table InferenceLayer::token_report() const {
    std::vector<std::string> cols{"request_index"};
    for (const auto& r : backends_) cols.push_back(r.meta.id);
    cols.push_back("llm_total");
    cols.push_back("overall");
    core::Table t("token_usage", cols);
    for (std::size_t i = 0; i < token_series_.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(core::Table::fmt(std::uint64_t(i + 1)));
        std::uint64_t overall = 0, llm = 0;
        for (std::size_t b = 0; b < backends_.size(); ++b) {
            const std::uint64_t v = token_series_[i][b];
            row.push_back(core::Table::fmt(v));
            overall += v;
            if (backends_[b].backend->charges_llm_tokens()) llm += v;
        }
        row.push_back(core::Table::fmt(llm));
        row.push_back(core::Table::fmt(overall));
        t.add_row(std::move(row));
    }
    return t;
}

std::uint64_t InferenceLayer::total_llm_tokens() const {
    std::uint64_t total = 0;
    for (const auto& r : backends_) {
        if (r.backend->charges_llm_tokens()) total += r.stats->total_tokens.load();
    }
    return total;
}

std::uint64_t InferenceLayer::total_tokens() const {
    std::uint64_t total = 0;
    for (const auto& r : backends_) total += r.stats->total_tokens.load();
    return total;
}

} // namespace socsim::inference
