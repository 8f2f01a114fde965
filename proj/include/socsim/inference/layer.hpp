#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "socsim/core/table.hpp"
#include "socsim/inference/backend.hpp"
#include "socsim/inference/cache.hpp"
#include "socsim/inference/router.hpp"
#include "socsim/inference/templates.hpp"

namespace socsim::inference {

// Returns an error description, or nullopt when the fields validate.
using SchemaValidator = std::function<std::optional<std::string>(const Json&)>;

struct LayerConfig {
    CacheConfig cache;
    RouterConfig router;
    std::uint64_t master_seed = 0;
    int default_workers = 1;
    int remote_retries = 2; // mock and surrogate backends never retry
};

// The mixture-of-models execution layer: prompt rendering, semantic cache,
// routing, bulk dispatch, schema validation and token accounting.
//
// execute() resolves cache decisions and routing sequentially in input
// order, fans the resulting backend calls out across workers, then
// finalizes responses in input order. Hit/miss decisions therefore depend
// only on the request sequence, never on worker count or completion order.
// Within one batch, later exact-duplicate prompts coalesce onto the first
// occurrence and report as cache hits; semantic lookups see the cache state
// from before the batch.
class InferenceLayer {
public:
    explicit InferenceLayer(LayerConfig cfg);

    TemplateStore& templates() { return templates_; }
    const TemplateStore& templates() const { return templates_; }

    void register_backend(std::unique_ptr<Backend> backend, BackendConfig meta);
    void bind_task(const std::string& task_class, const std::string& backend_id);
    void set_task_system_template(const std::string& task_class, const std::string& template_id);
    void register_schema(const std::string& schema_id, SchemaValidator validator);

    bool has_backend(const std::string& id) const;
    std::vector<std::string> backend_ids() const; // registration order

    std::string render_prompt(const InferenceRequest& req) const;

    std::vector<InferenceResponse> execute(std::span<const InferenceRequest> reqs, int workers = 0);
    InferenceResponse execute_one(const InferenceRequest& req);

    // Deterministic routing decision for one request (consumes a sequence
    // number and a logical slot, mirroring what execute() would do).
    std::string route(const InferenceRequest& req);

    Router& router() { return router_; }
    PromptCache& cache() { return cache_; }
    const PromptCache& cache() const { return cache_; }
    bool cache_enabled() const { return cfg_.cache.enabled; }

    const BackendStats& stats(const std::string& backend_id) const;

    // Cumulative (tokens_in + tokens_out) per backend and overall, one row
    // per request in dispatch order.
    core::Table token_report() const;
    std::uint64_t total_llm_tokens() const;
    std::uint64_t total_tokens() const;
    std::uint64_t requests_seen() const { return request_seq_; }

private:
    struct Registered {
        std::unique_ptr<Backend> backend;
        BackendConfig meta;
        std::unique_ptr<BackendStats> stats;
    };

    Registered& registered(const std::string& id);
    const Registered& registered(const std::string& id) const;
    BackendReply invoke_with_retries(Backend& b, const RenderedRequest& r);

    LayerConfig cfg_;
    TemplateStore templates_;
    PromptCache cache_;
    Router router_;
    std::vector<Registered> backends_;
    std::map<std::string, SchemaValidator> schemas_;
    std::map<std::string, std::string> task_system_templates_;
    std::uint64_t request_seq_ = 0;
    std::vector<std::vector<std::uint64_t>> token_series_; // row: cumulative per backend
    std::mutex mu_;
};

} // namespace socsim::inference
