#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "socsim/inference/request.hpp"

namespace socsim::inference {

enum class BackendKind { Mock, Surrogate, Remote };

BackendKind backend_kind_from_string(const std::string& s);

// Registry entry from the [backends] config section.
struct BackendConfig {
    std::string id;
    std::string kind = "mock";
    int fidelity_rank = 1; // 1 = highest fidelity
    std::uint64_t capacity = 64;
    double weight = 1.0;
    std::string base_url;   // remote only
    std::string auth_env;   // remote; defaults to LS_<ID>_API_KEY
    std::string api_shape = "openai_chat";
    std::string model_name; // remote
    std::string model_path; // surrogate
    std::string tasks;      // comma-separated task classes; empty = bind to all
};

struct BackendStats {
    std::string backend_id;
    std::uint64_t inflight = 0; // logical slots taken in the current bulk batch
    std::atomic<std::uint64_t> total_requests{0};
    std::atomic<std::uint64_t> total_tokens{0};
    std::atomic<std::uint64_t> error_count{0};
    double ewma_latency_ms = 0.0;
    bool ewma_primed = false;
};

struct RenderedRequest {
    const InferenceRequest* request = nullptr;
    std::string prompt;
    std::uint64_t seq = 0;
    std::uint64_t exact_hash = 0;
};

struct BackendReply {
    Json fields;
    std::uint64_t tokens_in = 0;
    std::uint64_t tokens_out = 0;
};

// Inference backend. invoke() must be thread-safe: bulk batches fan out
// across workers.
class Backend {
public:
    virtual ~Backend() = default;
    virtual const std::string& id() const = 0;
    virtual BackendKind kind() const = 0;
    // Surrogates answer locally and charge no LLM tokens.
    bool charges_llm_tokens() const { return kind() != BackendKind::Surrogate; }
    virtual BackendReply invoke(const RenderedRequest& req) = 0;
};

std::uint64_t whitespace_token_count(std::string_view text);

// Deterministic stand-in for an LLM. A responder per task class computes
// the structured reply from the request variables; the reply is a pure
// function of (rendered prompt, master seed) because every variable a
// responder reads is also substituted into the prompt. Token counts are
// whitespace-split unit counts of the prompt and of the rendered reply.
class MockBackend : public Backend {
public:
    using Responder =
        std::function<Json(const InferenceRequest&, const std::string& prompt, std::uint64_t seed)>;

    MockBackend(std::string id, std::uint64_t master_seed);

    void set_responder(const std::string& task_class, Responder fn);

    const std::string& id() const override { return id_; }
    BackendKind kind() const override { return BackendKind::Mock; }
    BackendReply invoke(const RenderedRequest& req) override;

private:
    std::string id_;
    std::uint64_t master_seed_;
    std::map<std::string, Responder> responders_;
};

} // namespace socsim::inference
