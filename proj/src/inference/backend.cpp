#include "socsim/inference/backend.hpp"

#include <cctype>

#include "socsim/core/error.hpp"

namespace socsim::inference {

using core::Errc;
using core::raise;

BackendKind backend_kind_from_string(const std::string& s) {
    if (s == "mock") return BackendKind::Mock;
    if (s == "surrogate") return BackendKind::Surrogate;
    if (s == "remote") return BackendKind::Remote;
    raise(Errc::InvalidConfig, "unknown backend kind '" + s + "'");
}

std::uint64_t whitespace_token_count(std::string_view text) {
    std::uint64_t n = 0;
    bool in_token = false;
    for (char ch : text) {
        const bool ws = std::isspace(static_cast<unsigned char>(ch)) != 0;
        if (!ws && !in_token) ++n;
        in_token = !ws;
    }
    return n;
}

MockBackend::MockBackend(std::string id, std::uint64_t master_seed)
    : id_(std::move(id)), master_seed_(master_seed) {}

void MockBackend::set_responder(const std::string& task_class, Responder fn) {
    responders_[task_class] = std::move(fn);
}

BackendReply MockBackend::invoke(const RenderedRequest& req) {
    auto it = responders_.find(req.request->task_class);
    if (it == responders_.end()) {
        raise(Errc::BackendFailure,
              "mock backend " + id_ + " has no responder for task '" + req.request->task_class + "'");
    }
    BackendReply reply;
    reply.fields = it->second(*req.request, req.prompt, master_seed_);
    reply.tokens_in = whitespace_token_count(req.prompt);
    reply.tokens_out = whitespace_token_count(reply.fields.dump());
    return reply;
}

} // namespace socsim::inference
