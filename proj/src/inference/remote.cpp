#include "socsim/inference/remote.hpp"

#include <cctype>
#include <cstdlib>

#include <httplib.h>

#include "socsim/core/error.hpp"

namespace socsim::inference {

using core::Errc;
using core::raise;

namespace {

std::string default_auth_env(const std::string& id) {
    std::string env = "LS_";
    for (char c : id) {
        env.push_back(std::isalnum(static_cast<unsigned char>(c))
                          ? char(std::toupper(static_cast<unsigned char>(c)))
                          : '_');
    }
    env += "_API_KEY";
    return env;
}

// Splits "http://host:port/prefix" into client target and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const std::size_t slash = url.find('/', host_start);
    if (slash == std::string::npos) {
        return {url, ""};
    }
    return {url.substr(0, slash), url.substr(slash)};
}

} // namespace

RemoteHttpBackend::RemoteHttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) {
        raise(Errc::InvalidConfig, "remote backend '" + cfg_.id + "' needs base_url");
    }
    const std::string env = cfg_.auth_env.empty() ? default_auth_env(cfg_.id) : cfg_.auth_env;
    if (const char* v = std::getenv(env.c_str())) {
        auth_token_ = v;
    }
}

Json RemoteHttpBackend::extract_json_object(const std::string& text) {
    const std::size_t open = text.find('{');
    if (open == std::string::npos) {
        raise(Errc::BackendFailure, "no JSON object in completion");
    }
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) {
                const std::string blob = text.substr(open, i - open + 1);
                Json parsed = Json::parse(blob, nullptr, false);
                if (parsed.is_discarded()) {
                    raise(Errc::BackendFailure, "malformed JSON in completion");
                }
                return parsed;
            }
        }
    }
    raise(Errc::BackendFailure, "unbalanced JSON object in completion");
}

BackendReply RemoteHttpBackend::invoke(const RenderedRequest& req) {
    auto [target, prefix] = split_base_url(cfg_.base_url);
    httplib::Client client(target);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!auth_token_.empty()) {
        headers.emplace("Authorization", "Bearer " + auth_token_);
    }

    std::string path;
    Json body;
    if (cfg_.api_shape == "openai_chat") {
        path = prefix + "/v1/chat/completions";
        // The rendered prompt carries system text and user text joined by a
        // blank line; providers accept the whole thing as the user turn.
        body = Json{{"model", cfg_.model_name},
                    {"messages", Json::array({Json{{"role", "user"}, {"content", req.prompt}}})},
                    {"max_tokens", req.request->decode.max_tokens},
                    {"temperature", req.request->decode.temperature}};
    } else if (cfg_.api_shape == "raw") {
        path = prefix.empty() ? "/" : prefix;
        body = Json{{"prompt", req.prompt},
                    {"max_tokens", req.request->decode.max_tokens},
                    {"temperature", req.request->decode.temperature}};
    } else {
        raise(Errc::InvalidConfig, "unknown api_shape '" + cfg_.api_shape + "'");
    }

    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        raise(Errc::BackendFailure, "transport error to " + cfg_.base_url);
    }
    if (res->status < 200 || res->status >= 300) {
        raise(Errc::BackendFailure,
              "HTTP " + std::to_string(res->status) + " from " + cfg_.base_url);
    }
    Json parsed = Json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        raise(Errc::BackendFailure, "non-JSON reply from " + cfg_.base_url);
    }

    BackendReply reply;
    std::string content;
    if (cfg_.api_shape == "openai_chat") {
        try {
            content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const Json::exception&) {
            raise(Errc::BackendFailure, "unexpected completion shape from " + cfg_.base_url);
        }
        if (parsed.contains("usage")) {
            reply.tokens_in = parsed["usage"].value("prompt_tokens", 0);
            reply.tokens_out = parsed["usage"].value("completion_tokens", 0);
        }
    } else {
        content = parsed.value("text", "");
        reply.tokens_in = parsed.value("tokens_in", whitespace_token_count(req.prompt));
        reply.tokens_out = parsed.value("tokens_out", whitespace_token_count(content));
    }
    if (reply.tokens_in == 0) reply.tokens_in = whitespace_token_count(req.prompt);
    if (reply.tokens_out == 0) reply.tokens_out = whitespace_token_count(content);
    reply.fields = extract_json_object(content);
    return reply;
}

} // namespace socsim::inference
