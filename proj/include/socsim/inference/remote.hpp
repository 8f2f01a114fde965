#pragma once

#include <string>

#include "socsim/inference/backend.hpp"

namespace socsim::inference {

// Generic HTTP JSON-completion client. Two request shapes:
//   "openai_chat": POST {base_url}/v1/chat/completions with a system+user
//                  message pair; the reply text is choices[0].message.content.
//   "raw":         POST {base_url} with {"prompt", "max_tokens",
//                  "temperature"}; the reply text is the "text" field.
// The reply text must contain a JSON object, which becomes the response
// fields. The bearer token is read from auth_env (default LS_<ID>_API_KEY,
// id upper-cased). Not exercised by the offline test suites.
class RemoteHttpBackend : public Backend {
public:
    explicit RemoteHttpBackend(BackendConfig cfg);

    const std::string& id() const override { return cfg_.id; }
    BackendKind kind() const override { return BackendKind::Remote; }
    BackendReply invoke(const RenderedRequest& req) override;

    static Json extract_json_object(const std::string& text); // exposed for tests

private:
    BackendConfig cfg_;
    std::string auth_token_;
};

} // namespace socsim::inference
