#include "socsim/surrogate/backend.hpp"

namespace socsim::surrogate {

inference::BackendReply SurrogateBackend::invoke(const inference::RenderedRequest& req) {
    const FeatureVector fv = features_from_variables(req.request->variables);
    const auto [opinion, probs] = model_.predict(fv);
    inference::BackendReply reply;
    reply.fields = core::Json{{"thinking_process", ""},
                              {"opinion", core::opinion_name(opinion)}};
    reply.tokens_in = 0;
    reply.tokens_out = 0;
    return reply;
}

} // namespace socsim::surrogate
