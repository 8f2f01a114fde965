#pragma once

#include "socsim/inference/backend.hpp"
#include "socsim/surrogate/model.hpp"

namespace socsim::surrogate {

// Serves a trained model as an inference backend for "opinion_update"
// requests: decodes the request variables into a feature vector, predicts,
// and answers with zero token cost.
class SurrogateBackend : public inference::Backend {
public:
    SurrogateBackend(std::string id, SurrogateModel model)
        : id_(std::move(id)), model_(std::move(model)) {}

    const std::string& id() const override { return id_; }
    inference::BackendKind kind() const override { return inference::BackendKind::Surrogate; }
    inference::BackendReply invoke(const inference::RenderedRequest& req) override;

    const SurrogateModel& model() const { return model_; }

private:
    std::string id_;
    SurrogateModel model_;
};

} // namespace socsim::surrogate
