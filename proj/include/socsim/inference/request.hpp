#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "socsim/core/event.hpp"

namespace socsim::inference {

using core::Json;

struct DecodeParams {
    int max_tokens = 256;
    double temperature = 0.0;
    std::string json_schema_id; // empty = unvalidated
};

// Unit of work flowing through cache -> router -> backend.
struct InferenceRequest {
    std::string task_class;  // e.g. "trustor_decision", "opinion_update"
    std::string template_id; // user template; system template comes from the task class
    std::map<std::string, std::string> variables;
    DecodeParams decode;
    bool cacheable = true;
};

struct InferenceResponse {
    Json fields = Json::object(); // schema-validated structured output
    std::uint64_t tokens_in = 0;
    std::uint64_t tokens_out = 0;
    std::string backend_id;
    bool cache_hit = false;
    double latency_ms = 0.0;
    bool failed = false;
    std::string error; // set when failed
};

} // namespace socsim::inference
