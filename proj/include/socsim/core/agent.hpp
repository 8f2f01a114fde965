#pragma once

#include <memory>
#include <string>

#include "socsim/core/event.hpp"

namespace socsim::core {

enum class OpinionState : int { Agree = 0, Disagree = 1, Neutral = 2 };

// Canonical order: Agree < Disagree < Neutral (used as the argmax tie-break).
constexpr int kOpinionCount = 3;

const char* opinion_name(OpinionState o);
OpinionState opinion_from_string(const std::string& s); // throws OutOfRange

// Static persona: attribute map plus the rendered natural-language text.
// Shared immutably between agents (large populations sample a small pool).
struct Profile {
    Json attrs = Json::object();
    std::string text;
};

using ProfilePtr = std::shared_ptr<const Profile>;

struct AgentState {
    AgentId id = 0;
    ProfilePtr profile;             // immutable after init
    Json internal = Json::object(); // opinion, memory, goals, ...
    Json external = Json::object(); // location, degree, ...
    bool active = true;
};

struct EnvironmentState {
    Json static_part = Json::object();  // immutable after init
    Json dynamic_part = Json::object(); // round counters etc.
};

} // namespace socsim::core
