#include "socsim/core/agent.hpp"

#include "socsim/core/error.hpp"

namespace socsim::core {

const char* opinion_name(OpinionState o) {
    switch (o) {
    case OpinionState::Agree: return "agree";
    case OpinionState::Disagree: return "disagree";
    case OpinionState::Neutral: return "neutral";
    }
    return "neutral";
}

OpinionState opinion_from_string(const std::string& s) {
    if (s == "agree") return OpinionState::Agree;
    if (s == "disagree") return OpinionState::Disagree;
    if (s == "neutral") return OpinionState::Neutral;
    raise(Errc::OutOfRange, "not an opinion: '" + s + "'");
}

} // namespace socsim::core
