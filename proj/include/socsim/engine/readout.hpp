#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "socsim/engine/engine.hpp"

namespace socsim::engine {

// Group-by over agent attributes crossed with an aggregate over event
// payload fields. Readout is a pure function of the event log plus the
// agent states, so post-hoc replays reproduce online metrics.
struct MetricQuery {
    enum class Agg { Mean, Sum, Count };

    std::string name;
    std::string event_kind;     // only events of this kind contribute
    std::string subject_field;  // payload field holding the subject agent id
    std::string group_by;       // profile attribute, or derived "age_bucket"
    std::string value_field;    // payload field to aggregate (Count: optional)
    Agg agg = Agg::Mean;
    bool skip_failed_payloads = true; // ignore members flagged failed:true
};

// Bucket labels 16-34, 35-54, 55+.
std::string age_bucket(int age);

// Resolves one member payload of an event (merged payloads contribute each
// member). Throws UnknownAttribute when group_by cannot be resolved for a
// subject's profile.
core::Table run_query(const MetricQuery& q, std::span<const LoggedEvent> events,
                      const std::vector<core::AgentState>& agents);

std::vector<core::Table> readout(const SimSystem& sys, std::span<const LoggedEvent> events,
                                 std::span<const MetricQuery> queries);

// Iterates an event's member payloads (one callback per member).
void for_each_member_payload(const core::Event& e,
                             const std::function<void(const core::Json&)>& fn);

} // namespace socsim::engine
