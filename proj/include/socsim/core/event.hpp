#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace socsim::core {

using Json = nlohmann::json;
using AgentId = std::uint64_t;
using Tick = std::uint64_t;

// Either a concrete agent or the environment.
struct EntityRef {
    bool is_env = false;
    AgentId agent = 0;

    static EntityRef env() { return EntityRef{true, 0}; }
    static EntityRef of(AgentId id) { return EntityRef{false, id}; }

    bool operator==(const EntityRef&) const = default;
    bool operator<(const EntityRef& o) const {
        if (is_env != o.is_env) return !is_env;
        return agent < o.agent;
    }
};

void to_json(Json& j, const EntityRef& r);
void from_json(const Json& j, EntityRef& r);

// Timestamped, prioritized interaction record. Lower priority executes
// first within a tick; seq is the global enqueue sequence number and the
// final tie-break.
struct Event {
    std::uint64_t seq = 0;
    Tick time = 0;
    std::int32_t priority = 0;
    std::string kind;
    std::vector<EntityRef> initiators;
    std::vector<EntityRef> targets;
    Json payload = Json::object();
    std::string agg_key; // empty = never aggregated

    bool operator==(const Event&) const = default;
};

void to_json(Json& j, const Event& e);
void from_json(const Json& j, Event& e);

std::string encode_event(const Event& e);
Event decode_event(const std::string& line);

// Merges same-tick events that share a non-empty agg_key. Groups of size
// >= 2 collapse into one event whose payload is the list of member records
// {seq, priority, payload} in seq order; initiators/targets are the
// first-occurrence-ordered unions; priority and seq take the group minimum.
// Singleton groups and events with empty agg_key pass through unchanged.
// Output is sorted by (priority, seq). Throws MixedTick if the batch spans
// more than one tick.
std::vector<Event> aggregate(std::span<const Event> batch);

// Number of member payloads an event carries: list length for merged
// events, 1 otherwise. aggregate() conserves the total.
std::size_t member_payload_count(const Event& e);

bool is_merged_event(const Event& e);

} // namespace socsim::core
