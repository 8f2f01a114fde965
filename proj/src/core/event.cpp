#include "socsim/core/event.hpp"

#include <algorithm>
#include <map>

#include "socsim/core/error.hpp"

namespace socsim::core {

void to_json(Json& j, const EntityRef& r) {
    if (r.is_env) {
        j = "env";
    } else {
        j = r.agent;
    }
}

void from_json(const Json& j, EntityRef& r) {
    if (j.is_string()) {
        if (j.get<std::string>() != "env") {
            raise(Errc::InvalidParams, "bad entity ref: " + j.dump());
        }
        r = EntityRef::env();
    } else {
        r = EntityRef::of(j.get<AgentId>());
    }
}

void to_json(Json& j, const Event& e) {
    j = Json{{"seq", e.seq},
             {"time", e.time},
             {"priority", e.priority},
             {"kind", e.kind},
             {"initiators", e.initiators},
             {"targets", e.targets},
             {"payload", e.payload},
             {"agg_key", e.agg_key}};
}

void from_json(const Json& j, Event& e) {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.time = j.at("time").get<Tick>();
    e.priority = j.at("priority").get<std::int32_t>();
    e.kind = j.at("kind").get<std::string>();
    e.initiators = j.at("initiators").get<std::vector<EntityRef>>();
    e.targets = j.at("targets").get<std::vector<EntityRef>>();
    e.payload = j.at("payload");
    e.agg_key = j.at("agg_key").get<std::string>();
}

std::string encode_event(const Event& e) {
    return Json(e).dump();
}

Event decode_event(const std::string& line) {
    return Json::parse(line).get<Event>();
}

bool is_merged_event(const Event& e) {
    return e.payload.is_array() && !e.payload.empty() && e.payload.front().is_object() &&
           e.payload.front().contains("member_seq");
}

std::size_t member_payload_count(const Event& e) {
    return is_merged_event(e) ? e.payload.size() : 1;
}

std::vector<Event> aggregate(std::span<const Event> batch) {
    if (batch.empty()) return {};
    const Tick tick = batch.front().time;
    for (const Event& e : batch) {
        if (e.time != tick) {
            raise(Errc::MixedTick, "aggregate over ticks " + std::to_string(tick) + " and " +
                                       std::to_string(e.time));
        }
    }

    std::map<std::string, std::vector<const Event*>> groups;
    std::vector<const Event*> passthrough;
    for (const Event& e : batch) {
        if (e.agg_key.empty()) {
            passthrough.push_back(&e);
        } else {
            groups[e.agg_key].push_back(&e);
        }
    }

    std::vector<Event> out;
    out.reserve(passthrough.size() + groups.size());
    for (const Event* e : passthrough) out.push_back(*e);

    for (auto& [key, members] : groups) {
        if (members.size() == 1) {
            out.push_back(*members.front());
            continue;
        }
        std::sort(members.begin(), members.end(),
                  [](const Event* a, const Event* b) { return a->seq < b->seq; });
        Event merged;
        merged.time = tick;
        merged.kind = members.front()->kind;
        merged.agg_key = key;
        merged.seq = members.front()->seq;
        merged.priority = members.front()->priority;
        merged.payload = Json::array();
        for (const Event* m : members) {
            merged.priority = std::min(merged.priority, m->priority);
            merged.payload.push_back(Json{{"member_seq", m->seq},
                                          {"member_priority", m->priority},
                                          {"payload", m->payload}});
            for (const EntityRef& r : m->initiators) {
                if (std::find(merged.initiators.begin(), merged.initiators.end(), r) ==
                    merged.initiators.end()) {
                    merged.initiators.push_back(r);
                }
            }
            for (const EntityRef& r : m->targets) {
                if (std::find(merged.targets.begin(), merged.targets.end(), r) ==
                    merged.targets.end()) {
                    merged.targets.push_back(r);
                }
            }
        }
        out.push_back(std::move(merged));
    }

    std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
        if (a.priority != b.priority) return a.priority < b.priority;
        return a.seq < b.seq;
    });
    return out;
}

} // namespace socsim::core
