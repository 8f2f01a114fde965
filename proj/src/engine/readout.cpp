#include "socsim/engine/readout.hpp"

#include <map>

#include "socsim/core/error.hpp"

namespace socsim::engine {

using core::Errc;
using core::Json;
using core::raise;

std::string age_bucket(int age) {
    if (age <= 34) return "16-34";
    if (age <= 54) return "35-54";
    return "55+";
}

void for_each_member_payload(const core::Event& e,
                             const std::function<void(const Json&)>& fn) {
    if (core::is_merged_event(e)) {
        for (const auto& member : e.payload) {
            fn(member.at("payload"));
        }
    } else {
        fn(e.payload);
    }
}

core::Table run_query(const MetricQuery& q, std::span<const LoggedEvent> events,
                      const std::vector<core::AgentState>& agents) {
    struct Acc {
        double sum = 0.0;
        std::uint64_t count = 0;
    };
    std::map<std::string, Acc> groups;

    for (const LoggedEvent& le : events) {
        if (le.status != "applied" || le.event.kind != q.event_kind) continue;
        for_each_member_payload(le.event, [&](const Json& payload) {
            if (q.skip_failed_payloads && payload.value("failed", false)) return;
            if (!payload.contains(q.subject_field) || payload[q.subject_field].is_null()) return;
            const core::AgentId subject = payload[q.subject_field].get<core::AgentId>();
            if (subject >= agents.size()) {
                raise(Errc::OutOfRange, "subject agent " + std::to_string(subject));
            }
            const core::AgentState& agent = agents[std::size_t(subject)];
            std::string group;
            if (q.group_by == "age_bucket") {
                if (!agent.profile || !agent.profile->attrs.contains("age")) {
                    raise(Errc::UnknownAttribute, "no 'age' attribute for agent " +
                                                      std::to_string(subject));
                }
                group = age_bucket(agent.profile->attrs["age"].get<int>());
            } else {
                if (!agent.profile || !agent.profile->attrs.contains(q.group_by)) {
                    raise(Errc::UnknownAttribute,
                          "no '" + q.group_by + "' attribute for agent " + std::to_string(subject));
                }
                const Json& v = agent.profile->attrs[q.group_by];
                group = v.is_string() ? v.get<std::string>() : v.dump();
            }
            double value = 0.0;
            if (q.agg != MetricQuery::Agg::Count) {
                if (!payload.contains(q.value_field)) return;
                value = payload[q.value_field].get<double>();
            }
            Acc& acc = groups[group];
            acc.sum += value;
            acc.count += 1;
        });
    }

    const char* agg_col = q.agg == MetricQuery::Agg::Mean
                              ? "mean"
                              : (q.agg == MetricQuery::Agg::Sum ? "sum" : "count");
    core::Table t(q.name, {q.group_by, agg_col, "n"});
    for (const auto& [group, acc] : groups) {
        double out = 0.0;
        switch (q.agg) {
        case MetricQuery::Agg::Mean: out = acc.count ? acc.sum / double(acc.count) : 0.0; break;
        case MetricQuery::Agg::Sum: out = acc.sum; break;
        case MetricQuery::Agg::Count: out = double(acc.count); break;
        }
        t.add_row({group, core::Table::fmt(out), core::Table::fmt(std::uint64_t(acc.count))});
    }
    return t;
}

std::vector<core::Table> readout(const SimSystem& sys, std::span<const LoggedEvent> events,
                                 std::span<const MetricQuery> queries) {
    std::vector<core::Table> out;
    out.reserve(queries.size());
    for (const MetricQuery& q : queries) {
        out.push_back(run_query(q, events, sys.agents));
    }
    return out;
}

} // namespace socsim::engine
