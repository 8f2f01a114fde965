#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "socsim/core/agent.hpp"
#include "socsim/core/event_queue.hpp"
#include "socsim/core/table.hpp"
#include "socsim/graph/csr.hpp"

namespace socsim::engine {

struct MetricsStore {
    std::map<std::string, core::Table> tables;
    std::map<std::string, double> counters;

    core::Table& table(const std::string& name, std::vector<std::string> columns);
    bool operator==(const MetricsStore&) const = default;
};

// Seed input: profile pool, optional topology, scenario-specific sections.
struct SeedDataset {
    std::vector<core::ProfilePtr> profiles;
    std::shared_ptr<const graph::CsrGraph> topology;
    core::Json sections = core::Json::object();
};

// Single source of truth during a run; mutated only by the update and
// evolution operations.
struct SimSystem {
    core::Tick tick = 0;
    std::vector<core::AgentState> agents;
    core::EnvironmentState env;
    core::EventQueue queue;
    std::uint64_t master_seed = 0;
    MetricsStore metrics;
    std::shared_ptr<const graph::CsrGraph> topology;

    core::AgentState& agent(core::AgentId id);
    const core::AgentState& agent(core::AgentId id) const;
    bool is_active(core::AgentId id) const;

    // Digest over agent and environment state (mutation-closure checks).
    std::string state_digest_hex() const;
};

struct Observation {
    std::optional<core::AgentId> agent; // nullopt = environment scope
    core::Tick tick = 0;
    core::Json visible_env = core::Json::object();
    std::vector<std::pair<core::AgentId, core::Json>> visible_neighbors;
    const core::Event* triggering_event = nullptr; // valid during the batch only
};

} // namespace socsim::engine
