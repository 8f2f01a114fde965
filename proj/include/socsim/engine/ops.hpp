#pragma once

#include <span>
#include <vector>

#include "socsim/engine/config.hpp"
#include "socsim/engine/system.hpp"
#include "socsim/inference/layer.hpp"

namespace socsim::engine {

// The six simulation operations driving all state transitions. The engine
// owns sequencing; scenarios implement behavior. policy() takes the system
// const: agent and environment state change only through init, apply_event
// (update) and the evolution operations.
class OperationSet {
public:
    virtual ~OperationSet() = default;

    // f_I: installs agents, environment and starting events at tick 0.
    virtual void init(SimSystem& sys, const SimConfig& cfg, const SeedDataset& data) = 0;

    // f_P: builds what the target may see. agent == nullopt for
    // environment-targeted events.
    virtual Observation perceive(const SimSystem& sys, std::optional<core::AgentId> agent,
                                 const core::Event& ev) const = 0;

    // f_Pi: decisions for one event's observations; returns future events
    // (time strictly greater than the current tick).
    virtual std::vector<core::Event> policy(const SimSystem& sys,
                                            std::span<const Observation> obs,
                                            inference::InferenceLayer& layer) = 0;

    // f_U: applies an event to the system.
    virtual void apply_event(SimSystem& sys, const core::Event& ev) = 0;

    // f_A / f_E: interval-driven evolution.
    virtual void evolve_agent(SimSystem& sys, core::AgentState& agent) = 0;
    virtual void evolve_env(SimSystem& sys) = 0;

    // Whether events of this kind trigger perceive/policy at all. Pure
    // bookkeeping events can skip the perception pass.
    virtual bool perception_needed(const core::Event& ev) const {
        (void)ev;
        return true;
    }

    // Readout hook: flush accumulated metric tables at end of run.
    virtual void finish(SimSystem& sys, inference::InferenceLayer& layer) {
        (void)sys;
        (void)layer;
    }
};

} // namespace socsim::engine
