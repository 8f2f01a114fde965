#pragma once

#include <span>

#include "socsim/engine/ops.hpp"
#include "socsim/engine/readout.hpp"
#include "socsim/scenarios/profile.hpp"

namespace socsim::scenarios {

enum class Seeding { OneD1N, OneA1N, Random };

Seeding seeding_from_string(const std::string& s);
const char* seeding_name(Seeding s);

struct OpinionConfig {
    std::string statement = "AI automation will lead to mass unemployment";
    Seeding seeding = Seeding::Random;
    double influencer_frac = 0.20;
    double sample_frac_per_round = 0.01;
    std::uint64_t rounds = 20;
    bool cacheable = false; // reuse responses via the semantic cache
};

// Per-interaction record extracted from opinion_update events.
struct InteractionRecord {
    core::AgentId influencer = 0;
    core::AgentId influencee = 0;
    core::OpinionState influencer_opinion = core::OpinionState::Neutral;
    core::OpinionState prior = core::OpinionState::Neutral;
    core::OpinionState post = core::OpinionState::Neutral;
};

struct OpinionTables {
    core::Table counts;     // one row per round (1..R), after that round's updates
    core::Table initial;    // round-0 distribution
    core::Table shift;      // per-round deltas and L1 distances
    core::Table success_by_education;
    core::Table resistance_by_education;
    core::Table success_by_education_income;
};

// Rounds proceed one per tick: an opinion_round event (priority 1) samples
// ceil(sample_frac * |influencers|) influencers without replacement and
// issues one opinion_update request per non-influencer neighbor as a single
// bulk batch; the resulting update events apply at the next tick (priority
// 0) before the next round samples. Influencer opinions never change.
class OpinionOps : public engine::OperationSet {
public:
    explicit OpinionOps(OpinionConfig cfg) : cfg_(std::move(cfg)) {}

    void init(engine::SimSystem& sys, const engine::SimConfig& cfg,
              const engine::SeedDataset& data) override;
    engine::Observation perceive(const engine::SimSystem& sys,
                                 std::optional<core::AgentId> agent,
                                 const core::Event& ev) const override;
    std::vector<core::Event> policy(const engine::SimSystem& sys,
                                    std::span<const engine::Observation> obs,
                                    inference::InferenceLayer& layer) override;
    void apply_event(engine::SimSystem& sys, const core::Event& ev) override;
    void evolve_agent(engine::SimSystem& sys, core::AgentState& agent) override;
    void evolve_env(engine::SimSystem& sys) override;
    bool perception_needed(const core::Event& ev) const override;
    void finish(engine::SimSystem& sys, inference::InferenceLayer& layer) override;

    const std::vector<core::AgentId>& influencers() const { return influencers_; }
    std::uint64_t influencee_count() const { return influencee_count_; }
    const std::array<std::uint64_t, 3>& current_counts() const { return counts_; }

private:
    void record_counts_row(std::uint64_t round);

    OpinionConfig cfg_;
    int engine_workers_ = 1;
    std::vector<core::AgentId> influencers_; // sorted by id
    std::vector<bool> is_influencer_;
    std::uint64_t influencee_count_ = 0;
    std::array<std::uint64_t, 3> counts_{}; // influencee opinions, live
    std::array<std::uint64_t, 3> initial_counts_{};
    std::vector<std::pair<std::uint64_t, std::array<std::uint64_t, 3>>> count_rows_;
    std::vector<InteractionRecord> interactions_;
};

core::OpinionState agent_opinion(const core::AgentState& a);
void set_agent_opinion(core::AgentState& a, core::OpinionState o);

// Stratification tables from interaction records. Success: the influencee
// adopted the influencer's differing opinion. Resistance: the influencee's
// opinion did not change. Income terciles: deciles 1-3, 4-7, 8-10.
struct StratTables {
    core::Table success_by_education;
    core::Table resistance_by_education;
    core::Table success_by_education_income;
};
StratTables influence_stratification(std::span<const InteractionRecord> interactions,
                                     const std::vector<core::AgentState>& agents);

std::vector<InteractionRecord> interactions_from_log(std::span<const engine::LoggedEvent> events);

// Replay: rebuilds the full opinion table set from a persisted event log
// plus the tick-0 snapshot. Must equal the online tables.
OpinionTables opinion_tables_from_log(std::span<const engine::LoggedEvent> events,
                                      const std::vector<core::AgentState>& initial_agents,
                                      std::uint64_t rounds);

core::Table make_counts_table(
    const std::string& name,
    std::span<const std::pair<std::uint64_t, std::array<std::uint64_t, 3>>> rows);
core::Table make_shift_table(const std::array<std::uint64_t, 3>& initial,
                             std::span<const std::pair<std::uint64_t, std::array<std::uint64_t, 3>>> rows);

} // namespace socsim::scenarios
