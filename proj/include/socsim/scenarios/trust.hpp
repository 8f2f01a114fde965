#pragma once

#include <optional>
#include <span>

#include "socsim/engine/ops.hpp"
#include "socsim/engine/readout.hpp"
#include "socsim/scenarios/profile.hpp"

namespace socsim::scenarios {

// One recorded trust-game decision. Trustor rows capture the send decision
// (R fixed at 0); trustee rows capture the return decision for one
// hypothetical received amount (3, 6, ..., 30).
struct TrustOutcome {
    enum class Role { Trustor, Trustee };
    Role role = Role::Trustor;
    std::optional<core::AgentId> trustor_id;
    std::optional<core::AgentId> trustee_id;
    int n_sent = 0;     // 0..10
    int received = 0;   // 3 * n_sent
    int r_returned = 0; // 0..received
    int trustor_net = 0;
    int trustee_net = 0;
    std::string thinking;
    bool failed = false;
    std::string error;
};

void to_json(core::Json& j, const TrustOutcome& o);
void from_json(const core::Json& j, TrustOutcome& o);

struct TrustGameConfig {
    bool trustor_role = true;
    bool trustee_role = true;
    int workers = 1;
};

// Direct (engine-less) protocol: each profile decides once as trustor and,
// when enabled, ten times as trustee for received amounts 3N, N = 1..10.
// Out-of-range amounts are resampled once, then the decision is recorded
// failed.
std::vector<TrustOutcome> trust_game_round(std::span<const core::ProfilePtr> profiles,
                                           inference::InferenceLayer& layer,
                                           const TrustGameConfig& cfg);

// Readout tables (Fig-style aggregates) from recorded outcomes.
struct TrustTables {
    core::Table send_mean_by_class;
    core::Table send_mean_by_education;
    core::Table send_mean_by_age_bucket;
    core::Table send_hist_by_class;
    core::Table return_by_received;
    core::Table return_at_fixed_received; // stratified by class/urban/education
};
TrustTables trust_tables(std::span<const TrustOutcome> outcomes,
                         std::span<const core::ProfilePtr> profiles,
                         int fixed_received = 9);

// Scaling experiment: per (size, trial) the mean trustor send for ages
// 16-34 and 55+; per size the age-gap mean with a 95% t-interval over
// trials. Profiles are synthesized per cell from the seed.
struct TrustScalingResult {
    core::Table trials;  // size, trial, mean_young, mean_old, gap
    core::Table summary; // size, gap_mean, ci_low, ci_high, ci_width, ci_defined
};
TrustScalingResult trust_scaling_experiment(std::span<const std::uint64_t> sizes, int trials,
                                            inference::InferenceLayer& layer, std::uint64_t seed);

// Two-sided 97.5% Student-t quantile (95% interval half-width multiplier).
double t_quantile_975(int dof);

// Engine operation set for the trust-game scenario: init enqueues one
// trustor-decision event per profile plus ten trustee-decision events, all
// at tick 0; decisions run through the inference layer and land as
// trust_outcome events at tick 1.
class TrustOps : public engine::OperationSet {
public:
    explicit TrustOps(TrustGameConfig cfg = {}) : cfg_(cfg) {}

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

    const std::vector<TrustOutcome>& outcomes() const { return outcomes_; }

private:
    TrustGameConfig cfg_;
    int engine_workers_ = 1;
    std::vector<TrustOutcome> outcomes_;
};

// Rebuilds the trust tables from a persisted event log + snapshot agents
// (replay path; must equal the online tables).
TrustTables trust_tables_from_log(std::span<const engine::LoggedEvent> events,
                                  const std::vector<core::AgentState>& agents,
                                  int fixed_received = 9);

} // namespace socsim::scenarios
