#include "socsim/scenarios/opinion.hpp"

#include <algorithm>
#include <cmath>

#include "socsim/core/error.hpp"
#include "socsim/core/rng.hpp"
#include "socsim/surrogate/features.hpp"

namespace socsim::scenarios {

using core::AgentId;
using core::Errc;
using core::Event;
using core::Json;
using core::OpinionState;
using core::raise;

Seeding seeding_from_string(const std::string& s) {
    if (s == "1D1N" || s == "OneD1N" || s == "1d1n") return Seeding::OneD1N;
    if (s == "1A1N" || s == "OneA1N" || s == "1a1n") return Seeding::OneA1N;
    if (s == "random" || s == "Random") return Seeding::Random;
    raise(Errc::InvalidConfig, "unknown seeding regime '" + s + "'");
}

const char* seeding_name(Seeding s) {
    switch (s) {
    case Seeding::OneD1N: return "1D1N";
    case Seeding::OneA1N: return "1A1N";
    case Seeding::Random: return "random";
    }
    return "random";
}

OpinionState agent_opinion(const core::AgentState& a) {
    return core::opinion_from_string(a.internal.at("opinion").get<std::string>());
}

void set_agent_opinion(core::AgentState& a, OpinionState o) {
    a.internal["opinion"] = core::opinion_name(o);
}

void OpinionOps::init(engine::SimSystem& sys, const engine::SimConfig& cfg,
                      const engine::SeedDataset& data) {
    if (!data.topology) {
        raise(Errc::InvalidSeedData, "opinion scenario requires a topology");
    }
    if (!(cfg_.influencer_frac > 0.0) || cfg_.influencer_frac > 1.0 ||
        !(cfg_.sample_frac_per_round > 0.0) || cfg_.sample_frac_per_round > 1.0) {
        raise(Errc::InvalidFraction, "influencer/sample fractions must be in (0,1]");
    }
    engine_workers_ = cfg.workers;
    const graph::CsrGraph& g = *data.topology;
    const std::uint64_t n = g.num_nodes();

    // Profile assignment: sample the pool with replacement, keyed per agent.
    core::RngStream assign(cfg.master_seed, "profile_assign");
    core::RngStream opinion_init(cfg.master_seed, "opinion_init");
    sys.agents.clear();
    sys.agents.reserve(std::size_t(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        core::AgentState a;
        a.id = i;
        a.profile = data.profiles[std::size_t(assign.at(i) % data.profiles.size())];
        a.internal = Json{{"opinion", core::opinion_name(OpinionState(opinion_init.at(i) % 3))}};
        a.external = Json{{"degree", g.degree(i)}, {"influencer", false}};
        a.active = true;
        sys.agents.push_back(std::move(a));
    }

    influencers_ = g.top_degree_fraction(cfg_.influencer_frac);
    is_influencer_.assign(std::size_t(n), false);
    for (AgentId id : influencers_) {
        is_influencer_[std::size_t(id)] = true;
        sys.agents[std::size_t(id)].external["influencer"] = true;
    }
    influencee_count_ = n - influencers_.size();

    // Influencer opinions per seeding regime; the id-sorted alternation
    // guarantees an exact half split with any odd remainder on Neutral.
    for (std::size_t j = 0; j < influencers_.size(); ++j) {
        core::AgentState& a = sys.agents[std::size_t(influencers_[j])];
        switch (cfg_.seeding) {
        case Seeding::OneD1N:
            set_agent_opinion(a, j % 2 == 0 ? OpinionState::Neutral : OpinionState::Disagree);
            break;
        case Seeding::OneA1N:
            set_agent_opinion(a, j % 2 == 0 ? OpinionState::Neutral : OpinionState::Agree);
            break;
        case Seeding::Random:
            break; // keep the general-population draw
        }
    }

    counts_ = {0, 0, 0};
    for (std::uint64_t i = 0; i < n; ++i) {
        if (!is_influencer_[std::size_t(i)]) {
            ++counts_[std::size_t(agent_opinion(sys.agents[std::size_t(i)]))];
        }
    }
    initial_counts_ = counts_;
    count_rows_.clear();
    interactions_.clear();

    sys.env.static_part = Json{{"statement", cfg_.statement},
                               {"seeding", seeding_name(cfg_.seeding)},
                               {"influencer_frac", cfg_.influencer_frac},
                               {"sample_frac_per_round", cfg_.sample_frac_per_round}};
    sys.env.dynamic_part = Json{{"round", 0}};

    for (std::uint64_t r = 1; r <= cfg_.rounds; ++r) {
        Event e;
        e.time = r;
        e.priority = 1; // updates emitted by round r apply first at tick r+1
        e.kind = "opinion_round";
        e.initiators = {core::EntityRef::env()};
        e.targets = {core::EntityRef::env()};
        e.payload = Json{{"round", r}};
        sys.queue.enqueue(std::move(e));
    }
    Event flush;
    flush.time = cfg_.rounds + 1;
    flush.priority = 2;
    flush.kind = "opinion_flush";
    flush.initiators = {core::EntityRef::env()};
    flush.targets = {core::EntityRef::env()};
    flush.payload = Json{{"round", cfg_.rounds}};
    sys.queue.enqueue(std::move(flush));
}

engine::Observation OpinionOps::perceive(const engine::SimSystem& sys,
                                         std::optional<AgentId> agent,
                                         const Event& ev) const {
    engine::Observation obs;
    obs.agent = agent;
    obs.tick = sys.tick;
    obs.visible_env = Json{{"statement", cfg_.statement},
                           {"round", sys.env.dynamic_part.value("round", std::uint64_t(0))}};
    obs.triggering_event = &ev;
    return obs;
}

bool OpinionOps::perception_needed(const Event& ev) const {
    return ev.kind == "opinion_round";
}

std::vector<Event> OpinionOps::policy(const engine::SimSystem& sys,
                                      std::span<const engine::Observation> obs,
                                      inference::InferenceLayer& layer) {
    if (obs.empty() || !obs.front().triggering_event) return {};
    const Event& ev = *obs.front().triggering_event;
    if (ev.kind != "opinion_round") return {};
    const std::uint64_t round = ev.payload.at("round").get<std::uint64_t>();

    const std::uint64_t k = std::uint64_t(
        std::ceil(cfg_.sample_frac_per_round * double(influencers_.size())));
    core::RngStream sampler(sys.master_seed, "round_sample", round);
    const auto picks = sampler.sample_without_replacement(influencers_.size(), k);

    const graph::CsrGraph& g = *sys.topology;
    std::vector<inference::InferenceRequest> reqs;
    std::vector<std::pair<AgentId, AgentId>> pairs; // influencer, influencee
    for (std::uint64_t pick : picks) {
        const AgentId r_id = influencers_[std::size_t(pick)];
        const core::AgentState& r_agent = sys.agent(r_id);
        const OpinionState r_op = agent_opinion(r_agent);
        for (AgentId e_id : g.neighbors_of(r_id)) {
            if (is_influencer_[std::size_t(e_id)] || !sys.is_active(e_id)) continue;
            const core::AgentState& e_agent = sys.agent(e_id);
            inference::InferenceRequest req;
            req.task_class = "opinion_update";
            req.template_id = "opinion_update";
            req.variables = surrogate::opinion_request_variables(
                *r_agent.profile, r_op, *e_agent.profile, agent_opinion(e_agent),
                cfg_.statement);
            req.decode.max_tokens = 256;
            req.decode.temperature = 0.0;
            req.decode.json_schema_id = "opinion_decision";
            req.cacheable = cfg_.cacheable;
            reqs.push_back(std::move(req));
            pairs.emplace_back(r_id, e_id);
        }
    }
    if (reqs.empty()) return {};

    const auto responses = layer.execute(reqs, engine_workers_);
    std::vector<Event> out;
    out.reserve(responses.size());
    for (std::size_t i = 0; i < responses.size(); ++i) {
        const auto [r_id, e_id] = pairs[i];
        const auto& resp = responses[i];
        Json payload{{"influencer", r_id},
                     {"influencee", e_id},
                     {"influencer_opinion", reqs[i].variables.at("influencer_opinion")},
                     {"prior_opinion", reqs[i].variables.at("influencee_opinion")}};
        if (resp.failed) {
            payload["failed"] = true;
            payload["error"] = resp.error;
        } else {
            payload["new_opinion"] = resp.fields.at("opinion").get<std::string>();
        }
        Event e;
        e.time = sys.tick + 1;
        e.priority = 0;
        e.kind = "opinion_update";
        e.initiators = {core::EntityRef::of(r_id)};
        e.targets = {core::EntityRef::of(e_id)};
        e.payload = std::move(payload);
        e.agg_key = "opinion_update:" + std::to_string(sys.tick + 1);
        out.push_back(std::move(e));
    }
    return out;
}

void OpinionOps::record_counts_row(std::uint64_t round) {
    count_rows_.emplace_back(round, counts_);
}

void OpinionOps::apply_event(engine::SimSystem& sys, const Event& ev) {
    if (ev.kind == "opinion_round") {
        const std::uint64_t round = ev.payload.at("round").get<std::uint64_t>();
        sys.env.dynamic_part["round"] = round;
        if (round > 1) {
            record_counts_row(round - 1); // state entering round r = after round r-1
        }
        return;
    }
    if (ev.kind == "opinion_flush") {
        record_counts_row(ev.payload.at("round").get<std::uint64_t>());
        return;
    }
    if (ev.kind != "opinion_update") return;
    engine::for_each_member_payload(ev, [&](const Json& payload) {
        if (payload.value("failed", false)) return;
        const AgentId e_id = payload.at("influencee").get<AgentId>();
        core::AgentState& agent = sys.agent(e_id);
        const OpinionState current = agent_opinion(agent);
        const OpinionState post =
            core::opinion_from_string(payload.at("new_opinion").get<std::string>());
        --counts_[std::size_t(current)];
        ++counts_[std::size_t(post)];
        set_agent_opinion(agent, post);
        InteractionRecord rec;
        rec.influencer = payload.at("influencer").get<AgentId>();
        rec.influencee = e_id;
        rec.influencer_opinion =
            core::opinion_from_string(payload.at("influencer_opinion").get<std::string>());
        rec.prior = core::opinion_from_string(payload.at("prior_opinion").get<std::string>());
        rec.post = post;
        interactions_.push_back(rec);
    });
    sys.metrics.counters["opinion_interactions"] = double(interactions_.size());
}

void OpinionOps::evolve_agent(engine::SimSystem&, core::AgentState&) {}

void OpinionOps::evolve_env(engine::SimSystem& sys) {
    // Environmental drift is limited to the wall tick; round bookkeeping
    // rides on the round events themselves.
    sys.env.dynamic_part["tick"] = sys.tick;
}

core::Table make_counts_table(
    const std::string& name,
    std::span<const std::pair<std::uint64_t, std::array<std::uint64_t, 3>>> rows) {
    core::Table t(name, {"round", "agree", "disagree", "neutral"});
    for (const auto& [round, c] : rows) {
        t.add_row({core::Table::fmt(round), core::Table::fmt(c[0]), core::Table::fmt(c[1]),
                   core::Table::fmt(c[2])});
    }
    return t;
}

core::Table make_shift_table(
    const std::array<std::uint64_t, 3>& initial,
    std::span<const std::pair<std::uint64_t, std::array<std::uint64_t, 3>>> rows) {
    core::Table t("opinion_shift",
                  {"round", "d_agree", "d_disagree", "d_neutral", "l1", "l1_norm"});
    std::array<std::uint64_t, 3> prev = initial;
    for (const auto& [round, c] : rows) {
        double l1 = 0.0;
        std::array<double, 3> d{};
        double total = 0.0;
        for (int i = 0; i < 3; ++i) total += double(c[std::size_t(i)]);
        for (int i = 0; i < 3; ++i) {
            d[std::size_t(i)] = double(c[std::size_t(i)]) - double(prev[std::size_t(i)]);
            l1 += std::fabs(d[std::size_t(i)]);
        }
        t.add_row({core::Table::fmt(round), core::Table::fmt(d[0]), core::Table::fmt(d[1]),
                   core::Table::fmt(d[2]), core::Table::fmt(l1),
                   core::Table::fmt(total > 0 ? l1 / total : 0.0)});
        prev = c;
    }
    return t;
}

namespace {

int income_tercile(int decile) {
    if (decile <= 3) return 1;
    if (decile <= 7) return 2;
    return 3;
}

} // namespace

StratTables influence_stratification(std::span<const InteractionRecord> interactions,
                                     const std::vector<core::AgentState>& agents) {
    struct RateAcc {
        std::uint64_t hits = 0;
        std::uint64_t total = 0;
    };
    std::map<int, RateAcc> success_by_edu, resist_by_edu;
    std::map<std::pair<int, int>, RateAcc> success_by_edu_income;

    for (const InteractionRecord& r : interactions) {
        const Json& r_attrs = agents[std::size_t(r.influencer)].profile->attrs;
        const Json& e_attrs = agents[std::size_t(r.influencee)].profile->attrs;
        const int r_edu = r_attrs.value("education", 0);
        const int e_edu = e_attrs.value("education", 0);
        const int r_income = r_attrs.value("income_decile", 1);
        const bool success = r.post == r.influencer_opinion && r.post != r.prior;
        const bool resisted = r.post == r.prior;
        auto& s = success_by_edu[r_edu];
        ++s.total;
        if (success) ++s.hits;
        auto& res = resist_by_edu[e_edu];
        ++res.total;
        if (resisted) ++res.hits;
        auto& joint = success_by_edu_income[{r_edu, income_tercile(r_income)}];
        ++joint.total;
        if (success) ++joint.hits;
    }

    StratTables t;
    t.success_by_education = core::Table("influence_success_by_education",
                                         {"education", "interactions", "successes", "rate"});
    for (const auto& [edu, acc] : success_by_edu) {
        t.success_by_education.add_row(
            {core::Table::fmt(std::int64_t(edu)), core::Table::fmt(acc.total),
             core::Table::fmt(acc.hits),
             core::Table::fmt(acc.total ? double(acc.hits) / double(acc.total) : 0.0)});
    }
    t.resistance_by_education = core::Table("influence_resistance_by_education",
                                            {"education", "interactions", "resisted", "rate"});
    for (const auto& [edu, acc] : resist_by_edu) {
        t.resistance_by_education.add_row(
            {core::Table::fmt(std::int64_t(edu)), core::Table::fmt(acc.total),
             core::Table::fmt(acc.hits),
             core::Table::fmt(acc.total ? double(acc.hits) / double(acc.total) : 0.0)});
    }
    t.success_by_education_income =
        core::Table("influence_success_by_education_income",
                    {"education", "income_tercile", "interactions", "successes", "rate"});
    for (const auto& [key, acc] : success_by_edu_income) {
        t.success_by_education_income.add_row(
            {core::Table::fmt(std::int64_t(key.first)), core::Table::fmt(std::int64_t(key.second)),
             core::Table::fmt(acc.total), core::Table::fmt(acc.hits),
             core::Table::fmt(acc.total ? double(acc.hits) / double(acc.total) : 0.0)});
    }
    return t;
}

void OpinionOps::finish(engine::SimSystem& sys, inference::InferenceLayer&) {
    sys.metrics.tables.emplace("opinion_counts", make_counts_table("opinion_counts", count_rows_));
    std::vector<std::pair<std::uint64_t, std::array<std::uint64_t, 3>>> initial_row{
        {0, initial_counts_}};
    sys.metrics.tables.emplace("opinion_initial",
                               make_counts_table("opinion_initial", initial_row));
    sys.metrics.tables.emplace("opinion_shift", make_shift_table(initial_counts_, count_rows_));
    StratTables strat = influence_stratification(interactions_, sys.agents);
    sys.metrics.tables.emplace(strat.success_by_education.name, strat.success_by_education);
    sys.metrics.tables.emplace(strat.resistance_by_education.name, strat.resistance_by_education);
    sys.metrics.tables.emplace(strat.success_by_education_income.name,
                               strat.success_by_education_income);
}

std::vector<InteractionRecord> interactions_from_log(
    std::span<const engine::LoggedEvent> events) {
    std::vector<InteractionRecord> out;
    for (const auto& le : events) {
        if (le.status != "applied" || le.event.kind != "opinion_update") continue;
        engine::for_each_member_payload(le.event, [&](const Json& payload) {
            if (payload.value("failed", false)) return;
            InteractionRecord rec;
            rec.influencer = payload.at("influencer").get<AgentId>();
            rec.influencee = payload.at("influencee").get<AgentId>();
            rec.influencer_opinion =
                core::opinion_from_string(payload.at("influencer_opinion").get<std::string>());
            rec.prior = core::opinion_from_string(payload.at("prior_opinion").get<std::string>());
            rec.post = core::opinion_from_string(payload.at("new_opinion").get<std::string>());
            out.push_back(rec);
        });
    }
    return out;
}

OpinionTables opinion_tables_from_log(std::span<const engine::LoggedEvent> events,
                                      const std::vector<core::AgentState>& initial_agents,
                                      std::uint64_t rounds) {
    // Replay opinions from the tick-0 snapshot through the update stream.
    std::vector<OpinionState> opinion(initial_agents.size());
    std::array<std::uint64_t, 3> counts{};
    for (std::size_t i = 0; i < initial_agents.size(); ++i) {
        opinion[i] = agent_opinion(initial_agents[i]);
        if (!initial_agents[i].external.value("influencer", false)) {
            ++counts[std::size_t(opinion[i])];
        }
    }
    const std::array<std::uint64_t, 3> initial = counts;

    std::vector<std::pair<std::uint64_t, std::array<std::uint64_t, 3>>> rows;
    for (const auto& le : events) {
        if (le.status != "applied") continue;
        if (le.event.kind == "opinion_update") {
            engine::for_each_member_payload(le.event, [&](const Json& payload) {
                if (payload.value("failed", false)) return;
                const AgentId e_id = payload.at("influencee").get<AgentId>();
                const OpinionState post =
                    core::opinion_from_string(payload.at("new_opinion").get<std::string>());
                --counts[std::size_t(opinion[std::size_t(e_id)])];
                ++counts[std::size_t(post)];
                opinion[std::size_t(e_id)] = post;
            });
        } else if (le.event.kind == "opinion_round") {
            const std::uint64_t round = le.event.payload.at("round").get<std::uint64_t>();
            if (round > 1) rows.emplace_back(round - 1, counts);
        } else if (le.event.kind == "opinion_flush") {
            rows.emplace_back(le.event.payload.at("round").get<std::uint64_t>(), counts);
        }
    }
    (void)rounds;

    OpinionTables t;
    t.counts = make_counts_table("opinion_counts", rows);
    std::vector<std::pair<std::uint64_t, std::array<std::uint64_t, 3>>> initial_row{{0, initial}};
    t.initial = make_counts_table("opinion_initial", initial_row);
    t.shift = make_shift_table(initial, rows);
    const auto interactions = interactions_from_log(events);
    StratTables strat = influence_stratification(interactions, initial_agents);
    t.success_by_education = strat.success_by_education;
    t.resistance_by_education = strat.resistance_by_education;
    t.success_by_education_income = strat.success_by_education_income;
    return t;
}

} // namespace socsim::scenarios
