#include "socsim/scenarios/trust.hpp"

#include <algorithm>
#include <cmath>

#include "socsim/core/error.hpp"
#include "socsim/core/rng.hpp"

namespace socsim::scenarios {

using core::AgentId;
using core::Errc;
using core::Event;
using core::Json;
using core::raise;

void to_json(Json& j, const TrustOutcome& o) {
    j = Json{{"role", o.role == TrustOutcome::Role::Trustor ? "trustor" : "trustee"},
             {"trustor_id", o.trustor_id ? Json(*o.trustor_id) : Json()},
             {"trustee_id", o.trustee_id ? Json(*o.trustee_id) : Json()},
             {"n_sent", o.n_sent},
             {"received", o.received},
             {"r_returned", o.r_returned},
             {"trustor_net", o.trustor_net},
             {"trustee_net", o.trustee_net},
             {"thinking", o.thinking},
             {"failed", o.failed},
             {"error", o.error}};
}

void from_json(const Json& j, TrustOutcome& o) {
    o.role = j.at("role").get<std::string>() == "trustor" ? TrustOutcome::Role::Trustor
                                                          : TrustOutcome::Role::Trustee;
    o.trustor_id = j.at("trustor_id").is_null()
                       ? std::nullopt
                       : std::optional<AgentId>(j.at("trustor_id").get<AgentId>());
    o.trustee_id = j.at("trustee_id").is_null()
                       ? std::nullopt
                       : std::optional<AgentId>(j.at("trustee_id").get<AgentId>());
    o.n_sent = j.at("n_sent").get<int>();
    o.received = j.at("received").get<int>();
    o.r_returned = j.at("r_returned").get<int>();
    o.trustor_net = j.at("trustor_net").get<int>();
    o.trustee_net = j.at("trustee_net").get<int>();
    o.thinking = j.at("thinking").get<std::string>();
    o.failed = j.at("failed").get<bool>();
    o.error = j.at("error").get<std::string>();
}

namespace {

std::string attr_string(const Json& attrs, const char* key) {
    if (!attrs.contains(key)) return "";
    const Json& v = attrs[key];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    return v.dump();
}

inference::InferenceRequest make_trustor_request(const core::Profile& p, bool cacheable) {
    inference::InferenceRequest req;
    req.task_class = "trustor_decision";
    req.template_id = "trustor";
    req.variables["profile_text"] = p.text;
    req.variables["social_class"] = attr_string(p.attrs, "social_class");
    req.variables["education"] = attr_string(p.attrs, "education");
    req.variables["age"] = attr_string(p.attrs, "age");
    req.decode.max_tokens = 256;
    req.decode.temperature = 0.0;
    req.decode.json_schema_id = "trust_decision";
    req.cacheable = cacheable;
    return req;
}

inference::InferenceRequest make_trustee_request(const core::Profile& p, int received,
                                                 bool cacheable) {
    inference::InferenceRequest req = make_trustor_request(p, cacheable);
    req.task_class = "trustee_decision";
    req.template_id = "trustee";
    req.variables["amount_received"] = std::to_string(received);
    req.variables["amount_sent"] = std::to_string(received / 3);
    return req;
}

struct Decision {
    int amount = 0;
    std::string thinking;
    bool failed = false;
    std::string error;
};

// Executes the batch, resamples schema/range failures once, flags the rest.
std::vector<Decision> run_decisions(inference::InferenceLayer& layer,
                                    std::vector<inference::InferenceRequest> requests,
                                    const std::vector<int>& max_amount, int workers) {
    auto parse = [&](const inference::InferenceResponse& resp, std::size_t i,
                     Decision& d) -> bool {
        if (resp.failed) {
            d.error = resp.error;
            return false;
        }
        const std::int64_t amount = resp.fields.at("amount").get<std::int64_t>();
        if (amount < 0 || amount > max_amount[i]) {
            d.error = "amount " + std::to_string(amount) + " outside [0," +
                      std::to_string(max_amount[i]) + "]";
            return false;
        }
        d.amount = int(amount);
        d.thinking = resp.fields.value("thinking_process", "");
        d.failed = false;
        d.error.clear();
        return true;
    };

    std::vector<Decision> out(requests.size());
    const auto responses = layer.execute(requests, workers);
    std::vector<std::size_t> retry;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        if (!parse(responses[i], i, out[i])) {
            out[i].failed = true;
            retry.push_back(i);
        }
    }
    if (!retry.empty()) {
        std::vector<inference::InferenceRequest> again;
        again.reserve(retry.size());
        for (std::size_t i : retry) {
            inference::InferenceRequest r = requests[i];
            r.variables["retry"] = "1";
            r.cacheable = false;
            again.push_back(std::move(r));
        }
        const auto second = layer.execute(again, workers);
        for (std::size_t k = 0; k < retry.size(); ++k) {
            const std::size_t i = retry[k];
            if (parse(second[k], i, out[i])) {
                out[i].failed = false;
            } else {
                out[i].failed = true;
            }
        }
    }
    return out;
}

TrustOutcome trustor_outcome(AgentId id, const Decision& d) {
    TrustOutcome o;
    o.role = TrustOutcome::Role::Trustor;
    o.trustor_id = id;
    o.n_sent = d.failed ? 0 : d.amount;
    o.received = 3 * o.n_sent;
    o.r_returned = 0;
    o.trustor_net = o.r_returned - o.n_sent;
    o.trustee_net = o.received - o.r_returned;
    o.thinking = d.thinking;
    o.failed = d.failed;
    o.error = d.error;
    return o;
}

TrustOutcome trustee_outcome(AgentId id, int received, const Decision& d) {
    TrustOutcome o;
    o.role = TrustOutcome::Role::Trustee;
    o.trustee_id = id;
    o.n_sent = received / 3;
    o.received = received;
    o.r_returned = d.failed ? 0 : d.amount;
    o.trustor_net = o.r_returned - o.n_sent;
    o.trustee_net = o.received - o.r_returned;
    o.thinking = d.thinking;
    o.failed = d.failed;
    o.error = d.error;
    return o;
}

constexpr bool kTrustCacheable = false; // persona-specific decisions are not reused

} // namespace

std::vector<TrustOutcome> trust_game_round(std::span<const core::ProfilePtr> profiles,
                                           inference::InferenceLayer& layer,
                                           const TrustGameConfig& cfg) {
    if (profiles.empty()) {
        raise(Errc::InvalidParams, "trust_game_round over empty profile list");
    }
    std::vector<TrustOutcome> outcomes;
    if (cfg.trustor_role) {
        std::vector<inference::InferenceRequest> reqs;
        std::vector<int> maxes;
        reqs.reserve(profiles.size());
        for (const auto& p : profiles) {
            reqs.push_back(make_trustor_request(*p, kTrustCacheable));
            maxes.push_back(10);
        }
        const auto decisions = run_decisions(layer, std::move(reqs), maxes, cfg.workers);
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            outcomes.push_back(trustor_outcome(AgentId(i), decisions[i]));
        }
    }
    if (cfg.trustee_role) {
        std::vector<inference::InferenceRequest> reqs;
        std::vector<int> maxes;
        std::vector<std::pair<AgentId, int>> meta;
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            for (int n = 1; n <= 10; ++n) {
                const int received = 3 * n;
                reqs.push_back(make_trustee_request(*profiles[i], received, kTrustCacheable));
                maxes.push_back(received);
                meta.emplace_back(AgentId(i), received);
            }
        }
        const auto decisions = run_decisions(layer, std::move(reqs), maxes, cfg.workers);
        for (std::size_t k = 0; k < meta.size(); ++k) {
            outcomes.push_back(trustee_outcome(meta[k].first, meta[k].second, decisions[k]));
        }
    }
    return outcomes;
}

namespace {

struct MeanAcc {
    double sum = 0.0;
    std::uint64_t n = 0;
    void add(double v) {
        sum += v;
        ++n;
    }
    double mean() const { return n ? sum / double(n) : 0.0; }
};

const Json& attrs_of(std::span<const core::ProfilePtr> profiles, AgentId id) {
    return profiles[std::size_t(id)]->attrs;
}

} // namespace

TrustTables trust_tables(std::span<const TrustOutcome> outcomes,
                         std::span<const core::ProfilePtr> profiles, int fixed_received) {
    std::map<std::string, MeanAcc> by_class, by_edu, by_age;
    std::map<std::pair<std::string, int>, std::uint64_t> hist;
    std::map<std::string, std::uint64_t> class_totals;
    std::map<int, MeanAcc> ret_by_received, ratio_by_received, net_by_received;
    std::map<std::pair<std::string, std::string>, MeanAcc> ret_fixed;

    for (const TrustOutcome& o : outcomes) {
        if (o.failed) continue;
        if (o.role == TrustOutcome::Role::Trustor && o.trustor_id) {
            const Json& attrs = attrs_of(profiles, *o.trustor_id);
            const std::string cls = attr_string(attrs, "social_class");
            by_class[cls].add(o.n_sent);
            by_edu[attr_string(attrs, "education")].add(o.n_sent);
            by_age[engine::age_bucket(attrs.value("age", 0))].add(o.n_sent);
            ++hist[{cls, o.n_sent}];
            ++class_totals[cls];
        } else if (o.role == TrustOutcome::Role::Trustee && o.trustee_id) {
            ret_by_received[o.received].add(o.r_returned);
            ratio_by_received[o.received].add(o.received > 0 ? double(o.r_returned) / o.received
                                                             : 0.0);
            net_by_received[o.received].add(o.trustor_net);
            if (o.received == fixed_received) {
                const Json& attrs = attrs_of(profiles, *o.trustee_id);
                ret_fixed[{"social_class", attr_string(attrs, "social_class")}].add(o.r_returned);
                ret_fixed[{"urban_rural", attr_string(attrs, "urban_rural")}].add(o.r_returned);
                ret_fixed[{"education", attr_string(attrs, "education")}].add(o.r_returned);
            }
        }
    }

    TrustTables t;
    t.send_mean_by_class = core::Table("trust_send_by_class", {"social_class", "mean_sent", "n"});
    for (const auto& [k, acc] : by_class) {
        t.send_mean_by_class.add_row(
            {k, core::Table::fmt(acc.mean()), core::Table::fmt(std::uint64_t(acc.n))});
    }
    t.send_mean_by_education =
        core::Table("trust_send_by_education", {"education", "mean_sent", "n"});
    for (const auto& [k, acc] : by_edu) {
        t.send_mean_by_education.add_row(
            {k, core::Table::fmt(acc.mean()), core::Table::fmt(std::uint64_t(acc.n))});
    }
    t.send_mean_by_age_bucket =
        core::Table("trust_send_by_age_bucket", {"age_bucket", "mean_sent", "n"});
    for (const auto& [k, acc] : by_age) {
        t.send_mean_by_age_bucket.add_row(
            {k, core::Table::fmt(acc.mean()), core::Table::fmt(std::uint64_t(acc.n))});
    }
    t.send_hist_by_class =
        core::Table("trust_send_hist_by_class", {"social_class", "amount", "count", "share"});
    for (const auto& [key, count] : hist) {
        const double share =
            class_totals[key.first] ? double(count) / double(class_totals[key.first]) : 0.0;
        t.send_hist_by_class.add_row({key.first, core::Table::fmt(std::int64_t(key.second)),
                                      core::Table::fmt(count), core::Table::fmt(share)});
    }
    t.return_by_received = core::Table(
        "trust_return_by_received",
        {"received", "mean_return", "mean_return_ratio", "mean_trustor_net", "fair_return", "n"});
    for (const auto& [received, acc] : ret_by_received) {
        t.return_by_received.add_row({core::Table::fmt(std::int64_t(received)),
                                      core::Table::fmt(acc.mean()),
                                      core::Table::fmt(ratio_by_received[received].mean()),
                                      core::Table::fmt(net_by_received[received].mean()),
                                      core::Table::fmt(std::int64_t(2 * (received / 3))),
                                      core::Table::fmt(std::uint64_t(acc.n))});
    }
    t.return_at_fixed_received = core::Table(
        "trust_return_at_fixed_received", {"dimension", "category", "mean_return", "n"});
    for (const auto& [key, acc] : ret_fixed) {
        t.return_at_fixed_received.add_row({key.first, key.second, core::Table::fmt(acc.mean()),
                                            core::Table::fmt(std::uint64_t(acc.n))});
    }
    return t;
}

double t_quantile_975(int dof) {
    static const double kTable[30] = {
        12.7062, 4.30265, 3.18245, 2.77645, 2.57058, 2.44691, 2.36462, 2.30600,
        2.26216, 2.22814, 2.20099, 2.17881, 2.16037, 2.14479, 2.13145, 2.11991,
        2.10982, 2.10092, 2.09302, 2.08596, 2.07961, 2.07387, 2.06866, 2.06390,
        2.05954, 2.05553, 2.05183, 2.04841, 2.04523, 2.04227};
    if (dof < 1) return 0.0;
    if (dof <= 30) return kTable[dof - 1];
    return 1.96;
}

TrustScalingResult trust_scaling_experiment(std::span<const std::uint64_t> sizes, int trials,
                                            inference::InferenceLayer& layer,
                                            std::uint64_t seed) {
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        if (sizes[i] <= sizes[i - 1]) {
            raise(Errc::InvalidParams, "population sizes must be ascending");
        }
    }
    TrustScalingResult result;
    result.trials =
        core::Table("trust_scaling_trials", {"size", "trial", "mean_young", "mean_old", "gap"});
    result.summary = core::Table(
        "trust_scaling_summary",
        {"size", "gap_mean", "ci_low", "ci_high", "ci_width", "ci_defined", "trials"});

    for (std::uint64_t size : sizes) {
        std::vector<double> gaps;
        for (int trial = 0; trial < trials; ++trial) {
            const std::uint64_t cell_seed =
                core::splitmix64(seed ^ core::fnv1a64_u64(size) ^ (std::uint64_t(trial) + 1));
            const auto records = synthesize_profiles(size, cell_seed);
            const auto pool = to_profile_pool(records);
            TrustGameConfig cfg;
            cfg.trustee_role = false; // the age gap uses trustor sends only
            const auto outcomes = trust_game_round(pool, layer, cfg);
            MeanAcc young, old;
            for (const TrustOutcome& o : outcomes) {
                if (o.failed || !o.trustor_id) continue;
                const int age = pool[std::size_t(*o.trustor_id)]->attrs.value("age", 0);
                if (age <= 34) young.add(o.n_sent);
                else if (age >= 55) old.add(o.n_sent);
            }
            const double gap = young.mean() - old.mean();
            gaps.push_back(gap);
            result.trials.add_row({core::Table::fmt(size), core::Table::fmt(std::int64_t(trial)),
                                   core::Table::fmt(young.mean()), core::Table::fmt(old.mean()),
                                   core::Table::fmt(gap)});
        }
        double mean = 0.0;
        for (double g : gaps) mean += g;
        mean /= double(gaps.size());
        const bool ci_defined = gaps.size() >= 2;
        double ci_low = mean, ci_high = mean, width = 0.0;
        if (ci_defined) {
            double ss = 0.0;
            for (double g : gaps) ss += (g - mean) * (g - mean);
            const double sd = std::sqrt(ss / double(gaps.size() - 1));
            const double half =
                t_quantile_975(int(gaps.size()) - 1) * sd / std::sqrt(double(gaps.size()));
            ci_low = mean - half;
            ci_high = mean + half;
            width = 2 * half;
        }
        result.summary.add_row({core::Table::fmt(size), core::Table::fmt(mean),
                                core::Table::fmt(ci_low), core::Table::fmt(ci_high),
                                core::Table::fmt(width), ci_defined ? "1" : "0",
                                core::Table::fmt(std::int64_t(gaps.size()))});
    }
    return result;
}

// ---- engine integration ----

void TrustOps::init(engine::SimSystem& sys, const engine::SimConfig& cfg,
                    const engine::SeedDataset& data) {
    engine_workers_ = cfg.workers;
    outcomes_.clear();
    sys.agents.clear();
    sys.agents.reserve(data.profiles.size());
    for (std::size_t i = 0; i < data.profiles.size(); ++i) {
        core::AgentState a;
        a.id = AgentId(i);
        a.profile = data.profiles[i];
        a.active = true;
        sys.agents.push_back(std::move(a));
    }
    sys.env.static_part = Json{{"game", "trust"},
                               {"endowment", 10},
                               {"multiplier", 3}};
    sys.env.dynamic_part = Json{{"tick", 0}};

    for (std::size_t i = 0; i < sys.agents.size(); ++i) {
        if (cfg_.trustor_role) {
            Event e;
            e.time = 0;
            e.priority = 0;
            e.kind = "trustor_decision";
            e.initiators = {core::EntityRef::env()};
            e.targets = {core::EntityRef::of(AgentId(i))};
            e.payload = Json{{"agent", i}};
            e.agg_key = "trust:trustor:0";
            sys.queue.enqueue(std::move(e));
        }
        if (cfg_.trustee_role) {
            for (int n = 1; n <= 10; ++n) {
                Event e;
                e.time = 0;
                e.priority = 0;
                e.kind = "trustee_decision";
                e.initiators = {core::EntityRef::env()};
                e.targets = {core::EntityRef::of(AgentId(i))};
                e.payload = Json{{"agent", i}, {"received", 3 * n}};
                e.agg_key = "trust:trustee:0";
                sys.queue.enqueue(std::move(e));
            }
        }
    }
}

engine::Observation TrustOps::perceive(const engine::SimSystem& sys,
                                       std::optional<AgentId> agent,
                                       const Event& ev) const {
    engine::Observation obs;
    obs.agent = agent;
    obs.tick = sys.tick;
    obs.visible_env = Json{{"game", "trust"}, {"endowment", 10}, {"multiplier", 3}};
    obs.triggering_event = &ev;
    return obs;
}

bool TrustOps::perception_needed(const Event& ev) const {
    return ev.kind == "trustor_decision" || ev.kind == "trustee_decision";
}

std::vector<Event> TrustOps::policy(const engine::SimSystem& sys,
                                    std::span<const engine::Observation> obs,
                                    inference::InferenceLayer& layer) {
    if (obs.empty() || !obs.front().triggering_event) return {};
    const Event& ev = *obs.front().triggering_event;
    const bool trustor = ev.kind == "trustor_decision";
    if (!trustor && ev.kind != "trustee_decision") return {};

    std::vector<inference::InferenceRequest> reqs;
    std::vector<int> maxes;
    std::vector<std::pair<AgentId, int>> meta; // agent, received (0 for trustor)
    engine::for_each_member_payload(ev, [&](const Json& payload) {
        const AgentId id = payload.at("agent").get<AgentId>();
        if (!sys.is_active(id)) return;
        const core::Profile& p = *sys.agent(id).profile;
        if (trustor) {
            reqs.push_back(make_trustor_request(p, kTrustCacheable));
            maxes.push_back(10);
            meta.emplace_back(id, 0);
        } else {
            const int received = payload.at("received").get<int>();
            reqs.push_back(make_trustee_request(p, received, kTrustCacheable));
            maxes.push_back(received);
            meta.emplace_back(id, received);
        }
    });
    if (reqs.empty()) return {};
    const auto decisions = run_decisions(layer, std::move(reqs), maxes, engine_workers_);

    std::vector<Event> out;
    out.reserve(decisions.size());
    for (std::size_t k = 0; k < decisions.size(); ++k) {
        const auto [id, received] = meta[k];
        const TrustOutcome o = trustor ? trustor_outcome(id, decisions[k])
                                       : trustee_outcome(id, received, decisions[k]);
        Event e;
        e.time = sys.tick + 1;
        e.priority = 0;
        e.kind = "trust_outcome";
        e.initiators = {core::EntityRef::of(id)};
        e.targets = {core::EntityRef::of(id)};
        e.payload = Json(o);
        e.agg_key = "trust:outcome:" + std::to_string(sys.tick + 1);
        out.push_back(std::move(e));
    }
    return out;
}

void TrustOps::apply_event(engine::SimSystem& sys, const Event& ev) {
    if (ev.kind == "trust_outcome") {
        engine::for_each_member_payload(ev, [&](const Json& payload) {
            outcomes_.push_back(payload.get<TrustOutcome>());
        });
        sys.metrics.counters["trust_outcomes"] = double(outcomes_.size());
    }
    // Decision events carry no state change; decisions happen in policy.
}

void TrustOps::evolve_agent(engine::SimSystem&, core::AgentState&) {}

void TrustOps::evolve_env(engine::SimSystem& sys) {
    sys.env.dynamic_part["tick"] = sys.tick;
}

void TrustOps::finish(engine::SimSystem& sys, inference::InferenceLayer&) {
    std::vector<core::ProfilePtr> profiles;
    profiles.reserve(sys.agents.size());
    for (const auto& a : sys.agents) profiles.push_back(a.profile);
    TrustTables tables = trust_tables(outcomes_, profiles);
    for (core::Table* t :
         {&tables.send_mean_by_class, &tables.send_mean_by_education,
          &tables.send_mean_by_age_bucket, &tables.send_hist_by_class, &tables.return_by_received,
          &tables.return_at_fixed_received}) {
        sys.metrics.tables.emplace(t->name, *t);
    }
}

TrustTables trust_tables_from_log(std::span<const engine::LoggedEvent> events,
                                  const std::vector<core::AgentState>& agents,
                                  int fixed_received) {
    std::vector<TrustOutcome> outcomes;
    for (const auto& le : events) {
        if (le.status != "applied" || le.event.kind != "trust_outcome") continue;
        engine::for_each_member_payload(le.event, [&](const Json& payload) {
            outcomes.push_back(payload.get<TrustOutcome>());
        });
    }
    std::vector<core::ProfilePtr> profiles;
    profiles.reserve(agents.size());
    for (const auto& a : agents) profiles.push_back(a.profile);
    return trust_tables(outcomes, profiles, fixed_received);
}

} // namespace socsim::scenarios
