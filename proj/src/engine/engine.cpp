#include "socsim/engine/engine.hpp"

#include <chrono>

#include "socsim/core/error.hpp"

namespace socsim::engine {

using core::Errc;
using core::Event;
using core::raise;
using core::Tick;

core::Table& MetricsStore::table(const std::string& name, std::vector<std::string> columns) {
    auto it = tables.find(name);
    if (it == tables.end()) {
        it = tables.emplace(name, core::Table(name, std::move(columns))).first;
    }
    return it->second;
}

core::AgentState& SimSystem::agent(core::AgentId id) {
    if (id >= agents.size()) {
        raise(Errc::OutOfRange, "agent " + std::to_string(id));
    }
    return agents[std::size_t(id)];
}

const core::AgentState& SimSystem::agent(core::AgentId id) const {
    if (id >= agents.size()) {
        raise(Errc::OutOfRange, "agent " + std::to_string(id));
    }
    return agents[std::size_t(id)];
}

bool SimSystem::is_active(core::AgentId id) const {
    return id < agents.size() && agents[std::size_t(id)].active;
}

std::string SimSystem::state_digest_hex() const {
    core::Sha256 h;
    h.update(core::Json(env.static_part).dump());
    h.update(core::Json(env.dynamic_part).dump());
    for (const auto& a : agents) {
        h.update(reinterpret_cast<const char*>(&a.id), sizeof(a.id));
        h.update(a.internal.dump());
        h.update(a.external.dump());
        const char active = a.active ? 1 : 0;
        h.update(&active, 1);
    }
    return h.hex_digest();
}

void EventLogWriter::open(const std::filesystem::path& path) {
    out_.open(path, std::ios::binary);
    if (!out_) {
        raise(Errc::Io, "cannot write " + path.string());
    }
    hasher_.reset();
    count_ = 0;
}

void EventLogWriter::append(const Event& e, const std::string& status) {
    core::Json j(e);
    j["status"] = status;
    const std::string line = j.dump();
    out_ << line << '\n';
    hasher_.update(line);
    hasher_.update("\n");
    ++count_;
}

void EventLogWriter::close() {
    if (out_.is_open()) out_.close();
}

std::vector<LoggedEvent> read_event_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::Io, "cannot read " + path.string());
    }
    std::vector<LoggedEvent> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        core::Json j = core::Json::parse(line);
        LoggedEvent le;
        le.status = j.value("status", "applied");
        le.event = j.get<Event>();
        out.push_back(std::move(le));
    }
    return out;
}

void write_snapshot(const std::filesystem::path& path, const SimSystem& sys) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(Errc::Io, "cannot write " + path.string());
    }
    out << core::Json{{"type", "meta"}, {"tick", sys.tick}, {"n_agents", sys.agents.size()}}.dump()
        << '\n';
    out << core::Json{{"type", "env"},
                      {"static", sys.env.static_part},
                      {"dynamic", sys.env.dynamic_part}}
               .dump()
        << '\n';
    // Profiles are pooled: emit each distinct profile once, in first-use order.
    std::map<const core::Profile*, std::size_t> profile_idx;
    for (const auto& a : sys.agents) {
        if (!a.profile || profile_idx.count(a.profile.get())) continue;
        const std::size_t idx = profile_idx.size();
        profile_idx[a.profile.get()] = idx;
        out << core::Json{{"type", "profile"},
                          {"idx", idx},
                          {"attrs", a.profile->attrs},
                          {"text", a.profile->text}}
                   .dump()
            << '\n';
    }
    for (const auto& a : sys.agents) {
        core::Json j{{"type", "agent"},
                     {"id", a.id},
                     {"internal", a.internal},
                     {"external", a.external},
                     {"active", a.active}};
        j["profile_idx"] = a.profile ? core::Json(profile_idx[a.profile.get()]) : core::Json();
        out << j.dump() << '\n';
    }
}

SnapshotData read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::Io, "cannot read " + path.string());
    }
    SnapshotData snap;
    std::vector<core::ProfilePtr> profiles;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        core::Json j = core::Json::parse(line);
        const std::string type = j.value("type", "");
        if (type == "meta") {
            snap.tick = j.at("tick").get<Tick>();
        } else if (type == "env") {
            snap.env.static_part = j.at("static");
            snap.env.dynamic_part = j.at("dynamic");
        } else if (type == "profile") {
            auto p = std::make_shared<core::Profile>();
            p->attrs = j.at("attrs");
            p->text = j.at("text").get<std::string>();
            const std::size_t idx = j.at("idx").get<std::size_t>();
            if (profiles.size() <= idx) profiles.resize(idx + 1);
            profiles[idx] = std::move(p);
        } else if (type == "agent") {
            core::AgentState a;
            a.id = j.at("id").get<core::AgentId>();
            a.internal = j.at("internal");
            a.external = j.at("external");
            a.active = j.at("active").get<bool>();
            if (!j.at("profile_idx").is_null()) {
                a.profile = profiles.at(j.at("profile_idx").get<std::size_t>());
            }
            snap.agents.push_back(std::move(a));
        }
    }
    return snap;
}

Engine::Engine(RunConfig cfg, std::shared_ptr<OperationSet> ops,
               std::shared_ptr<inference::InferenceLayer> layer)
    : cfg_(std::move(cfg)), ops_(std::move(ops)), layer_(std::move(layer)) {}

SimSystem& Engine::init(const SeedDataset& data) {
    if (data.profiles.empty()) {
        raise(Errc::InvalidSeedData, "seed dataset has no profiles (record 0 missing)");
    }
    for (std::size_t i = 0; i < data.profiles.size(); ++i) {
        if (!data.profiles[i]) {
            raise(Errc::InvalidSeedData, "seed profile " + std::to_string(i) + " is null");
        }
    }
    sys_ = SimSystem{};
    sys_.master_seed = cfg_.sim.master_seed;
    sys_.topology = data.topology;
    ops_->init(sys_, cfg_.sim, data);
    return sys_;
}

void Engine::log_event(const Event& e, const std::string& status) {
    if (log_open_) {
        log_.append(e, status);
    }
    if (cfg_.sim.retain_events) {
        history_.push_back(LoggedEvent{e, status});
    }
    ++events_processed_;
    if (status == "dropped") ++events_dropped_;
    if (status.rfind("failed", 0) == 0) ++events_failed_;
}

void Engine::process_batch() {
    auto [batch_tick, batch] = sys_.queue.pop_tick_batch();
    (void)batch_tick;
    const auto merged = core::aggregate(batch);
    for (const Event& e : merged) {
        // Activity guard: an event whose agent targets are all inactive is
        // dropped before the update operation runs.
        bool has_env_target = false;
        bool any_active = false;
        for (const auto& t : e.targets) {
            if (t.is_env) {
                has_env_target = true;
            } else if (sys_.is_active(t.agent)) {
                any_active = true;
            }
        }
        if (!e.targets.empty() && !has_env_target && !any_active) {
            log_event(e, "dropped");
            continue;
        }
        std::string status = "applied";
        try {
            ops_->apply_event(sys_, e);
            if (ops_->perception_needed(e)) {
                std::vector<Observation> obs;
                obs.reserve(e.targets.size());
                for (const auto& t : e.targets) {
                    if (t.is_env) {
                        obs.push_back(ops_->perceive(sys_, std::nullopt, e));
                    } else if (sys_.is_active(t.agent)) {
                        obs.push_back(ops_->perceive(sys_, t.agent, e));
                    }
                }
                if (!obs.empty()) {
                    auto emitted = ops_->policy(sys_, obs, *layer_);
                    for (Event& out : emitted) {
                        if (out.time <= sys_.tick) {
                            raise(Errc::PastTimestamp,
                                  "policy emitted an event for tick " + std::to_string(out.time) +
                                      " while at tick " + std::to_string(sys_.tick));
                        }
                        sys_.queue.enqueue(std::move(out));
                    }
                }
            }
        } catch (const core::SimError& err) {
            status = std::string("failed: ") + err.what();
        }
        log_event(e, status);
    }
}

bool Engine::step() {
    const Tick t_max = cfg_.sim.t_max;
    if (sys_.queue.empty() && sys_.tick >= t_max) {
        return false;
    }
    const Tick next_agent =
        (sys_.tick / cfg_.sim.agent_evolve_every + 1) * cfg_.sim.agent_evolve_every;
    const Tick next_env = (sys_.tick / cfg_.sim.env_evolve_every + 1) * cfg_.sim.env_evolve_every;
    Tick t_next = std::min(next_agent, next_env);
    if (!sys_.queue.empty()) {
        t_next = std::min(t_next, sys_.queue.peek_time());
    } else if (t_next > t_max) {
        // Nothing left to process and no evolve boundary inside the horizon.
        sys_.tick = t_max;
        sys_.queue.set_current_tick(t_max);
        return false;
    }
    sys_.tick = t_next;
    sys_.queue.set_current_tick(t_next);

    if (!sys_.queue.empty() && sys_.queue.peek_time() == sys_.tick) {
        process_batch();
    }
    if (sys_.tick % cfg_.sim.agent_evolve_every == 0) {
        for (auto& a : sys_.agents) {
            if (a.active) ops_->evolve_agent(sys_, a);
        }
    }
    if (sys_.tick % cfg_.sim.env_evolve_every == 0) {
        ops_->evolve_env(sys_);
    }
    return !(sys_.queue.empty() && sys_.tick >= t_max);
}

void Engine::run_in_memory(const SeedDataset& data) {
    history_.clear();
    events_processed_ = events_dropped_ = events_failed_ = 0;
    init(data);
    while (step()) {
    }
    ops_->finish(sys_, *layer_);
    sys_.metrics.tables["token_usage"] = layer_->token_report();
}

std::string Engine::history_digest_hex() const {
    core::Sha256 h;
    for (const auto& le : history_) {
        h.update(core::encode_event(le.event));
        h.update("|");
        h.update(le.status);
        h.update("\n");
    }
    return h.hex_digest();
}

ReadoutBundle Engine::run(const SeedDataset& data, const std::filesystem::path& run_dir) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(run_dir);

    ReadoutBundle bundle;
    bundle.run_dir = run_dir;
    bundle.event_log_path = run_dir / "events.log";
    log_.open(bundle.event_log_path);
    log_open_ = true;
    history_.clear();
    events_processed_ = events_dropped_ = events_failed_ = 0;

    init(data);
    auto snap_path = [&](Tick t) {
        return run_dir / ("snapshot_" + std::to_string(t) + ".d");
    };
    write_snapshot(snap_path(0), sys_);
    bundle.snapshot_paths.push_back(snap_path(0));
    Tick last_snapshot = 0;

    while (step()) {
        if (sys_.tick % cfg_.sim.snapshot_every == 0 && sys_.tick != last_snapshot) {
            write_snapshot(snap_path(sys_.tick), sys_);
            bundle.snapshot_paths.push_back(snap_path(sys_.tick));
            last_snapshot = sys_.tick;
        }
    }
    ops_->finish(sys_, *layer_);
    if (sys_.tick != last_snapshot) {
        write_snapshot(snap_path(sys_.tick), sys_);
        bundle.snapshot_paths.push_back(snap_path(sys_.tick));
    }

    bundle.event_log_digest = log_.digest_hex();
    log_.close();
    log_open_ = false;

    sys_.metrics.tables.emplace("token_usage", layer_->token_report());
    for (const auto& [name, table] : sys_.metrics.tables) {
        table.write_tsv(run_dir / (name + ".tsv"));
    }
    bundle.tables = sys_.metrics.tables;

    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    bundle.summary = core::Json{
        {"final_tick", sys_.tick},
        {"events_processed", events_processed_},
        {"events_dropped", events_dropped_},
        {"events_failed", events_failed_},
        {"event_log_digest", bundle.event_log_digest},
        {"cache_hits", layer_->cache().hit_count()},
        {"cache_misses", layer_->cache().miss_count()},
        {"cache_entries", layer_->cache().size()},
        {"requests", layer_->requests_seen()},
        {"llm_tokens", layer_->total_llm_tokens()},
        {"total_tokens", layer_->total_tokens()},
        {"elapsed_ms", elapsed_ms},
        {"events_per_sec", elapsed_ms > 0 ? double(events_processed_) * 1000.0 / elapsed_ms : 0.0}};
    if (!cfg_.cache.persist_path.empty() && cfg_.cache.enabled) {
        layer_->cache().save(run_dir / cfg_.cache.persist_path);
    }
    return bundle;
}

} // namespace socsim::engine
