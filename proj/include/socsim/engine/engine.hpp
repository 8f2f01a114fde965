#pragma once

#include <filesystem>
#include <fstream>
#include <memory>

#include "socsim/core/hash.hpp"
#include "socsim/engine/ops.hpp"

namespace socsim::engine {

struct LoggedEvent {
    core::Event event;
    std::string status; // applied | dropped | failed: <reason>
};

struct ReadoutBundle {
    std::filesystem::path run_dir;
    std::map<std::string, core::Table> tables;
    std::filesystem::path event_log_path;
    std::vector<std::filesystem::path> snapshot_paths;
    std::string event_log_digest;
    core::Json summary = core::Json::object();
};

// Streams processed events to {run_dir}/events.log, one JSON record per
// line, digesting as it writes.
class EventLogWriter {
public:
    void open(const std::filesystem::path& path);
    void append(const core::Event& e, const std::string& status);
    void close();
    std::string digest_hex() { return hasher_.hex_digest(); }
    std::uint64_t count() const { return count_; }

private:
    std::ofstream out_;
    core::Sha256 hasher_;
    std::uint64_t count_ = 0;
};

std::vector<LoggedEvent> read_event_log(const std::filesystem::path& path);

// Snapshot records use the seed-dataset shape: a meta line, the environment,
// the deduplicated profile pool, then one agent record per line.
void write_snapshot(const std::filesystem::path& path, const SimSystem& sys);
struct SnapshotData {
    core::Tick tick = 0;
    std::vector<core::AgentState> agents;
    core::EnvironmentState env;
};
SnapshotData read_snapshot(const std::filesystem::path& path);

// The simulation loop: pops one tick batch per step, aggregates it, applies
// events, runs perception and policy for targets, fires the evolution
// operations on their intervals, and advances the tick.
class Engine {
public:
    Engine(RunConfig cfg, std::shared_ptr<OperationSet> ops,
           std::shared_ptr<inference::InferenceLayer> layer);

    SimSystem& init(const SeedDataset& data);
    bool step(); // false once the queue is empty and tick >= t_max

    // init + step loop + readout; writes events.log, snapshots and metric
    // tables under run_dir.
    ReadoutBundle run(const SeedDataset& data, const std::filesystem::path& run_dir);

    // Same loop without file artifacts; tables land in system().metrics and
    // the processed-event history stays queryable.
    void run_in_memory(const SeedDataset& data);

    // Digest over the retained history (event record + status per line).
    std::string history_digest_hex() const;

    SimSystem& system() { return sys_; }
    const SimSystem& system() const { return sys_; }
    const std::vector<LoggedEvent>& event_history() const { return history_; }
    inference::InferenceLayer& layer() { return *layer_; }
    const RunConfig& config() const { return cfg_; }

private:
    void process_batch();
    void log_event(const core::Event& e, const std::string& status);

    RunConfig cfg_;
    std::shared_ptr<OperationSet> ops_;
    std::shared_ptr<inference::InferenceLayer> layer_;
    SimSystem sys_;
    std::vector<LoggedEvent> history_;
    EventLogWriter log_;
    bool log_open_ = false;
    std::uint64_t events_processed_ = 0;
    std::uint64_t events_dropped_ = 0;
    std::uint64_t events_failed_ = 0;
};

} // namespace socsim::engine
