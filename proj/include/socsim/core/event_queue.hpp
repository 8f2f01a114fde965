#pragma once

#include <cstddef>
#include <queue>
#include <vector>

#include "socsim/core/event.hpp"

namespace socsim::core {

// Priority queue keyed by (time, priority, seq). Pop order is total and
// deterministic; a popped tick is closed, so no later enqueue can land at
// or before it. Single-writer: the owning engine assigns seq numbers;
// worker results are funneled back through it.
class EventQueue {
public:
    // Assigns the next sequence number and inserts. Throws PastTimestamp if
    // e.time is at or before the last drained tick (or below the engine's
    // current tick).
    std::uint64_t enqueue(Event e);

    // Inserts preserving e.seq (replay path). Keeps the seq counter ahead.
    void enqueue_preserving_seq(Event e);

    // Removes and returns all events at the minimum time, ordered by
    // (priority, seq). Closes that tick.
    std::pair<Tick, std::vector<Event>> pop_tick_batch();

    bool empty() const { return heap_.empty(); }
    std::size_t len() const { return heap_.size(); }
    Tick peek_time() const;
    Tick current_tick() const { return current_tick_; }
    Tick min_schedulable_time() const { return min_time_; }
    void set_current_tick(Tick t) {
        current_tick_ = t;
        min_time_ = std::max(min_time_, t);
    }
    std::uint64_t next_seq() const { return next_seq_; }

private:
    void check_time(Tick t) const;

    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.priority != b.priority) return a.priority > b.priority;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    Tick current_tick_ = 0;
    Tick min_time_ = 0; // earliest time still open for scheduling
};

} // namespace socsim::core
