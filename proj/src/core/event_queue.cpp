#include "socsim/core/event_queue.hpp"

#include "socsim/core/error.hpp"

namespace socsim::core {

void EventQueue::check_time(Tick t) const {
    if (t < min_time_) {
        raise(Errc::PastTimestamp, "event time " + std::to_string(t) +
                                       " below current tick " + std::to_string(current_tick_) +
                                       " (min schedulable " + std::to_string(min_time_) + ")");
    }
}

std::uint64_t EventQueue::enqueue(Event e) {
    check_time(e.time);
    e.seq = next_seq_++;
    std::uint64_t seq = e.seq;
    heap_.push(std::move(e));
    return seq;
}

void EventQueue::enqueue_preserving_seq(Event e) {
    check_time(e.time);
    if (e.seq >= next_seq_) {
        next_seq_ = e.seq + 1;
    }
    heap_.push(std::move(e));
}

Tick EventQueue::peek_time() const {
    if (heap_.empty()) {
        raise(Errc::EmptyQueue, "peek_time on empty queue");
    }
    return heap_.top().time;
}

std::pair<Tick, std::vector<Event>> EventQueue::pop_tick_batch() {
    if (heap_.empty()) {
        raise(Errc::EmptyQueue, "pop_tick_batch on empty queue");
    }
    const Tick t = heap_.top().time;
    std::vector<Event> batch;
    while (!heap_.empty() && heap_.top().time == t) {
        batch.push_back(heap_.top());
        heap_.pop();
    }
    current_tick_ = t;
    min_time_ = t + 1; // the popped tick is complete
    return {t, std::move(batch)};
}

} // namespace socsim::core
