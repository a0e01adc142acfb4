#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "protosim/wire.hpp"

namespace protosim {

enum class EventType { sensor_arrival, message_delivery, idle_tick };

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;  // admission order, breaks ties at equal times
    EventType type = EventType::idle_tick;
    int node = 0;
    std::size_t sample_index = 0;  // sensor_arrival payload
    GossipMessage message;         // message_delivery payload
};

/// Min-heap of events ordered by (time, seq). The sequence number is
/// assigned at scheduling time, so simultaneous events replay in the exact
/// order they were produced.
class EventCalendar {
public:
    void schedule(Event e) {
        e.seq = next_seq_++;
        heap_.push_back(std::move(e));
        std::push_heap(heap_.begin(), heap_.end(), later);
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

    const Event& peek() const {
        if (heap_.empty()) throw std::logic_error("EventCalendar: empty");
        return heap_.front();
    }

    Event pop() {
        if (heap_.empty()) throw std::logic_error("EventCalendar: empty");
        std::pop_heap(heap_.begin(), heap_.end(), later);
        Event e = std::move(heap_.back());
        heap_.pop_back();
        return e;
    }

private:
    static bool later(const Event& a, const Event& b) {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }

    std::vector<Event> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace protosim
