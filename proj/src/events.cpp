#include "qosim/events.hpp"

#include <algorithm>
#include <cmath>

namespace qosim {

double priority_of(const ReconfigurationEvent& ev, const UserProfile& user) {
    double total = 0.0;
    for (const auto& char_id : ev.affected_characteristics)
        total += user.wish_weight(char_id) * std::abs(ev.mark_delta);
    return total;
}

namespace {

// (priority desc, at asc, id asc)
bool precedes(const ReconfigurationEvent& a, const ReconfigurationEvent& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    if (a.at_ms != b.at_ms) return a.at_ms < b.at_ms;
    return a.id < b.id;
}

} // namespace

void EventQueue::enqueue(ReconfigurationEvent ev, const UserProfile& user) {
    ev.priority = priority_of(ev, user);
    ++enqueued_;
    for (auto& existing : pending_) {
        if (existing.culprit != ev.culprit) continue;
        // Same culprit: keep whichever observed the larger swing.
        if (std::abs(ev.mark_delta) > std::abs(existing.mark_delta)) existing = ev;
        ++consumed_; // the absorbed event is accounted for
        return;
    }
    pending_.push_back(std::move(ev));
}

std::optional<ReconfigurationEvent> EventQueue::select_next() const {
    if (pending_.empty()) return std::nullopt;
    const ReconfigurationEvent* best = &pending_.front();
    for (const auto& ev : pending_)
        if (precedes(ev, *best)) best = &ev;
    return *best;
}

void EventQueue::consume(std::uint64_t id) {
    auto it = std::find_if(pending_.begin(), pending_.end(),
                           [&](const auto& ev) { return ev.id == id; });
    if (it == pending_.end()) return;
    pending_.erase(it);
    ++consumed_;
}

void EventQueue::defer(std::uint64_t id) {
    auto it = std::find_if(pending_.begin(), pending_.end(),
                           [&](const auto& ev) { return ev.id == id; });
    if (it == pending_.end()) return;
    deferred_.push_back(std::move(*it));
    pending_.erase(it);
}

void EventQueue::rearm_deferred() {
    for (auto& ev : deferred_) pending_.push_back(std::move(ev));
    deferred_.clear();
}

} // namespace qosim
