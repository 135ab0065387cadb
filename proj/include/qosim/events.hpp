#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qosim/qos.hpp"

namespace qosim {

enum class EventKind { degradation, improvement, spy };

struct ReconfigurationEvent {
    std::uint64_t id = 0;
    std::int64_t at_ms = 0;
    EventKind kind = EventKind::degradation;
    std::string culprit; // slot or conduct id
    bool culprit_is_conduct = false;
    std::set<std::string> affected_characteristics;
    double mark_delta = 0.0; // signed change observed
    double priority = 0.0;   // cached, see priority_of
};

// Importance for the user: sum over affected characteristics of
// wish weight x |mark_delta|.
double priority_of(const ReconfigurationEvent& ev, const UserProfile& user);

// Pending events ordered by (priority desc, at asc, id asc). An event is
// pending, deferred or consumed, exactly one. Events sharing a culprit
// coalesce, keeping the largest |mark_delta|; the absorbed one counts as
// consumed.
class EventQueue {
  public:
    // Computes and caches the priority before insertion.
    void enqueue(ReconfigurationEvent ev, const UserProfile& user);

    // Highest-priority pending event, not consumed; nullopt when none pending.
    std::optional<ReconfigurationEvent> select_next() const;

    void consume(std::uint64_t id);
    void defer(std::uint64_t id);

    // A context change re-arms every deferred event.
    void rearm_deferred();

    std::size_t pending_count() const { return pending_.size(); }
    std::size_t deferred_count() const { return deferred_.size(); }
    std::uint64_t consumed_count() const { return consumed_; }
    std::uint64_t enqueued_count() const { return enqueued_; }

  private:
    std::vector<ReconfigurationEvent> pending_;
    std::vector<ReconfigurationEvent> deferred_;
    std::uint64_t consumed_ = 0;
    std::uint64_t enqueued_ = 0;
};

} // namespace qosim
