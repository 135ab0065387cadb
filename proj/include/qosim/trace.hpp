#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qosim {

enum class TraceKind {
    qos_sample,
    context_event,
    event_enqueued,
    event_selected,
    search_result,
    order_issued,
    order_completed,
};

const char* to_string(TraceKind kind);

struct TraceRecord {
    std::int64_t at_ms = 0;
    std::uint64_t seq = 0;
    TraceKind kind = TraceKind::qos_sample;
    nlohmann::json payload; // kind-specific, includes the overall QoS mark
};

// Append-only audit timeline of one simulation run.
class Trace {
  public:
    void append(std::int64_t at_ms, TraceKind kind, nlohmann::json payload);

    const std::vector<TraceRecord>& records() const { return records_; }

    // Line-delimited JSON. The optional header carries run metadata; its
    // timestamp is suppressible so runs diff byte-for-byte.
    std::string to_jsonl(bool with_header_timestamp, const std::string& scenario_name) const;

    // Per-tick curve: time_ms,overall_qos,intrinsic,contextual,config_id,in_flight
    std::string to_csv() const;

    nlohmann::json summary() const;

  private:
    std::vector<TraceRecord> records_;
};

// Recomputes a summary from serialized records (the `summary` CLI verb).
nlohmann::json summary_from_jsonl(const std::string& jsonl);

} // namespace qosim
