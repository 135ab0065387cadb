#include "qosim/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <map>
#include <sstream>

namespace qosim {

const char* to_string(TraceKind kind) {
    switch (kind) {
    case TraceKind::qos_sample: return "qos_sample";
    case TraceKind::context_event: return "context_event";
    case TraceKind::event_enqueued: return "event_enqueued";
    case TraceKind::event_selected: return "event_selected";
    case TraceKind::search_result: return "search_result";
    case TraceKind::order_issued: return "order_issued";
    case TraceKind::order_completed: return "order_completed";
    }
    return "?";
}

void Trace::append(std::int64_t at_ms, TraceKind kind, nlohmann::json payload) {
    records_.push_back({at_ms, records_.size(), kind, std::move(payload)});
}

std::string Trace::to_jsonl(bool with_header_timestamp, const std::string& scenario_name) const {
    std::ostringstream out;
    nlohmann::json header{{"kind", "header"}, {"scenario", scenario_name}};
    if (with_header_timestamp) header["generated_at"] = static_cast<std::int64_t>(::time(nullptr));
    out << header.dump() << '\n';
    for (const auto& rec : records_) {
        nlohmann::json line = rec.payload;
        line["at"] = rec.at_ms;
        line["seq"] = rec.seq;
        line["kind"] = to_string(rec.kind);
        out << line.dump() << '\n';
    }
    return out.str();
}

std::string Trace::to_csv() const {
    std::ostringstream out;
    out << "time_ms,overall_qos,intrinsic,contextual,config_id,in_flight\n";
    char buf[128];
    for (const auto& rec : records_) {
        if (rec.kind != TraceKind::qos_sample) continue;
        std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%.9g,%s,%d\n",
                      static_cast<long long>(rec.at_ms), rec.payload.at("overall").get<double>(),
                      rec.payload.at("intrinsic").get<double>(),
                      rec.payload.at("contextual").get<double>(),
                      rec.payload.at("config").get<std::string>().c_str(),
                      rec.payload.at("in_flight").get<bool>() ? 1 : 0);
        out << buf;
    }
    return out.str();
}

namespace {

nlohmann::json summarize(const std::vector<nlohmann::json>& records) {
    std::uint64_t reconfigurations = 0;
    std::map<std::string, std::uint64_t> actions;
    std::uint64_t candidates = 0;
    std::uint64_t samples = 0;
    double min_overall = 1.0, sum_overall = 0.0, final_overall = 1.0;
    for (const auto& rec : records) {
        const std::string kind = rec.value("kind", "");
        if (kind == "qos_sample") {
            const double overall = rec.at("overall").get<double>();
            ++samples;
            sum_overall += overall;
            min_overall = std::min(min_overall, overall);
            final_overall = overall;
        } else if (kind == "order_completed") {
            ++reconfigurations;
            for (const auto& action : rec.at("actions"))
                ++actions[action.at("kind").get<std::string>()];
        } else if (kind == "search_result") {
            candidates += rec.at("candidates_evaluated").get<std::uint64_t>();
        }
    }
    nlohmann::json out;
    out["reconfigurations"] = reconfigurations;
    out["actions"] = nlohmann::json::object();
    std::uint64_t total_actions = 0;
    for (const auto& [kind, count] : actions) {
        out["actions"][kind] = count;
        total_actions += count;
    }
    out["total_actions"] = total_actions;
    out["candidates_evaluated"] = candidates;
    out["samples"] = samples;
    out["min_overall"] = min_overall;
    out["mean_overall"] = samples ? sum_overall / static_cast<double>(samples) : 1.0;
    out["final_overall"] = final_overall;
    return out;
}

} // namespace

nlohmann::json Trace::summary() const {
    std::vector<nlohmann::json> lines;
    lines.reserve(records_.size());
    for (const auto& rec : records_) {
        nlohmann::json line = rec.payload;
        line["kind"] = to_string(rec.kind);
        lines.push_back(std::move(line));
    }
    return summarize(lines);
}

nlohmann::json summary_from_jsonl(const std::string& jsonl) {
    std::vector<nlohmann::json> lines;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto parsed = nlohmann::json::parse(line);
        if (parsed.value("kind", "") == "header") continue;
        lines.push_back(std::move(parsed));
    }
    return summarize(lines);
}

} // namespace qosim
