#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qosim/app.hpp"
#include "qosim/events.hpp"
#include "qosim/qos.hpp"

namespace qosim {

// Snapshot of the simulated execution context. Station loads are the load
// external to the application; hosted variants add their cpu demands on top.
struct ContextState {
    struct LinkState {
        double bandwidth_kbps = 0.0;
        double latency_ms = 0.0;
    };

    std::int64_t time_ms = 0;
    std::map<std::string, double> station_loads;
    std::map<std::string, LinkState> link_state;
    std::map<std::string, std::string> environment;

    static ContextState initial(const Application& app);
    bool saturated(const Application& app, const std::string& station) const;
};

struct ContextEvent {
    enum class Kind { set_bandwidth, set_latency, set_station_load, set_environment };
    std::int64_t at_ms = 0;
    Kind kind = Kind::set_bandwidth;
    std::string target; // link, station or environment name
    double value = 0.0;
    std::string text; // set_environment payload
};

// Returns state with the one named quantity updated and time advanced to ev.at_ms.
ContextState apply_context_event(const ContextState& state, const ContextEvent& ev,
                                 const Application& app);

// point id -> characteristic id -> value in the characteristic's unit.
// Points are conducts plus unconsumed slot outputs ("out/<slot>/<port>").
using FlowState = std::map<std::string, std::map<std::string, double>>;

// Designer-inserted observer turning a non-measurable environment variable
// into a characteristic mark.
struct SpyAgent {
    std::string id;
    std::string environment;
    std::string characteristic;
    std::map<std::string, double> value_marks;
    double default_mark = 0.5; // unknown environment values
};

// cpu share granted to a variant on its host: min(1, capacity / (hosted demand
// + external load)); zero-demand variants are immune.
double resource_factor(const Configuration& cfg, const Application& app,
                       const ContextState& state, const std::string& slot_id);

// Topological sweep of the conduct graph: variants apply their transfer rules
// scaled by the host's cpu share, network crossings cap "kbit/s" values at the
// route bandwidth and add route latency to "ms" values.
FlowState propagate_flows(const Configuration& cfg, const Application& app,
                          const ContextState& state);

// Full evaluation pipeline: flows -> wish marks + intrinsic contributions +
// spy marks -> hierarchy roll-up.
QoSReport evaluate_configuration(const Configuration& cfg, const Application& app,
                                 const ContextState& state, const UserProfile& user,
                                 const std::vector<SpyAgent>& spies);

// Threshold-crossing detector between two consecutive reports, plus a spy
// event whenever a watched environment value changed. Event ids are assigned
// from first_id upward in deterministic order.
std::vector<ReconfigurationEvent> detect_reconfiguration_events(
    const Application& app, const Configuration& cfg, const QoSReport& prev,
    const QoSReport& cur, const ContextState& prev_state, const ContextState& cur_state,
    const std::vector<SpyAgent>& spies, double threshold, std::uint64_t first_id);

} // namespace qosim
