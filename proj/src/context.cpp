#include "qosim/context.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qosim/errors.hpp"

namespace qosim {

ContextState ContextState::initial(const Application& app) {
    ContextState state;
    for (const auto& [id, st] : app.stations) state.station_loads[id] = st.base_load;
    for (const auto& [id, ln] : app.links) state.link_state[id] = {ln.bandwidth_kbps, ln.latency_ms};
    return state;
}

bool ContextState::saturated(const Application& app, const std::string& station) const {
    auto it = station_loads.find(station);
    const double load = it == station_loads.end() ? 0.0 : it->second;
    return load >= app.station(station).capacity;
}

ContextState apply_context_event(const ContextState& state, const ContextEvent& ev,
                                 const Application& app) {
    ContextState next = state;
    next.time_ms = std::max(state.time_ms, ev.at_ms);
    switch (ev.kind) {
    case ContextEvent::Kind::set_bandwidth:
        if (!next.link_state.contains(ev.target)) throw UnknownEntity{"link", ev.target};
        next.link_state[ev.target].bandwidth_kbps = ev.value;
        break;
    case ContextEvent::Kind::set_latency:
        if (!next.link_state.contains(ev.target)) throw UnknownEntity{"link", ev.target};
        next.link_state[ev.target].latency_ms = ev.value;
        break;
    case ContextEvent::Kind::set_station_load:
        if (!app.stations.contains(ev.target)) throw UnknownEntity{"station", ev.target};
        next.station_loads[ev.target] = ev.value;
        break;
    case ContextEvent::Kind::set_environment:
        next.environment[ev.target] = ev.text;
        break;
    }
    return next;
}

double resource_factor(const Configuration& cfg, const Application& app,
                       const ContextState& state, const std::string& slot_id) {
    const auto& placement = cfg.placement.at(slot_id);
    const auto& variant = app.slot(slot_id).variants.at(placement.variant);
    if (variant.cpu_demand <= 0.0) return 1.0;
    double demand_on_station = 0.0;
    for (const auto& [other_id, p] : cfg.placement) {
        if (p.station != placement.station) continue;
        demand_on_station += app.slot(other_id).variants.at(p.variant).cpu_demand;
    }
    auto load_it = state.station_loads.find(placement.station);
    const double external = load_it == state.station_loads.end() ? 0.0 : load_it->second;
    const double total = demand_on_station + external;
    if (total <= 0.0) return 1.0;
    return std::min(1.0, app.station(placement.station).capacity / total);
}

namespace {

std::vector<std::string> topological_slots(const Application& app) {
    std::map<std::string, int> indegree;
    for (const auto& [id, slot] : app.slots) {
        (void)slot;
        indegree[id] = 0;
    }
    for (const auto& [id, c] : app.conducts) {
        (void)id;
        if (c.loopback) continue;
        ++indegree[c.sink_slot];
    }
    // Kahn's algorithm; the ready set is kept sorted for determinism.
    std::vector<std::string> ready;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) ready.push_back(id);
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string cur = ready.front();
        ready.erase(ready.begin());
        order.push_back(cur);
        for (const auto& [id, c] : app.conducts) {
            (void)id;
            if (c.loopback || c.source_slot != cur) continue;
            if (--indegree[c.sink_slot] == 0) {
                auto pos = std::lower_bound(ready.begin(), ready.end(), c.sink_slot);
                ready.insert(pos, c.sink_slot);
            }
        }
    }
    if (order.size() != app.slots.size()) throw CyclicTopology{};
    return order;
}

bool is_bitrate(const Characteristic& c) { return c.unit == "kbit/s"; }
bool is_delay(const Characteristic& c) { return c.unit == "ms"; }

// Values arriving over several conducts combine by unit: delays keep the
// worst path, everything else the bottleneck.
void combine_input(const Characteristic& c, std::map<std::string, double>& inputs, double value) {
    auto [it, inserted] = inputs.try_emplace(c.id, value);
    if (inserted) return;
    it->second = is_delay(c) ? std::max(it->second, value) : std::min(it->second, value);
}

} // namespace

FlowState propagate_flows(const Configuration& cfg, const Application& app,
                          const ContextState& state) {
    const auto order = topological_slots(app);
    FlowState flows;
    std::map<std::string, std::map<std::string, double>> slot_inputs;
    // output values per (slot, port, characteristic)
    std::map<std::string, std::map<std::string, std::map<std::string, double>>> outputs;

    auto deliver = [&](const Conduct& conduct, double value, const Characteristic& c) {
        const auto& src = cfg.placement.at(conduct.source_slot);
        const auto& dst = cfg.placement.at(conduct.sink_slot);
        if (src.station != dst.station) {
            auto route_it = cfg.routes.find(conduct.id);
            if (route_it != cfg.routes.end()) {
                double min_bw = std::numeric_limits<double>::infinity();
                double latency = 0.0;
                for (const auto& link_id : route_it->second) {
                    const auto& ls = state.link_state.at(link_id);
                    min_bw = std::min(min_bw, ls.bandwidth_kbps);
                    latency += ls.latency_ms;
                }
                if (is_bitrate(c) && !route_it->second.empty()) value = std::min(value, min_bw);
                if (is_delay(c)) value += latency;
            }
        }
        return value;
    };

    for (const auto& slot_id : order) {
        const auto& slot = app.slot(slot_id);
        const auto& variant = slot.variants.at(cfg.placement.at(slot_id).variant);
        const double factor = resource_factor(cfg, app, state, slot_id);
        auto& inputs = slot_inputs[slot_id];

        // Which characteristics each output port must produce.
        std::map<std::string, std::set<std::string>> needed;
        for (const auto& [cid, conduct] : app.conducts) {
            (void)cid;
            if (conduct.source_slot != slot_id) continue;
            for (const auto& ch : conduct.required_characteristics)
                needed[conduct.source_port].insert(ch);
        }
        for (const auto& port : slot.output_ports) needed.try_emplace(port);

        for (auto& [port, chars] : needed) {
            // Rules may produce characteristics nothing consumes; keep them
            // so terminal outputs are observable.
            for (const auto& rule : variant.transfer)
                if (rule.port == port) chars.insert(rule.characteristic);
            for (const auto& char_id : chars) {
                const TransferRule* rule = nullptr;
                for (const auto& r : variant.transfer) {
                    if (r.port == port && r.characteristic == char_id) {
                        rule = &r;
                        break;
                    }
                }
                auto in_it = inputs.find(char_id);
                const double in = in_it == inputs.end() ? 0.0 : in_it->second;
                double out = in;
                if (rule) {
                    out = std::clamp(rule->a * in + rule->b, rule->lo, rule->hi);
                    switch (rule->cpu_scaling) {
                    case TransferRule::CpuScaling::none: break;
                    case TransferRule::CpuScaling::multiply: out *= factor; break;
                    case TransferRule::CpuScaling::divide:
                        out = factor > 0.0 ? out / factor : rule->hi;
                        break;
                    }
                }
                outputs[slot_id][port][char_id] = out;
            }
        }

        // Feed conducts leaving this slot.
        for (const auto& [cid, conduct] : app.conducts) {
            if (conduct.source_slot != slot_id) continue;
            for (const auto& char_id : conduct.required_characteristics) {
                const auto& c = app.characteristic(char_id);
                auto port_it = outputs[slot_id].find(conduct.source_port);
                double value = 0.0;
                if (port_it != outputs[slot_id].end()) {
                    auto v_it = port_it->second.find(char_id);
                    if (v_it != port_it->second.end()) value = v_it->second;
                }
                value = deliver(conduct, value, c);
                flows[cid][char_id] = value;
                if (!conduct.loopback) combine_input(c, slot_inputs[conduct.sink_slot], value);
            }
        }
    }

    // Terminal outputs: ports no conduct consumes become application outputs.
    for (const auto& [slot_id, ports] : outputs) {
        for (const auto& [port, values] : ports) {
            bool consumed = false;
            for (const auto& [cid, conduct] : app.conducts) {
                (void)cid;
                if (conduct.source_slot == slot_id && conduct.source_port == port) {
                    consumed = true;
                    break;
                }
            }
            if (consumed) continue;
            for (const auto& [char_id, value] : values)
                flows["out/" + slot_id + "/" + port][char_id] = value;
        }
    }
    return flows;
}

QoSReport evaluate_configuration(const Configuration& cfg, const Application& app,
                                 const ContextState& state, const UserProfile& user,
                                 const std::vector<SpyAgent>& spies) {
    const FlowState flows = propagate_flows(cfg, app, state);

    QoSReport report;
    report.at_ms = state.time_ms;
    SubgroupMarks sg_marks;

    auto note_mark = [&](const std::string& subgroup, const std::string& char_id, double mark) {
        auto& slot_marks = sg_marks[subgroup];
        auto [it, inserted] = slot_marks.try_emplace(char_id, mark);
        if (!inserted) it->second = std::min(it->second, mark); // worst point of the sub-group
    };

    for (const auto& [point, values] : flows) {
        std::string subgroup;
        if (auto c_it = app.conducts.find(point); c_it != app.conducts.end()) {
            subgroup = c_it->second.subgroup;
        } else {
            // "out/<slot>/<port>" points belong to the producing slot's sub-group.
            auto first = point.find('/');
            auto second = point.find('/', first + 1);
            subgroup = app.slot(point.substr(first + 1, second - first - 1)).subgroup;
        }
        for (const auto& [char_id, value] : values) {
            auto wish_it = user.wishes.find(char_id);
            if (wish_it == user.wishes.end()) continue;
            const double mark = mark_characteristic(value, wish_it->second);
            report.points[point][char_id] = mark;
            note_mark(subgroup, char_id, mark);
        }
    }

    // Intrinsic contributions of the chosen variants are marks already.
    for (const auto& [slot_id, p] : cfg.placement) {
        const auto& slot = app.slot(slot_id);
        const auto& variant = slot.variants.at(p.variant);
        for (const auto& [char_id, mark] : variant.intrinsic_contribution)
            note_mark(slot.subgroup, char_id, mark);
    }

    // Spies observe the environment from outside the flow graph.
    for (const auto& spy : spies) {
        double mark = spy.default_mark;
        if (auto env_it = state.environment.find(spy.environment); env_it != state.environment.end()) {
            auto m_it = spy.value_marks.find(env_it->second);
            mark = m_it == spy.value_marks.end() ? spy.default_mark : m_it->second;
        }
        report.points["spy/" + spy.id][spy.characteristic] = mark;
        // Attach to every sub-group whose conducts carry the characteristic.
        bool attached = false;
        for (const auto& [cid, conduct] : app.conducts) {
            (void)cid;
            if (conduct.required_characteristics.contains(spy.characteristic)) {
                note_mark(conduct.subgroup, spy.characteristic, mark);
                attached = true;
            }
        }
        if (!attached && !app.subgroups.empty())
            note_mark(app.subgroups.begin()->first, spy.characteristic, mark);
    }

    QoSReport rolled = evaluate_hierarchy(app, sg_marks, user);
    report.application = rolled.application;
    report.groups = std::move(rolled.groups);
    report.subgroups = std::move(rolled.subgroups);
    report.overall = rolled.overall;
    return report;
}

namespace {

// A conduct is the culprit when its own route changed character; otherwise
// the component that produced the flow is.
bool route_state_changed(const Configuration& cfg, const std::string& conduct_id,
                         const ContextState& prev, const ContextState& cur) {
    auto it = cfg.routes.find(conduct_id);
    if (it == cfg.routes.end()) return false;
    for (const auto& link_id : it->second) {
        const auto& a = prev.link_state.at(link_id);
        const auto& b = cur.link_state.at(link_id);
        if (a.bandwidth_kbps != b.bandwidth_kbps || a.latency_ms != b.latency_ms) return true;
    }
    return false;
}

} // namespace

std::vector<ReconfigurationEvent> detect_reconfiguration_events(
    const Application& app, const Configuration& cfg, const QoSReport& prev,
    const QoSReport& cur, const ContextState& prev_state, const ContextState& cur_state,
    const std::vector<SpyAgent>& spies, double threshold, std::uint64_t first_id) {
    std::vector<ReconfigurationEvent> out;
    std::uint64_t next_id = first_id;

    for (const auto& [point, cur_marks] : cur.points) {
        auto prev_it = prev.points.find(point);
        if (prev_it == prev.points.end()) continue; // new point, no baseline
        if (point.rfind("spy/", 0) == 0) continue;  // spies have their own rule

        std::set<std::string> fell, rose;
        double worst_fall = 0.0, best_rise = 0.0;
        for (const auto& [char_id, mark] : cur_marks) {
            auto pm = prev_it->second.find(char_id);
            if (pm == prev_it->second.end()) continue;
            const double delta = mark - pm->second;
            if (delta < -threshold) {
                fell.insert(char_id);
                worst_fall = std::min(worst_fall, delta);
            } else if (delta > threshold) {
                rose.insert(char_id);
                best_rise = std::max(best_rise, delta);
            }
        }
        if (fell.empty() && rose.empty()) continue;

        std::string culprit;
        bool is_conduct = false;
        if (auto c_it = app.conducts.find(point); c_it != app.conducts.end()) {
            if (route_state_changed(cfg, point, prev_state, cur_state)) {
                culprit = point;
                is_conduct = true;
            } else {
                culprit = c_it->second.source_slot;
            }
        } else {
            auto first = point.find('/');
            auto second = point.find('/', first + 1);
            culprit = point.substr(first + 1, second - first - 1);
        }
        if (!fell.empty()) {
            out.push_back({next_id++, cur.at_ms, EventKind::degradation, culprit, is_conduct,
                           fell, worst_fall, 0.0});
        }
        if (!rose.empty()) {
            out.push_back({next_id++, cur.at_ms, EventKind::improvement, culprit, is_conduct,
                           rose, best_rise, 0.0});
        }
    }

    for (const auto& spy : spies) {
        auto pv = prev_state.environment.find(spy.environment);
        auto cv = cur_state.environment.find(spy.environment);
        const std::string prev_val = pv == prev_state.environment.end() ? "" : pv->second;
        const std::string cur_val = cv == cur_state.environment.end() ? "" : cv->second;
        if (prev_val == cur_val) continue;
        const std::string point = "spy/" + spy.id;
        double delta = 0.0;
        if (auto cur_pt = cur.points.find(point); cur_pt != cur.points.end()) {
            if (auto prev_pt = prev.points.find(point); prev_pt != prev.points.end()) {
                delta = cur_pt->second.at(spy.characteristic) -
                        prev_pt->second.at(spy.characteristic);
            }
        }
        // The spy's culprit is the first conduct carrying its characteristic.
        std::string culprit;
        bool is_conduct = false;
        for (const auto& [cid, conduct] : app.conducts) {
            if (conduct.required_characteristics.contains(spy.characteristic)) {
                culprit = cid;
                is_conduct = true;
                break;
            }
        }
        if (culprit.empty() && !app.slots.empty()) culprit = app.slots.begin()->first;
        out.push_back({next_id++, cur.at_ms, EventKind::spy, culprit, is_conduct,
                       {spy.characteristic}, delta, 0.0});
    }
    return out;
}

} // namespace qosim
