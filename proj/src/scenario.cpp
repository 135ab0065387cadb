#include "qosim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "qosim/errors.hpp"

namespace qosim {

using nlohmann::json;

RuntimeParams Scenario::runtime_params(Policy policy) const {
    RuntimeParams rt;
    rt.dt_ms = params.dt_ms;
    rt.action_latency_ms = params.action_latency_ms;
    rt.event_threshold = params.event_threshold;
    rt.horizon_ms = params.horizon_ms;
    rt.policy = policy;
    rt.search.eps_intrinsic = params.eps_intrinsic;
    rt.search.eps_contextual = params.eps_contextual;
    rt.search.delta = params.delta;
    rt.search.adjacent_family_k = params.adjacent_family_k;
    rt.search.exact_enumeration_cap = params.exact_enumeration_cap;
    rt.search.max_stage_candidates = params.max_stage_candidates;
    rt.search.brute_force_cap = params.brute_force_cap;
    return rt;
}

namespace {

double require_mark(const json& j, const std::string& where) {
    const double mark = j.get<double>();
    if (!(mark >= 0.0 && mark <= 1.0))
        throw ConstraintError{where + ": mark " + std::to_string(mark) + " outside [0,1]"};
    return mark;
}

TransferRule::CpuScaling parse_cpu_scaling(const std::string& text, const std::string& where) {
    if (text == "none") return TransferRule::CpuScaling::none;
    if (text == "multiply") return TransferRule::CpuScaling::multiply;
    if (text == "divide") return TransferRule::CpuScaling::divide;
    throw ConstraintError{where + ": unknown cpu scaling '" + text + "'"};
}

const char* cpu_scaling_name(TransferRule::CpuScaling scaling) {
    switch (scaling) {
    case TransferRule::CpuScaling::none: return "none";
    case TransferRule::CpuScaling::multiply: return "multiply";
    case TransferRule::CpuScaling::divide: return "divide";
    }
    return "none";
}

void validate_scenario(const Scenario& s) {
    const auto& app = s.app;
    if (app.characteristics.empty()) throw ConstraintError{"no characteristics declared"};
    if (app.stations.empty()) throw ConstraintError{"no stations declared"};
    if (s.params.horizon_ms <= 0) throw ConstraintError{"horizon_ms must be > 0"};
    if (s.params.eps_intrinsic < 0 || s.params.eps_contextual < 0)
        throw ConstraintError{"epsilons must be >= 0"};

    for (const auto& [id, st] : app.stations) {
        if (st.capacity <= 0) throw ConstraintError{"station " + id + ": capacity must be > 0"};
        if (st.base_load < 0 || st.base_load > st.capacity)
            throw ConstraintError{"station " + id + ": base_load outside [0, capacity]"};
    }
    for (const auto& [id, ln] : app.links) {
        if (!app.stations.contains(ln.a)) throw ReferenceError{"link " + id, ln.a};
        if (!app.stations.contains(ln.b)) throw ReferenceError{"link " + id, ln.b};
        if (ln.a == ln.b) throw ConstraintError{"link " + id + ": endpoints must differ"};
        if (ln.bandwidth_kbps < 0 || ln.latency_ms < 0)
            throw ConstraintError{"link " + id + ": negative bandwidth or latency"};
    }
    for (const auto& [gid, group] : app.groups) {
        for (const auto& sg : group.subgroups)
            if (!app.subgroups.contains(sg)) throw ReferenceError{"group " + gid, sg};
    }
    for (const auto& [sgid, sg] : app.subgroups) {
        if (!app.groups.contains(sg.group)) throw ReferenceError{"subgroup " + sgid, sg.group};
        for (const auto& slot : sg.slots)
            if (!app.slots.contains(slot)) throw ReferenceError{"subgroup " + sgid, slot};
        for (const auto& conduct : sg.conducts)
            if (!app.conducts.contains(conduct)) throw ReferenceError{"subgroup " + sgid, conduct};
    }
    for (const auto& [slot_id, slot] : app.slots) {
        if (!app.subgroups.contains(slot.subgroup))
            throw ReferenceError{"slot " + slot_id, slot.subgroup};
        if (slot.variants.empty())
            throw ConstraintError{"slot " + slot_id + ": no admissible variant"};
        for (const auto& station : slot.admissible_stations)
            if (!app.stations.contains(station)) throw ReferenceError{"slot " + slot_id, station};
        std::set<int> ranks;
        for (const auto& [vid, variant] : slot.variants) {
            if (!ranks.insert(variant.power_rank).second)
                throw ConstraintError{"slot " + slot_id + ": duplicate power_rank " +
                                      std::to_string(variant.power_rank)};
            if (variant.cpu_demand < 0)
                throw ConstraintError{"variant " + vid + ": negative cpu_demand"};
            for (const auto& [char_id, mark] : variant.intrinsic_contribution) {
                auto c = app.characteristics.find(char_id);
                if (c == app.characteristics.end())
                    throw ReferenceError{"variant " + vid, char_id};
                if (c->second.kind != CharKind::intrinsic)
                    throw ConstraintError{"variant " + vid + ": contribution to non-intrinsic " +
                                          char_id};
                if (mark < 0 || mark > 1)
                    throw ConstraintError{"variant " + vid + ": contribution outside [0,1]"};
            }
            for (const auto& rule : variant.transfer) {
                if (!app.characteristics.contains(rule.characteristic))
                    throw ReferenceError{"variant " + vid + " transfer", rule.characteristic};
                if (!std::isfinite(rule.lo) || !std::isfinite(rule.hi) || rule.lo > rule.hi)
                    throw ConstraintError{"variant " + vid + ": bad clamp bounds"};
            }
        }
    }
    for (const auto& [cid, conduct] : app.conducts) {
        if (!app.slots.contains(conduct.source_slot))
            throw ReferenceError{"conduct " + cid, conduct.source_slot};
        if (!app.slots.contains(conduct.sink_slot))
            throw ReferenceError{"conduct " + cid, conduct.sink_slot};
        if (!app.subgroups.contains(conduct.subgroup))
            throw ReferenceError{"conduct " + cid, conduct.subgroup};
        if (conduct.source_slot == conduct.sink_slot && !conduct.loopback)
            throw ConstraintError{"conduct " + cid + ": source equals sink without loopback"};
        for (const auto& char_id : conduct.required_characteristics)
            if (!app.characteristics.contains(char_id)) throw ReferenceError{"conduct " + cid, char_id};
        // Every variant of the source slot must define the rules the conduct needs.
        for (const auto& [vid, variant] : app.slot(conduct.source_slot).variants) {
            for (const auto& char_id : conduct.required_characteristics) {
                const bool covered =
                    std::any_of(variant.transfer.begin(), variant.transfer.end(),
                                [&](const TransferRule& r) {
                                    return r.port == conduct.source_port &&
                                           r.characteristic == char_id;
                                });
                if (!covered)
                    throw ConstraintError{"variant " + vid + ": no transfer rule for " + char_id +
                                          " on port " + conduct.source_port};
            }
        }
    }
    for (const auto& [char_id, wish] : s.user.wishes) {
        if (!app.characteristics.contains(char_id)) throw ReferenceError{"wish", char_id};
        if (wish.weight < 0) throw ConstraintError{"wish " + char_id + ": negative weight"};
        if (wish.breakpoints.size() < 2)
            throw ConstraintError{"wish " + char_id + ": needs at least 2 breakpoints"};
        for (std::size_t i = 0; i < wish.breakpoints.size(); ++i) {
            if (wish.breakpoints[i].mark < 0 || wish.breakpoints[i].mark > 1)
                throw ConstraintError{"wish " + char_id + ": mark outside [0,1]"};
            if (i && wish.breakpoints[i].value <= wish.breakpoints[i - 1].value)
                throw ConstraintError{"wish " + char_id + ": breakpoints not strictly ascending"};
        }
    }
    for (const auto& [sgid, weight] : s.user.subgroup_weights) {
        if (!app.subgroups.contains(sgid)) throw ReferenceError{"subgroup_weights", sgid};
        if (weight < 0) throw ConstraintError{"subgroup weight " + sgid + " negative"};
    }
    for (const auto& [gid, weight] : s.user.group_weights) {
        if (!app.groups.contains(gid)) throw ReferenceError{"group_weights", gid};
        if (weight < 0) throw ConstraintError{"group weight " + gid + " negative"};
    }
    for (const auto& spy : s.spies) {
        if (!app.characteristics.contains(spy.characteristic))
            throw ReferenceError{"spy " + spy.id, spy.characteristic};
        for (const auto& [value, mark] : spy.value_marks) {
            (void)value;
            if (mark < 0 || mark > 1)
                throw ConstraintError{"spy " + spy.id + ": mark outside [0,1]"};
        }
    }
    for (const auto& ev : s.context_events) {
        if (ev.at_ms < 0) throw ConstraintError{"context event before t=0"};
        switch (ev.kind) {
        case ContextEvent::Kind::set_bandwidth:
        case ContextEvent::Kind::set_latency:
            if (!app.links.contains(ev.target)) throw ReferenceError{"context event", ev.target};
            break;
        case ContextEvent::Kind::set_station_load:
            if (!app.stations.contains(ev.target)) throw ReferenceError{"context event", ev.target};
            break;
        case ContextEvent::Kind::set_environment: break;
        }
    }
    for (const auto& [slot_id, p] : s.default_configuration.placement) {
        if (!app.slots.contains(slot_id)) throw ReferenceError{"default configuration", slot_id};
        if (!app.stations.contains(p.station))
            throw ReferenceError{"default configuration", p.station};
        if (!app.slots.at(slot_id).variants.contains(p.variant))
            throw ReferenceError{"default configuration", p.variant};
    }
    for (const auto& [conduct_id, route] : s.default_configuration.routes) {
        if (!app.conducts.contains(conduct_id))
            throw ReferenceError{"default configuration", conduct_id};
        for (const auto& link_id : route)
            if (!app.links.contains(link_id)) throw ReferenceError{"default configuration", link_id};
    }
    auto violations = validate_configuration(s.default_configuration, app);
    if (!violations.empty())
        throw ConstraintError{"default configuration: " + violations.front()};
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError{e.what()};
    }

    Scenario s;
    try {
        s.name = root.value("name", "unnamed");

        for (const auto& jc : root.at("characteristics")) {
            Characteristic c;
            c.id = jc.at("id").get<std::string>();
            const std::string kind = jc.at("kind").get<std::string>();
            if (kind == "intrinsic") c.kind = CharKind::intrinsic;
            else if (kind == "contextual") c.kind = CharKind::contextual;
            else throw ConstraintError{"characteristic " + c.id + ": unknown kind '" + kind + "'"};
            c.unit = jc.value("unit", "");
            c.description = jc.value("description", "");
            if (!s.app.characteristics.emplace(c.id, c).second)
                throw ConstraintError{"duplicate characteristic id: " + c.id};
        }

        for (const auto& jst : root.at("stations")) {
            Station st;
            st.id = jst.at("id").get<std::string>();
            st.capacity = jst.at("capacity").get<double>();
            st.base_load = jst.value("base_load", 0.0);
            if (!s.app.stations.emplace(st.id, st).second)
                throw ConstraintError{"duplicate station id: " + st.id};
        }

        for (const auto& jl : root.value("links", json::array())) {
            Link ln;
            ln.id = jl.at("id").get<std::string>();
            ln.a = jl.at("a").get<std::string>();
            ln.b = jl.at("b").get<std::string>();
            ln.bandwidth_kbps = jl.at("bandwidth_kbps").get<double>();
            ln.latency_ms = jl.at("latency_ms").get<double>();
            if (!s.app.links.emplace(ln.id, ln).second)
                throw ConstraintError{"duplicate link id: " + ln.id};
        }

        for (const auto& jg : root.at("groups")) {
            Group g;
            g.id = jg.at("id").get<std::string>();
            for (const auto& jsg : jg.at("subgroups")) {
                SubGroup sg;
                sg.id = jsg.at("id").get<std::string>();
                sg.group = g.id;
                g.subgroups.push_back(sg.id);
                for (const auto& jslot : jsg.at("slots")) {
                    ProcessorSlot slot;
                    slot.id = jslot.at("id").get<std::string>();
                    slot.subgroup = sg.id;
                    sg.slots.push_back(slot.id);
                    for (const auto& p : jslot.value("inputs", json::array()))
                        slot.input_ports.push_back(p.get<std::string>());
                    for (const auto& p : jslot.value("outputs", json::array()))
                        slot.output_ports.push_back(p.get<std::string>());
                    for (const auto& st : jslot.value("stations", json::array()))
                        slot.admissible_stations.push_back(st.get<std::string>());
                    for (const auto& jv : jslot.at("variants")) {
                        ComponentVariant v;
                        v.id = jv.at("id").get<std::string>();
                        v.slot = slot.id;
                        v.power_rank = jv.at("power_rank").get<int>();
                        v.cpu_demand = jv.value("cpu_demand", 0.0);
                        const json contrib = jv.value("intrinsic", json::object());
                        for (const auto& [char_id, mark] : contrib.items())
                            v.intrinsic_contribution[char_id] =
                                require_mark(mark, "variant " + v.id);
                        for (const auto& jr : jv.value("transfer", json::array())) {
                            TransferRule r;
                            r.port = jr.at("port").get<std::string>();
                            r.characteristic = jr.at("characteristic").get<std::string>();
                            r.a = jr.value("a", 1.0);
                            r.b = jr.value("b", 0.0);
                            r.lo = jr.value("lo", 0.0);
                            r.hi = jr.value("hi", 1e9);
                            r.cpu_scaling =
                                parse_cpu_scaling(jr.value("cpu", "none"), "variant " + v.id);
                            v.transfer.push_back(std::move(r));
                        }
                        if (!slot.variants.emplace(v.id, v).second)
                            throw ConstraintError{"duplicate variant id: " + v.id};
                    }
                    if (!s.app.slots.emplace(slot.id, slot).second)
                        throw ConstraintError{"duplicate slot id: " + slot.id};
                }
                for (const auto& jc : jsg.value("conducts", json::array())) {
                    Conduct c;
                    c.id = jc.at("id").get<std::string>();
                    c.subgroup = sg.id;
                    sg.conducts.push_back(c.id);
                    c.source_slot = jc.at("from").at(0).get<std::string>();
                    c.source_port = jc.at("from").at(1).get<std::string>();
                    c.sink_slot = jc.at("to").at(0).get<std::string>();
                    c.sink_port = jc.at("to").at(1).get<std::string>();
                    c.loopback = jc.value("loopback", false);
                    for (const auto& ch : jc.at("characteristics"))
                        c.required_characteristics.insert(ch.get<std::string>());
                    if (!s.app.conducts.emplace(c.id, c).second)
                        throw ConstraintError{"duplicate conduct id: " + c.id};
                }
                if (!s.app.subgroups.emplace(sg.id, sg).second)
                    throw ConstraintError{"duplicate subgroup id: " + sg.id};
            }
            if (!s.app.groups.emplace(g.id, g).second)
                throw ConstraintError{"duplicate group id: " + g.id};
        }

        const auto& juser = root.at("user");
        for (const auto& jw : juser.at("wishes")) {
            WishFunction w;
            w.characteristic = jw.at("characteristic").get<std::string>();
            w.weight = jw.at("weight").get<double>();
            for (const auto& jb : jw.at("breakpoints"))
                w.breakpoints.push_back({jb.at(0).get<double>(),
                                         require_mark(jb.at(1), "wish " + w.characteristic)});
            if (!s.user.wishes.emplace(w.characteristic, w).second)
                throw ConstraintError{"duplicate wish for characteristic: " + w.characteristic};
        }
        const json sg_weights = juser.value("subgroup_weights", json::object());
        for (const auto& [sgid, weight] : sg_weights.items())
            s.user.subgroup_weights[sgid] = weight.get<double>();
        const json g_weights = juser.value("group_weights", json::object());
        for (const auto& [gid, weight] : g_weights.items())
            s.user.group_weights[gid] = weight.get<double>();

        for (const auto& jspy : root.value("spies", json::array())) {
            SpyAgent spy;
            spy.id = jspy.at("id").get<std::string>();
            spy.environment = jspy.at("environment").get<std::string>();
            spy.characteristic = jspy.at("characteristic").get<std::string>();
            spy.default_mark = require_mark(jspy.at("default_mark"), "spy " + spy.id);
            for (const auto& [value, mark] : jspy.at("values").items())
                spy.value_marks[value] = require_mark(mark, "spy " + spy.id);
            s.spies.push_back(std::move(spy));
        }

        const auto& jdef = root.at("default_configuration");
        for (const auto& [slot, binding] : jdef.at("placement").items())
            s.default_configuration.placement[slot] = {binding.at(0).get<std::string>(),
                                                       binding.at(1).get<std::string>()};
        const json jroutes = jdef.value("routes", json::object());
        for (const auto& [conduct, route] : jroutes.items()) {
            std::vector<std::string> links;
            for (const auto& ln : route) links.push_back(ln.get<std::string>());
            s.default_configuration.routes[conduct] = std::move(links);
        }

        const json jenv = root.value("environment", json::object());
        for (const auto& [name, value] : jenv.items())
            s.initial_environment[name] = value.get<std::string>();

        for (const auto& jev : root.value("context_events", json::array())) {
            ContextEvent ev;
            ev.at_ms = jev.at("at_ms").get<std::int64_t>();
            const std::string action = jev.at("action").get<std::string>();
            if (action == "set_bandwidth") ev.kind = ContextEvent::Kind::set_bandwidth;
            else if (action == "set_latency") ev.kind = ContextEvent::Kind::set_latency;
            else if (action == "set_station_load") ev.kind = ContextEvent::Kind::set_station_load;
            else if (action == "set_environment") ev.kind = ContextEvent::Kind::set_environment;
            else throw ConstraintError{"unknown context action '" + action + "'"};
            ev.target = jev.at("target").get<std::string>();
            if (ev.kind == ContextEvent::Kind::set_environment)
                ev.text = jev.at("value").get<std::string>();
            else
                ev.value = jev.at("value").get<double>();
            s.context_events.push_back(std::move(ev));
        }

        const auto jp = root.value("params", json::object());
        s.params.eps_intrinsic = jp.value("eps_intrinsic", s.params.eps_intrinsic);
        s.params.eps_contextual = jp.value("eps_contextual", s.params.eps_contextual);
        s.params.delta = jp.value("delta", s.params.delta);
        s.params.event_threshold = jp.value("event_threshold", s.params.event_threshold);
        s.params.dt_ms = jp.value("dt_ms", s.params.dt_ms);
        s.params.action_latency_ms = jp.value("action_latency_ms", s.params.action_latency_ms);
        s.params.horizon_ms = jp.value("horizon_ms", s.params.horizon_ms);
        s.params.adjacent_family_k = jp.value("adjacent_family_k", s.params.adjacent_family_k);
        s.params.exact_enumeration_cap =
            jp.value("exact_enumeration_cap", s.params.exact_enumeration_cap);
        s.params.max_stage_candidates =
            jp.value("max_stage_candidates", s.params.max_stage_candidates);
        s.params.brute_force_cap = jp.value("brute_force_cap", s.params.brute_force_cap);
        s.params.seed = jp.value("seed", s.params.seed);
    } catch (const json::exception& e) {
        throw SyntaxError{e.what()};
    }

    validate_scenario(s);
    return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
    json root;
    root["name"] = s.name;

    auto chars = json::array();
    for (const auto& [id, c] : s.app.characteristics) {
        chars.push_back({{"id", id},
                         {"kind", c.kind == CharKind::intrinsic ? "intrinsic" : "contextual"},
                         {"unit", c.unit},
                         {"description", c.description}});
    }
    root["characteristics"] = std::move(chars);

    auto stations = json::array();
    for (const auto& [id, st] : s.app.stations)
        stations.push_back({{"id", id}, {"capacity", st.capacity}, {"base_load", st.base_load}});
    root["stations"] = std::move(stations);

    auto links = json::array();
    for (const auto& [id, ln] : s.app.links) {
        links.push_back({{"id", id},
                         {"a", ln.a},
                         {"b", ln.b},
                         {"bandwidth_kbps", ln.bandwidth_kbps},
                         {"latency_ms", ln.latency_ms}});
    }
    root["links"] = std::move(links);

    auto groups = json::array();
    for (const auto& [gid, group] : s.app.groups) {
        json jg{{"id", gid}};
        auto subgroups = json::array();
        for (const auto& sgid : group.subgroups) {
            const auto& sg = s.app.subgroups.at(sgid);
            json jsg{{"id", sgid}};
            auto slots = json::array();
            for (const auto& slot_id : sg.slots) {
                const auto& slot = s.app.slots.at(slot_id);
                json jslot{{"id", slot_id}};
                jslot["inputs"] = slot.input_ports;
                jslot["outputs"] = slot.output_ports;
                if (!slot.admissible_stations.empty()) jslot["stations"] = slot.admissible_stations;
                auto variants = json::array();
                for (const auto& [vid, v] : slot.variants) {
                    json jv{{"id", vid},
                            {"power_rank", v.power_rank},
                            {"cpu_demand", v.cpu_demand}};
                    if (!v.intrinsic_contribution.empty()) {
                        json contrib;
                        for (const auto& [char_id, mark] : v.intrinsic_contribution)
                            contrib[char_id] = mark;
                        jv["intrinsic"] = std::move(contrib);
                    }
                    if (!v.transfer.empty()) {
                        auto rules = json::array();
                        for (const auto& r : v.transfer) {
                            rules.push_back({{"port", r.port},
                                             {"characteristic", r.characteristic},
                                             {"a", r.a},
                                             {"b", r.b},
                                             {"lo", r.lo},
                                             {"hi", r.hi},
                                             {"cpu", cpu_scaling_name(r.cpu_scaling)}});
                        }
                        jv["transfer"] = std::move(rules);
                    }
                    variants.push_back(std::move(jv));
                }
                jslot["variants"] = std::move(variants);
                slots.push_back(std::move(jslot));
            }
            jsg["slots"] = std::move(slots);
            auto conducts = json::array();
            for (const auto& cid : sg.conducts) {
                const auto& c = s.app.conducts.at(cid);
                json jc{{"id", cid},
                        {"from", json::array({c.source_slot, c.source_port})},
                        {"to", json::array({c.sink_slot, c.sink_port})},
                        {"characteristics",
                         std::vector<std::string>(c.required_characteristics.begin(),
                                                  c.required_characteristics.end())}};
                if (c.loopback) jc["loopback"] = true;
                conducts.push_back(std::move(jc));
            }
            jsg["conducts"] = std::move(conducts);
            subgroups.push_back(std::move(jsg));
        }
        jg["subgroups"] = std::move(subgroups);
        groups.push_back(std::move(jg));
    }
    root["groups"] = std::move(groups);

    json juser;
    auto wishes = json::array();
    for (const auto& [char_id, w] : s.user.wishes) {
        auto bps = json::array();
        for (const auto& bp : w.breakpoints) bps.push_back(json::array({bp.value, bp.mark}));
        wishes.push_back({{"characteristic", char_id}, {"weight", w.weight}, {"breakpoints", bps}});
    }
    juser["wishes"] = std::move(wishes);
    juser["subgroup_weights"] = s.user.subgroup_weights;
    juser["group_weights"] = s.user.group_weights;
    root["user"] = std::move(juser);

    auto spies = json::array();
    for (const auto& spy : s.spies) {
        spies.push_back({{"id", spy.id},
                         {"environment", spy.environment},
                         {"characteristic", spy.characteristic},
                         {"default_mark", spy.default_mark},
                         {"values", spy.value_marks}});
    }
    root["spies"] = std::move(spies);

    json placement;
    for (const auto& [slot, p] : s.default_configuration.placement)
        placement[slot] = json::array({p.variant, p.station});
    json routes;
    for (const auto& [conduct, route] : s.default_configuration.routes) routes[conduct] = route;
    root["default_configuration"] = {{"placement", std::move(placement)},
                                     {"routes", std::move(routes)}};

    root["environment"] = s.initial_environment;

    auto events = json::array();
    for (const auto& ev : s.context_events) {
        json jev{{"at_ms", ev.at_ms}, {"target", ev.target}};
        switch (ev.kind) {
        case ContextEvent::Kind::set_bandwidth: jev["action"] = "set_bandwidth"; jev["value"] = ev.value; break;
        case ContextEvent::Kind::set_latency: jev["action"] = "set_latency"; jev["value"] = ev.value; break;
        case ContextEvent::Kind::set_station_load: jev["action"] = "set_station_load"; jev["value"] = ev.value; break;
        case ContextEvent::Kind::set_environment: jev["action"] = "set_environment"; jev["value"] = ev.text; break;
        }
        events.push_back(std::move(jev));
    }
    root["context_events"] = std::move(events);

    root["params"] = {{"eps_intrinsic", s.params.eps_intrinsic},
                      {"eps_contextual", s.params.eps_contextual},
                      {"delta", s.params.delta},
                      {"event_threshold", s.params.event_threshold},
                      {"dt_ms", s.params.dt_ms},
                      {"action_latency_ms", s.params.action_latency_ms},
                      {"horizon_ms", s.params.horizon_ms},
                      {"adjacent_family_k", s.params.adjacent_family_k},
                      {"exact_enumeration_cap", s.params.exact_enumeration_cap},
                      {"max_stage_candidates", s.params.max_stage_candidates},
                      {"brute_force_cap", s.params.brute_force_cap},
                      {"seed", s.params.seed}};
    return root;
}

namespace {

// The bundled video-surveillance application: capture -> compression ->
// picture processing -> display, three stations, 1*9*15*1 = 135 valid
// configurations. The constants were tuned until the reference run exhibits
// the expected reconfiguration sequence, then frozen.
Scenario make_surveillance135() {
    Scenario s;
    s.name = "surveillance135";

    auto add_char = [&](const std::string& id, CharKind kind, const std::string& unit,
                        const std::string& desc) {
        s.app.characteristics[id] = {id, kind, unit, desc};
    };
    add_char("fidelity", CharKind::intrinsic, "mark", "compression fidelity grade");
    add_char("sharpness", CharKind::intrinsic, "mark", "picture processing grade");
    add_char("video_rate", CharKind::contextual, "kbit/s", "delivered video rate");
    add_char("frame_rate", CharKind::contextual, "frames/s", "delivered frame rate");
    add_char("delay", CharKind::contextual, "ms", "end-to-end delay");

    s.app.stations["hub"] = {"hub", 10.0, 0.0};
    s.app.stations["left"] = {"left", 10.0, 0.0};
    s.app.stations["right"] = {"right", 10.0, 0.0};

    s.app.links["ln-hl"] = {"ln-hl", "hub", "left", 4000.0, 5.0};
    s.app.links["ln-hr"] = {"ln-hr", "hub", "right", 600.0, 5.0};
    s.app.links["ln-lr"] = {"ln-lr", "left", "right", 4000.0, 5.0};

    Group g{"g-surv", {"sg-acquire", "sg-process", "sg-render"}};
    s.app.groups[g.id] = g;
    s.app.subgroups["sg-acquire"] = {"sg-acquire", "g-surv", {"sl-capture"}, {}};
    s.app.subgroups["sg-process"] =
        {"sg-process", "g-surv", {"sl-comp", "sl-proc"}, {"cn-cap-comp", "cn-comp-proc"}};
    s.app.subgroups["sg-render"] = {"sg-render", "g-surv", {"sl-display"}, {"cn-proc-disp"}};

    auto rule = [](const std::string& port, const std::string& ch, double a, double b,
                   TransferRule::CpuScaling scaling) {
        return TransferRule{port, ch, a, b, 0.0, 1e9, scaling};
    };
    const auto mult = TransferRule::CpuScaling::multiply;
    const auto none = TransferRule::CpuScaling::none;

    ProcessorSlot capture{"sl-capture", "sg-acquire", {}, {"o"}, {}, {"left"}};
    ComponentVariant cam{"cam", "sl-capture", {}, {}, 0.0, 1};
    cam.transfer = {rule("o", "video_rate", 0, 2500, none), rule("o", "frame_rate", 0, 25, none),
                    rule("o", "delay", 0, 0, none)};
    capture.variants["cam"] = cam;
    s.app.slots["sl-capture"] = capture;

    ProcessorSlot comp{"sl-comp", "sg-process", {"i"}, {"o"}, {}, {}};
    const double comp_fidelity[] = {0.46, 0.70, 0.94};
    const double comp_rate_ratio[] = {0.5, 0.7, 0.9};
    const double comp_demand[] = {1.0, 2.0, 4.0};
    for (int i = 0; i < 3; ++i) {
        ComponentVariant v;
        v.id = "c" + std::to_string(i + 1);
        v.slot = comp.id;
        v.power_rank = i + 1;
        v.cpu_demand = comp_demand[i];
        v.intrinsic_contribution["fidelity"] = comp_fidelity[i];
        v.transfer = {rule("o", "video_rate", comp_rate_ratio[i], 0, mult),
                      rule("o", "frame_rate", 1, 0, mult), rule("o", "delay", 1, 10, none)};
        comp.variants[v.id] = v;
    }
    s.app.slots["sl-comp"] = comp;

    ProcessorSlot proc{"sl-proc", "sg-process", {"i"}, {"o"}, {}, {}};
    const double proc_sharpness[] = {0.46, 0.508, 0.556, 0.604, 0.652};
    const double proc_fps_ratio[] = {0.5, 0.62, 0.74, 0.86, 1.0};
    const double proc_demand[] = {1.0, 1.5, 2.0, 2.5, 3.0};
    for (int i = 0; i < 5; ++i) {
        ComponentVariant v;
        v.id = "p" + std::to_string(i + 1);
        v.slot = proc.id;
        v.power_rank = i + 1;
        v.cpu_demand = proc_demand[i];
        v.intrinsic_contribution["sharpness"] = proc_sharpness[i];
        v.transfer = {rule("o", "video_rate", 1, 0, mult),
                      rule("o", "frame_rate", proc_fps_ratio[i], 0, mult),
                      rule("o", "delay", 1, 5, none)};
        proc.variants[v.id] = v;
    }
    s.app.slots["sl-proc"] = proc;

    ProcessorSlot display{"sl-display", "sg-render", {"i"}, {"screen"}, {}, {"right"}};
    ComponentVariant scr{"scr", "sl-display", {}, {}, 0.0, 1};
    scr.transfer = {rule("screen", "video_rate", 1, 0, none),
                    rule("screen", "frame_rate", 1, 0, none), rule("screen", "delay", 1, 0, none)};
    display.variants["scr"] = scr;
    s.app.slots["sl-display"] = display;

    auto add_conduct = [&](const std::string& id, const std::string& sg, const std::string& from,
                           const std::string& to) {
        Conduct c;
        c.id = id;
        c.subgroup = sg;
        c.source_slot = from;
        c.source_port = from == "sl-capture" ? "o" : "o";
        c.sink_slot = to;
        c.sink_port = to == "sl-display" ? "i" : "i";
        c.required_characteristics = {"video_rate", "frame_rate", "delay"};
        s.app.conducts[id] = c;
    };
    add_conduct("cn-cap-comp", "sg-process", "sl-capture", "sl-comp");
    add_conduct("cn-comp-proc", "sg-process", "sl-comp", "sl-proc");
    add_conduct("cn-proc-disp", "sg-render", "sl-proc", "sl-display");

    auto identity_wish = [](const std::string& ch, double weight) {
        return WishFunction{ch, {{0.0, 0.0}, {1.0, 1.0}}, weight};
    };
    s.user.wishes["fidelity"] = identity_wish("fidelity", 1.0);
    s.user.wishes["sharpness"] = identity_wish("sharpness", 1.0);
    s.user.wishes["video_rate"] = {"video_rate", {{0.0, 0.0}, {2300.0, 1.0}}, 1.0};
    s.user.wishes["frame_rate"] = {"frame_rate", {{0.0, 0.0}, {25.0, 1.0}}, 1.0};
    s.user.wishes["delay"] = {"delay", {{0.0, 1.0}, {400.0, 0.0}}, 1.0};
    s.user.subgroup_weights = {{"sg-acquire", 1.0}, {"sg-process", 2.0}, {"sg-render", 1.0}};
    s.user.group_weights = {{"g-surv", 1.0}};

    s.default_configuration.placement = {{"sl-capture", {"cam", "left"}},
                                         {"sl-comp", {"c1", "hub"}},
                                         {"sl-proc", {"p3", "hub"}},
                                         {"sl-display", {"scr", "right"}}};
    s.default_configuration.routes = {{"cn-cap-comp", {"ln-hl"}},
                                      {"cn-comp-proc", {}},
                                      {"cn-proc-disp", {"ln-hr"}}};

    // Favorable context established, one station saturated, restored, saturated
    // again.
    s.context_events = {{500, ContextEvent::Kind::set_bandwidth, "ln-hr", 2400.0, ""},
                        {4500, ContextEvent::Kind::set_station_load, "hub", 30.0, ""},
                        {7500, ContextEvent::Kind::set_station_load, "hub", 0.0, ""},
                        {10000, ContextEvent::Kind::set_station_load, "hub", 30.0, ""}};

    s.params.eps_intrinsic = 0.004;
    s.params.eps_contextual = 0.05;
    s.params.delta = 0.01;
    s.params.event_threshold = 0.1;
    s.params.dt_ms = 100;
    s.params.action_latency_ms = 200;
    s.params.horizon_ms = 12000;
    return s;
}

Scenario make_toy6() {
    Scenario s;
    s.name = "toy6";
    s.app.characteristics["qa"] = {"qa", CharKind::intrinsic, "mark", ""};
    s.app.characteristics["qb"] = {"qb", CharKind::intrinsic, "mark", ""};
    s.app.characteristics["thr"] = {"thr", CharKind::contextual, "kbit/s", ""};
    s.app.stations["st1"] = {"st1", 10.0, 0.0};
    s.app.groups["g1"] = {"g1", {"sg1"}};
    s.app.subgroups["sg1"] = {"sg1", "g1", {"sa", "sb"}, {"c1"}};

    ProcessorSlot sa{"sa", "sg1", {}, {"o"}, {}, {}};
    ComponentVariant a1{"a1", "sa", {{"qa", 0.5}}, {{"o", "thr", 0, 1000, 0, 1e9,
                                                     TransferRule::CpuScaling::none}}, 1.0, 1};
    ComponentVariant a2{"a2", "sa", {{"qa", 0.9}}, {{"o", "thr", 0, 600, 0, 1e9,
                                                     TransferRule::CpuScaling::none}}, 1.0, 2};
    sa.variants = {{"a1", a1}, {"a2", a2}};
    s.app.slots["sa"] = sa;

    ProcessorSlot sb{"sb", "sg1", {"i"}, {"out"}, {}, {}};
    for (int i = 0; i < 3; ++i) {
        ComponentVariant v;
        v.id = "b" + std::to_string(i + 1);
        v.slot = "sb";
        const double marks[] = {0.6, 0.8, 0.7};
        v.intrinsic_contribution["qb"] = marks[i];
        v.transfer = {{"out", "thr", 1, 0, 0, 1e9, TransferRule::CpuScaling::none}};
        v.cpu_demand = 1.0;
        v.power_rank = i + 1;
        sb.variants[v.id] = v;
    }
    s.app.slots["sb"] = sb;

    Conduct c1{"c1", "sg1", "sa", "o", "sb", "i", {"thr"}, false};
    s.app.conducts["c1"] = c1;

    s.user.wishes["qa"] = {"qa", {{0.0, 0.0}, {1.0, 1.0}}, 2.0};
    s.user.wishes["qb"] = {"qb", {{0.0, 0.0}, {1.0, 1.0}}, 1.0};
    s.user.wishes["thr"] = {"thr", {{0.0, 0.0}, {1000.0, 1.0}}, 1.0};
    s.user.subgroup_weights = {{"sg1", 1.0}};
    s.user.group_weights = {{"g1", 1.0}};

    s.default_configuration.placement = {{"sa", {"a1", "st1"}}, {"sb", {"b1", "st1"}}};
    s.default_configuration.routes = {{"c1", {}}};
    s.params.horizon_ms = 2000;
    return s;
}

Scenario make_scaling(int n, int v, int st) {
    if (n < 1 || v < 1 || st < 1) throw UnknownName{"scaling with non-positive parameters"};
    Scenario s;
    char buf[64];
    std::snprintf(buf, sizeof buf, "scaling(%d,%d,%d)", n, v, st);
    s.name = buf;

    s.app.characteristics["thr"] = {"thr", CharKind::contextual, "kbit/s", ""};
    s.user.wishes["thr"] = {"thr", {{0.0, 0.0}, {1000.0, 1.0}}, 1.0};

    for (int i = 0; i < st; ++i) {
        std::snprintf(buf, sizeof buf, "st%02d", i + 1);
        s.app.stations[buf] = {buf, 1000.0, 0.0};
    }
    // One direct link per station pair keeps a single route choice.
    for (int i = 0; i < st; ++i) {
        for (int j = i + 1; j < st; ++j) {
            std::snprintf(buf, sizeof buf, "ln%02d%02d", i + 1, j + 1);
            char a[16], b[16];
            std::snprintf(a, sizeof a, "st%02d", i + 1);
            std::snprintf(b, sizeof b, "st%02d", j + 1);
            s.app.links[buf] = {buf, a, b, 10000.0, 1.0};
        }
    }

    Group g{"g1", {}};
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "sg%02d", i + 1);
        const std::string sg_id = buf;
        std::snprintf(buf, sizeof buf, "sl%02d", i + 1);
        const std::string slot_id = buf;
        std::snprintf(buf, sizeof buf, "q%02d", i + 1);
        const std::string char_id = buf;

        s.app.characteristics[char_id] = {char_id, CharKind::intrinsic, "mark", ""};
        s.user.wishes[char_id] = {char_id, {{0.0, 0.0}, {1.0, 1.0}}, 1.0};

        ProcessorSlot slot{slot_id, sg_id, {"i"}, {"o"}, {}, {}};
        if (i == 0) slot.input_ports.clear();
        for (int j = 0; j < v; ++j) {
            ComponentVariant var;
            std::snprintf(buf, sizeof buf, "%s-v%02d", slot_id.c_str(), j + 1);
            var.id = buf;
            var.slot = slot_id;
            var.power_rank = j + 1;
            var.cpu_demand = 1.0;
            var.intrinsic_contribution[char_id] =
                v == 1 ? 0.9 : 0.5 + 0.4 * static_cast<double>(j) / static_cast<double>(v - 1);
            var.transfer = {{"o", "thr", 0, 1000, 0, 1e9, TransferRule::CpuScaling::multiply}};
            slot.variants[var.id] = var;
        }
        s.app.slots[slot_id] = slot;

        SubGroup sg{sg_id, "g1", {slot_id}, {}};
        if (i > 0) {
            std::snprintf(buf, sizeof buf, "cn%02d", i);
            char prev[16];
            std::snprintf(prev, sizeof prev, "sl%02d", i);
            Conduct c{buf, sg_id, prev, "o", slot_id, "i", {"thr"}, false};
            s.app.conducts[c.id] = c;
            sg.conducts.push_back(c.id);
        }
        s.app.subgroups[sg_id] = sg;
        g.subgroups.push_back(sg_id);
        std::snprintf(buf, sizeof buf, "sl%02d", i + 1);
        s.default_configuration.placement[buf] = {s.app.slots[buf].variants.begin()->first,
                                                  "st01"};
        s.user.subgroup_weights[sg_id] = 1.0;
    }
    s.app.groups["g1"] = g;
    s.user.group_weights["g1"] = 1.0;
    for (const auto& [cid, c] : s.app.conducts) {
        (void)c;
        s.default_configuration.routes[cid] = {};
    }

    // A saturation pulse drives one culprit-scoped search.
    s.context_events = {{500, ContextEvent::Kind::set_station_load, "st01", 5000.0, ""},
                        {1500, ContextEvent::Kind::set_station_load, "st01", 0.0, ""}};
    s.params.horizon_ms = 3000;
    return s;
}

} // namespace

Scenario generate_reference_scenario(const std::string& name) {
    if (name == "surveillance135") return make_surveillance135();
    if (name == "toy6") return make_toy6();
    int n = 0, v = 0, st = 0;
    if (std::sscanf(name.c_str(), "scaling(%d,%d,%d)", &n, &v, &st) == 3 ||
        std::sscanf(name.c_str(), "scaling:%d,%d,%d", &n, &v, &st) == 3)
        return make_scaling(n, v, st);
    throw UnknownName{name};
}

} // namespace qosim
