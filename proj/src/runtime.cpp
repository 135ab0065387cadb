#include "qosim/runtime.hpp"

#include <algorithm>
#include <set>

#include "qosim/errors.hpp"

namespace qosim {

Configuration apply_reconfiguration(const ReconfigurationOrder& order,
                                    const Configuration& running) {
    if (order.plan.base_config_id != running.id()) throw StalePlan{};
    // Replay the actions; they must reproduce the target exactly.
    Configuration next = running;
    for (const auto& action : order.plan.actions) {
        switch (action.kind) {
        case PlanAction::Kind::replace: next.placement.at(action.target).variant = action.new_variant; break;
        case PlanAction::Kind::move: next.placement.at(action.target).station = action.new_station; break;
        case PlanAction::Kind::reroute: next.routes[action.target] = action.new_route; break;
        case PlanAction::Kind::add:
            next.placement[action.target] = {action.new_variant, action.new_station};
            break;
        case PlanAction::Kind::remove: next.placement.erase(action.target); break;
        }
        for (const auto& [conduct, route] : action.route_updates) next.routes[conduct] = route;
    }
    if (next != order.plan.target)
        throw ModelError{"plan actions do not reproduce the plan target"};
    return next;
}

Simulation::Simulation(const Application& app, const UserProfile& user,
                       std::vector<SpyAgent> spies, Configuration default_configuration,
                       std::vector<ContextEvent> context_events,
                       std::map<std::string, std::string> initial_environment,
                       RuntimeParams params)
    : app_(app), user_(user), spies_(std::move(spies)),
      running_(std::move(default_configuration)), script_(std::move(context_events)),
      params_(params), state_(ContextState::initial(app)) {
    state_.environment = std::move(initial_environment);
    std::stable_sort(script_.begin(), script_.end(),
                     [](const ContextEvent& a, const ContextEvent& b) { return a.at_ms < b.at_ms; });
    prev_state_ = state_;
}

void Simulation::deploy_initial() {
    auto violations = validate_configuration(running_, app_);
    if (!violations.empty()) throw InvalidDefaultConfiguration{violations.front()};

    std::set<std::string> used;
    for (const auto& [slot, p] : running_.placement) {
        (void)slot;
        used.insert(p.station);
    }
    platforms_.clear();
    for (const auto& station : used) {
        LocalPlatform lp{station, {}};
        for (const char* role : kManagerRoles) lp.managers.emplace_back(role);
        platforms_.push_back(std::move(lp));
    }
    deployed_ = true;
}

nlohmann::json Simulation::action_json(const std::vector<PlanAction>& actions) const {
    auto out = nlohmann::json::array();
    for (const auto& action : actions) {
        nlohmann::json a{{"kind", to_string(action.kind)}, {"target", action.target}};
        if (!action.new_variant.empty()) a["variant"] = action.new_variant;
        if (!action.new_station.empty()) a["station"] = action.new_station;
        if (action.kind == PlanAction::Kind::reroute) a["route"] = action.new_route;
        if (!action.route_updates.empty()) a["route_updates"] = action.route_updates;
        out.push_back(std::move(a));
    }
    return out;
}

void Simulation::tick(std::int64_t now) {
    // 1. Context events due at this tick.
    bool context_changed = false;
    while (next_script_ < script_.size() && script_[next_script_].at_ms <= now) {
        const auto& ev = script_[next_script_];
        state_ = apply_context_event(state_, ev, app_);
        context_changed = true;
        nlohmann::json payload{{"scheduled_at", ev.at_ms},
                               {"target", ev.target},
                               {"overall", prev_report_ ? prev_report_->overall : 1.0}};
        switch (ev.kind) {
        case ContextEvent::Kind::set_bandwidth: payload["action"] = "set_bandwidth"; payload["value"] = ev.value; break;
        case ContextEvent::Kind::set_latency: payload["action"] = "set_latency"; payload["value"] = ev.value; break;
        case ContextEvent::Kind::set_station_load: payload["action"] = "set_station_load"; payload["value"] = ev.value; break;
        case ContextEvent::Kind::set_environment: payload["action"] = "set_environment"; payload["value"] = ev.text; break;
        }
        trace_.append(now, TraceKind::context_event, std::move(payload));
        ++next_script_;
    }
    state_.time_ms = now;
    if (context_changed) queue_.rearm_deferred(); // a changed context may unlock failed searches

    // 2. Commit a due reconfiguration order; the old configuration ran until now.
    if (in_flight_ && in_flight_->completes_at <= now) {
        running_ = apply_reconfiguration(*in_flight_, running_);
        trace_.append(now, TraceKind::order_completed,
                      {{"issued_at", in_flight_->issued_at},
                       {"completes_at", in_flight_->completes_at},
                       {"config", running_.id()},
                       {"actions", action_json(in_flight_->plan.actions)},
                       {"overall", in_flight_->plan.predicted_overall}});
        in_flight_.reset();
    }

    // 3. Sample QoS of the running configuration.
    QoSReport report = evaluate_configuration(running_, app_, state_, user_, spies_);
    trace_.append(now, TraceKind::qos_sample,
                  {{"overall", report.overall},
                   {"intrinsic", report.application.intrinsic},
                   {"contextual", report.application.contextual},
                   {"config", running_.id()},
                   {"in_flight", in_flight_.has_value()}});

    // 4. Detect reconfiguration events against the previous sample.
    if (prev_report_) {
        auto events = detect_reconfiguration_events(app_, running_, *prev_report_, report,
                                                    prev_state_, state_, spies_,
                                                    params_.event_threshold, next_event_id_);
        for (auto& ev : events) {
            next_event_id_ = std::max(next_event_id_, ev.id + 1);
            trace_.append(now, TraceKind::event_enqueued,
                          {{"event", ev.id},
                           {"event_kind", ev.kind == EventKind::degradation ? "degradation"
                                          : ev.kind == EventKind::improvement ? "improvement"
                                                                              : "spy"},
                           {"culprit", ev.culprit},
                           {"mark_delta", ev.mark_delta},
                           {"overall", report.overall}});
            queue_.enqueue(std::move(ev), user_);
        }
    }

    // 5. Treat events while idle: the chosen event either yields one order or
    //    is deferred, and then the next one is studied.
    while (!in_flight_) {
        auto selected = queue_.select_next();
        if (!selected) break;
        trace_.append(now, TraceKind::event_selected,
                      {{"event", selected->id},
                       {"culprit", selected->culprit},
                       {"priority", selected->priority},
                       {"overall", report.overall}});

        std::optional<ReconfigurationPlan> plan;
        SearchBudget budget;
        if (params_.policy == Policy::heuristic) {
            plan = search_better_configuration(running_, *selected, app_, state_, user_, spies_,
                                               params_.search, &budget);
        } else {
            // The baseline always deploys the exhaustive optimum, ties and
            // all; it has no hysteresis and no proximity preference.
            auto [best, marks] = brute_force_best(app_, state_, user_, spies_, params_.search,
                                                  &budget);
            if (!(best == running_)) {
                ReconfigurationPlan p;
                p.target = std::move(best);
                p.actions = diff_configurations(running_, p.target, app_);
                p.predicted = marks;
                p.predicted_overall = entity_qos(marks);
                p.stage = SearchStage::subgroup_redeploy; // closest tag for the global policy
                p.base_config_id = running_.id();
                plan = std::move(p);
            }
        }

        const std::int64_t completes =
            now + params_.action_latency_ms * static_cast<std::int64_t>(plan ? plan->actions.size() : 0);
        const bool fits_horizon = !plan || completes <= params_.horizon_ms;

        nlohmann::json result{{"event", selected->id},
                              {"found", plan.has_value() && fits_horizon},
                              {"stage_reached", to_string(budget.stage_reached)},
                              {"candidates_evaluated", budget.candidates_evaluated},
                              {"overall", report.overall}};
        if (plan) {
            result["predicted"] = plan->predicted_overall;
            result["stage"] = to_string(plan->stage);
            result["target"] = plan->target.id();
        }
        result["disposition"] = plan && fits_horizon ? "consumed"
                                : plan               ? "deferred_horizon"
                                                     : "deferred";
        trace_.append(now, TraceKind::search_result, std::move(result));

        if (plan && fits_horizon) {
            queue_.consume(selected->id);
            in_flight_ = ReconfigurationOrder{std::move(*plan), now, completes};
            trace_.append(now, TraceKind::order_issued,
                          {{"issued_at", now},
                           {"completes_at", completes},
                           {"target", in_flight_->plan.target.id()},
                           {"actions", action_json(in_flight_->plan.actions)},
                           {"predicted", in_flight_->plan.predicted_overall},
                           {"overall", report.overall}});
        } else {
            queue_.defer(selected->id);
        }
    }

    prev_report_ = std::move(report);
    prev_state_ = state_;
}

const Trace& Simulation::run() {
    if (!deployed_) deploy_initial();
    for (std::int64_t now = 0; now <= params_.horizon_ms; now += params_.dt_ms) tick(now);
    return trace_;
}

Trace run_simulation_loop(const Application& app, const UserProfile& user,
                          std::vector<SpyAgent> spies, Configuration default_configuration,
                          std::vector<ContextEvent> context_events,
                          std::map<std::string, std::string> initial_environment,
                          const RuntimeParams& params) {
    Simulation sim(app, user, std::move(spies), std::move(default_configuration),
                   std::move(context_events), std::move(initial_environment), params);
    return sim.run();
}

} // namespace qosim
