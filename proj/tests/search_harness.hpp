#pragma once

// Drives search -> apply -> re-detect cycles under a static context until no
// event-scoped search succeeds, the iterative-improvement loop the runtime
// performs one event at a time.

#include <string>
#include <vector>

#include "qosim/search.hpp"

namespace harness {

struct QuiescenceResult {
    qosim::Configuration final_config;
    double final_overall = 0.0;
    int reconfigurations = 0;
    std::uint64_t candidates_evaluated = 0;
};

inline qosim::ReconfigurationEvent synthetic_event(std::uint64_t id, const std::string& culprit,
                                                   bool is_conduct) {
    qosim::ReconfigurationEvent ev;
    ev.id = id;
    ev.kind = qosim::EventKind::improvement;
    ev.culprit = culprit;
    ev.culprit_is_conduct = is_conduct;
    return ev;
}

inline QuiescenceResult iterate_to_quiescence(const qosim::Configuration& initial,
                                              const qosim::Application& app,
                                              const qosim::ContextState& state,
                                              const qosim::UserProfile& user,
                                              const std::vector<qosim::SpyAgent>& spies,
                                              const qosim::SearchParams& params,
                                              int max_rounds = 200) {
    QuiescenceResult r;
    r.final_config = initial;
    std::vector<std::pair<std::string, bool>> culprits;
    for (const auto& [id, slot] : app.slots) {
        (void)slot;
        culprits.emplace_back(id, false);
    }
    for (const auto& [id, conduct] : app.conducts) {
        (void)conduct;
        culprits.emplace_back(id, true);
    }

    std::uint64_t next_id = 1;
    while (r.reconfigurations < max_rounds) {
        bool improved = false;
        for (const auto& [culprit, is_conduct] : culprits) {
            qosim::SearchBudget budget;
            auto plan = qosim::search_better_configuration(
                r.final_config, synthetic_event(next_id++, culprit, is_conduct), app, state, user,
                spies, params, &budget);
            r.candidates_evaluated += budget.candidates_evaluated;
            if (plan) {
                r.final_config = plan->target;
                ++r.reconfigurations;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    r.final_overall =
        qosim::entity_qos(qosim::predict_qos(r.final_config, app, state, user, spies));
    return r;
}

} // namespace harness
