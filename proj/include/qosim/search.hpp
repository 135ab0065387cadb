#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qosim/app.hpp"
#include "qosim/context.hpp"
#include "qosim/events.hpp"
#include "qosim/qos.hpp"

namespace qosim {

enum class SearchStage { culprit_same_family, whole_family, adjacent_family, subgroup_redeploy };

const char* to_string(SearchStage stage);

struct PlanAction {
    enum class Kind { replace, move, reroute, add, remove };
    Kind kind = Kind::replace;
    std::string target; // slot or conduct id
    std::string new_variant;
    std::string new_station;
    std::vector<std::string> new_route;
    // Route re-bindings entailed by moving/adding this slot; they are part of
    // the action, not separate ones.
    std::map<std::string, std::vector<std::string>> route_updates;
};

const char* to_string(PlanAction::Kind kind);

struct ReconfigurationPlan {
    Configuration target;
    std::vector<PlanAction> actions;
    CriterionMarks predicted;
    double predicted_overall = 0.0;
    SearchStage stage = SearchStage::culprit_same_family;
    std::string base_config_id; // the configuration the plan was built against
};

struct SearchParams {
    double eps_intrinsic = 0.05;
    double eps_contextual = 0.05;
    double delta = 0.01; // hysteresis: reconfigure only for improvement beyond it
    int adjacent_family_k = 2;
    std::uint64_t exact_enumeration_cap = 10000; // exact families below, lazy above
    std::uint64_t max_stage_candidates = 200000;
    std::uint64_t brute_force_cap = 1000000;
    bool parallel = true;
};

struct SearchBudget {
    std::uint64_t candidates_evaluated = 0;
    SearchStage stage_reached = SearchStage::culprit_same_family;
    double wall_ms = 0.0;
};

// Non-mutating QoS prediction of a configuration under the given context.
CriterionMarks predict_qos(const Configuration& cfg, const Application& app,
                           const ContextState& state, const UserProfile& user,
                           const std::vector<SpyAgent>& spies);

// Actions turning `from` into `to`, ordered by slot then conduct id.
std::vector<PlanAction> diff_configurations(const Configuration& from, const Configuration& to,
                                            const Application& app);

// Staged family search. Stage 1 tries the culprit's alternatives inside the
// current family, stage 2 the whole family, stage 3 the k nearest families
// per direction by intrinsic distance, stage 4 redeploys the culprit's
// Sub-Group. The first stage holding a strict improvement beyond delta wins;
// within a stage candidates rank by predicted QoS, then fewest actions, then
// construction order. Returns nullopt when every stage fails.
std::optional<ReconfigurationPlan> search_better_configuration(
    const Configuration& current, const ReconfigurationEvent& ev, const Application& app,
    const ContextState& state, const UserProfile& user, const std::vector<SpyAgent>& spies,
    const SearchParams& params, SearchBudget* budget = nullptr);

// Exhaustive oracle: best configuration of the whole space by predicted
// overall QoS, ties resolved by enumeration order.
std::pair<Configuration, CriterionMarks> brute_force_best(const Application& app,
                                                          const ContextState& state,
                                                          const UserProfile& user,
                                                          const std::vector<SpyAgent>& spies,
                                                          const SearchParams& params,
                                                          SearchBudget* budget = nullptr);

} // namespace qosim
