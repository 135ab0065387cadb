#include "qosim/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "qosim/errors.hpp"
#include "qosim/eval_kernel.hpp"

namespace qosim {

const char* to_string(SearchStage stage) {
    switch (stage) {
    case SearchStage::culprit_same_family: return "culprit_same_family";
    case SearchStage::whole_family: return "whole_family";
    case SearchStage::adjacent_family: return "adjacent_family";
    case SearchStage::subgroup_redeploy: return "subgroup_redeploy";
    }
    return "?";
}

const char* to_string(PlanAction::Kind kind) {
    switch (kind) {
    case PlanAction::Kind::replace: return "replace";
    case PlanAction::Kind::move: return "move";
    case PlanAction::Kind::reroute: return "reroute";
    case PlanAction::Kind::add: return "add";
    case PlanAction::Kind::remove: return "remove";
    }
    return "?";
}

CriterionMarks predict_qos(const Configuration& cfg, const Application& app,
                           const ContextState& state, const UserProfile& user,
                           const std::vector<SpyAgent>& spies) {
    return evaluate_configuration(cfg, app, state, user, spies).application;
}

std::vector<PlanAction> diff_configurations(const Configuration& from, const Configuration& to,
                                            const Application& app) {
    std::vector<PlanAction> actions;
    for (const auto& [slot, p] : to.placement) {
        auto it = from.placement.find(slot);
        if (it == from.placement.end()) {
            actions.push_back({PlanAction::Kind::add, slot, p.variant, p.station, {}, {}});
            continue;
        }
        if (it->second.variant != p.variant)
            actions.push_back({PlanAction::Kind::replace, slot, p.variant, "", {}, {}});
        if (it->second.station != p.station)
            actions.push_back({PlanAction::Kind::move, slot, "", p.station, {}, {}});
    }
    for (const auto& [slot, p] : from.placement) {
        (void)p;
        if (!to.placement.contains(slot))
            actions.push_back({PlanAction::Kind::remove, slot, "", "", {}, {}});
    }

    // A route change entailed by relocating an endpoint rides along with that
    // move/add; only endpoint-stable changes are standalone reroutes.
    auto carrier_for = [&](const std::string& conduct_id) -> PlanAction* {
        auto c_it = app.conducts.find(conduct_id);
        if (c_it == app.conducts.end()) return nullptr;
        PlanAction* carrier = nullptr;
        for (auto& action : actions) {
            if (action.kind != PlanAction::Kind::move && action.kind != PlanAction::Kind::add)
                continue;
            if (action.target != c_it->second.source_slot &&
                action.target != c_it->second.sink_slot)
                continue;
            if (!carrier || action.target < carrier->target) carrier = &action;
        }
        return carrier;
    };
    for (const auto& [conduct, route] : to.routes) {
        auto it = from.routes.find(conduct);
        if (it != from.routes.end() && it->second == route) continue;
        if (PlanAction* carrier = carrier_for(conduct)) {
            carrier->route_updates[conduct] = route;
        } else {
            actions.push_back({PlanAction::Kind::reroute, conduct, "", "", route, {}});
        }
    }
    return actions;
}

namespace {

using Clock = std::chrono::steady_clock;

struct StagePick {
    Configuration cfg;
    CriterionMarks marks;
    double overall = 0.0;
};

// Evaluates a stage's candidates (deduplicated, capped, scored through the
// batch kernel) and picks the ranked best if it beats the bar.
class StageEvaluator {
  public:
    StageEvaluator(const Configuration& current, const Application& app,
                   const ContextState& state, const UserProfile& user,
                   const std::vector<SpyAgent>& spies, const SearchParams& params,
                   SearchBudget& budget)
        : current_(current), app_(app), state_(state), user_(user), spies_(spies),
          params_(params), budget_(budget) {
        current_canonical_ = current.canonical();
    }

    std::optional<StagePick> run(const std::vector<Configuration>& raw_candidates, double bar) {
        std::vector<Configuration> fresh;
        std::vector<const Configuration*> ordered;
        std::vector<const CandidateScore*> scores;
        std::vector<std::string> canon;
        std::set<std::string> in_stage;

        std::vector<std::size_t> fresh_pos; // index into `ordered` per fresh candidate
        for (const auto& cfg : raw_candidates) {
            if (ordered.size() >= params_.max_stage_candidates) break;
            std::string c = cfg.canonical();
            if (c == current_canonical_) continue;
            if (!in_stage.insert(c).second) continue;
            ordered.push_back(&cfg);
            canon.push_back(c);
            scores.push_back(nullptr);
            if (!cache_.contains(c)) {
                fresh.push_back(cfg);
                fresh_pos.push_back(ordered.size() - 1);
            }
        }
        auto fresh_scores =
            evaluate_candidates(fresh, app_, state_, user_, spies_, params_.parallel);
        budget_.candidates_evaluated += fresh.size();
        for (std::size_t i = 0; i < fresh.size(); ++i)
            cache_[canon[fresh_pos[i]]] = fresh_scores[i];
        for (std::size_t i = 0; i < ordered.size(); ++i) scores[i] = &cache_.at(canon[i]);

        // predicted QoS desc, then fewest actions, then construction order
        std::optional<std::size_t> best;
        std::size_t best_actions = 0;
        for (std::size_t i = 0; i < ordered.size(); ++i) {
            if (scores[i]->overall <= bar) continue;
            const std::size_t n_actions = diff_configurations(current_, *ordered[i], app_).size();
            if (!best) {
                best = i;
                best_actions = n_actions;
                continue;
            }
            const double gap = scores[i]->overall - scores[*best]->overall;
            if (gap > kMarkTolerance ||
                (std::abs(gap) <= kMarkTolerance && n_actions < best_actions)) {
                best = i;
                best_actions = n_actions;
            }
        }
        if (!best) return std::nullopt;
        return StagePick{*ordered[*best], scores[*best]->marks, scores[*best]->overall};
    }

  private:
    const Configuration& current_;
    const Application& app_;
    const ContextState& state_;
    const UserProfile& user_;
    const std::vector<SpyAgent>& spies_;
    const SearchParams& params_;
    SearchBudget& budget_;
    std::string current_canonical_;
    std::map<std::string, CandidateScore> cache_;
};

// Family structure around the running configuration. Small spaces get the
// exact greedy partition; past the enumeration cap families materialize
// lazily from single-change deviations of the current configuration.
struct FamilyView {
    bool exact = false;
    std::vector<Family> families;
    std::size_t current_index = 0;
    std::set<std::string> current_members;
    double current_mark = 1.0;
    std::vector<Configuration> deviations; // lazy mode
};

std::vector<Configuration> all_single_deviations(const Configuration& cfg, const Application& app) {
    std::vector<Configuration> out;
    for (const auto& [slot_id, slot] : app.slots) {
        (void)slot;
        auto neighbors = culprit_neighbors(cfg, slot_id, app);
        out.insert(out.end(), neighbors.begin(), neighbors.end());
    }
    for (const auto& [conduct_id, conduct] : app.conducts) {
        (void)conduct;
        auto neighbors = culprit_neighbors(cfg, conduct_id, app);
        out.insert(out.end(), neighbors.begin(), neighbors.end());
    }
    return out;
}

FamilyView build_family_view(const Configuration& current, const Application& app,
                             const UserProfile& user, const SearchParams& params) {
    FamilyView view;
    view.current_mark = intrinsic_mark_of(current, app, user);
    try {
        auto configs = enumerate_configurations(app, params.exact_enumeration_cap);
        view.families = partition_into_families(configs, app, user, params.eps_intrinsic);
        view.exact = true;
    } catch (const BudgetExceeded&) {
        view.exact = false;
        view.deviations = all_single_deviations(current, app);
        return view;
    }
    const std::string canonical = current.canonical();
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < view.families.size() && !found; ++i) {
        for (const auto& member : view.families[i].members) {
            if (member.canonical() == canonical) {
                found = i;
                break;
            }
        }
    }
    if (!found) {
        // Running configuration outside the enumerated space (hand-written
        // routes): adopt the family with the nearest index mark.
        std::size_t best = 0;
        for (std::size_t i = 1; i < view.families.size(); ++i) {
            if (std::abs(view.families[i].intrinsic_mark - view.current_mark) <
                std::abs(view.families[best].intrinsic_mark - view.current_mark))
                best = i;
        }
        found = best;
    }
    view.current_index = *found;
    for (const auto& member : view.families[*found].members)
        view.current_members.insert(member.canonical());
    return view;
}

bool in_current_family(const FamilyView& view, const Configuration& cfg, const Application& app,
                       const UserProfile& user, double eps) {
    if (view.exact) return view.current_members.contains(cfg.canonical());
    return std::abs(intrinsic_mark_of(cfg, app, user) - view.current_mark) <= eps;
}

// Adjacent families ordered by ascending intrinsic distance, capped at k per
// direction; ties prefer the better service.
std::vector<std::vector<Configuration>> adjacent_family_members(const FamilyView& view,
                                                                const Application& app,
                                                                const UserProfile& user,
                                                                const SearchParams& params) {
    struct Adjacent {
        double mark;
        double distance;
        std::vector<const Configuration*> members;
    };
    std::vector<Adjacent> adjacent;
    if (view.exact) {
        for (std::size_t i = 0; i < view.families.size(); ++i) {
            if (i == view.current_index) continue;
            Adjacent a{view.families[i].intrinsic_mark,
                       std::abs(view.families[i].intrinsic_mark -
                                view.families[view.current_index].intrinsic_mark),
                       {}};
            for (const auto& m : view.families[i].members) a.members.push_back(&m);
            adjacent.push_back(std::move(a));
        }
    } else {
        std::map<double, std::vector<const Configuration*>> by_mark;
        for (const auto& cfg : view.deviations) {
            const double mark = intrinsic_mark_of(cfg, app, user);
            if (std::abs(mark - view.current_mark) <= params.eps_intrinsic) continue;
            by_mark[mark].push_back(&cfg);
        }
        for (auto& [mark, members] : by_mark)
            adjacent.push_back({mark, std::abs(mark - view.current_mark), std::move(members)});
    }
    std::stable_sort(adjacent.begin(), adjacent.end(), [](const Adjacent& a, const Adjacent& b) {
        if (std::abs(a.distance - b.distance) > kMarkTolerance) return a.distance < b.distance;
        return a.mark > b.mark;
    });
    const double current_mark =
        view.exact ? view.families[view.current_index].intrinsic_mark : view.current_mark;
    int above = 0, below = 0;
    std::vector<std::vector<Configuration>> out;
    for (const auto& a : adjacent) {
        int& used = a.mark > current_mark ? above : below;
        if (used >= params.adjacent_family_k) continue;
        ++used;
        std::vector<Configuration> members;
        members.reserve(a.members.size());
        for (const auto* m : a.members) members.push_back(*m);
        out.push_back(std::move(members));
    }
    return out;
}

// Every re-choice of the culprit Sub-Group's slots (and the routes touching
// them), everything else fixed.
std::vector<Configuration> subgroup_redeployments(const Configuration& current,
                                                  const std::string& subgroup_id,
                                                  const Application& app, std::uint64_t cap) {
    const auto& subgroup = app.subgroups.at(subgroup_id);
    std::vector<std::string> sg_slots = subgroup.slots;
    std::sort(sg_slots.begin(), sg_slots.end());
    if (sg_slots.empty()) return {};

    std::vector<std::vector<Placement>> options;
    for (const auto& slot_id : sg_slots) {
        const auto& slot = app.slot(slot_id);
        std::vector<Placement> opts;
        for (const auto& [variant_id, variant] : slot.variants) {
            (void)variant;
            for (const auto& station : app.stations_for(slot))
                opts.push_back({variant_id, station});
        }
        options.push_back(std::move(opts));
    }

    std::set<std::string> sg_slot_set(sg_slots.begin(), sg_slots.end());
    std::vector<std::string> affected_conducts;
    for (const auto& [cid, conduct] : app.conducts) {
        if (sg_slot_set.contains(conduct.source_slot) || sg_slot_set.contains(conduct.sink_slot))
            affected_conducts.push_back(cid);
    }

    std::vector<Configuration> out;
    std::vector<std::size_t> idx(sg_slots.size(), 0);
    for (;;) {
        Configuration base = current;
        for (std::size_t i = 0; i < sg_slots.size(); ++i)
            base.placement[sg_slots[i]] = options[i][idx[i]];

        // Route odometer over the affected conducts.
        std::vector<std::vector<std::vector<std::string>>> route_opts;
        bool feasible = true;
        for (const auto& cid : affected_conducts) {
            const auto& conduct = app.conduct(cid);
            auto opts = app.route_options(base.placement.at(conduct.source_slot).station,
                                          base.placement.at(conduct.sink_slot).station);
            if (opts.empty()) {
                feasible = false;
                break;
            }
            route_opts.push_back(std::move(opts));
        }
        if (feasible) {
            std::vector<std::size_t> ridx(affected_conducts.size(), 0);
            for (;;) {
                Configuration candidate = base;
                for (std::size_t i = 0; i < affected_conducts.size(); ++i)
                    candidate.routes[affected_conducts[i]] = route_opts[i][ridx[i]];
                out.push_back(std::move(candidate));
                if (out.size() >= cap) return out;
                std::size_t j = ridx.size();
                while (j-- > 0) {
                    if (++ridx[j] < route_opts[j].size()) break;
                    ridx[j] = 0;
                    if (j == 0) goto routes_done;
                }
                if (ridx.empty()) break;
            }
        routes_done:;
        }

        std::size_t k = idx.size();
        while (k-- > 0) {
            if (++idx[k] < options[k].size()) break;
            idx[k] = 0;
            if (k == 0) return out;
        }
    }
}

} // namespace

std::optional<ReconfigurationPlan> search_better_configuration(
    const Configuration& current, const ReconfigurationEvent& ev, const Application& app,
    const ContextState& state, const UserProfile& user, const std::vector<SpyAgent>& spies,
    const SearchParams& params, SearchBudget* budget) {
    SearchBudget local;
    SearchBudget& bud = budget ? *budget : local;
    const auto started = Clock::now();

    const CriterionMarks current_marks = predict_qos(current, app, state, user, spies);
    const double bar = entity_qos(current_marks) + params.delta;

    StageEvaluator evaluator(current, app, state, user, spies, params, bud);
    FamilyView view = build_family_view(current, app, user, params);

    auto finish = [&](SearchStage stage, const StagePick& pick) {
        bud.stage_reached = stage;
        bud.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
        ReconfigurationPlan plan;
        plan.target = pick.cfg;
        plan.actions = diff_configurations(current, pick.cfg, app);
        plan.predicted = pick.marks;
        plan.predicted_overall = pick.overall;
        plan.stage = stage;
        plan.base_config_id = current.id();
        return plan;
    };

    // Stage 1: the culprit's own alternatives, inside the family.
    bud.stage_reached = SearchStage::culprit_same_family;
    std::vector<Configuration> stage1;
    for (auto& neighbor : culprit_neighbors(current, ev.culprit, app)) {
        if (in_current_family(view, neighbor, app, user, params.eps_intrinsic))
            stage1.push_back(std::move(neighbor));
    }
    if (auto pick = evaluator.run(stage1, bar))
        return finish(SearchStage::culprit_same_family, *pick);

    // Stage 2: the whole current family.
    bud.stage_reached = SearchStage::whole_family;
    std::vector<Configuration> stage2;
    if (view.exact) {
        stage2 = view.families[view.current_index].members;
    } else {
        for (const auto& cfg : view.deviations) {
            if (in_current_family(view, cfg, app, user, params.eps_intrinsic))
                stage2.push_back(cfg);
        }
    }
    if (auto pick = evaluator.run(stage2, bar)) return finish(SearchStage::whole_family, *pick);

    // Stage 3: nearby families, nearest service first.
    bud.stage_reached = SearchStage::adjacent_family;
    std::vector<Configuration> stage3;
    for (auto& family : adjacent_family_members(view, app, user, params))
        for (auto& cfg : family) stage3.push_back(std::move(cfg));
    if (auto pick = evaluator.run(stage3, bar)) return finish(SearchStage::adjacent_family, *pick);

    // Stage 4: redeploy the culprit's Sub-Group.
    bud.stage_reached = SearchStage::subgroup_redeploy;
    std::string subgroup_id;
    if (auto slot_it = app.slots.find(ev.culprit); slot_it != app.slots.end())
        subgroup_id = slot_it->second.subgroup;
    else if (auto c_it = app.conducts.find(ev.culprit); c_it != app.conducts.end())
        subgroup_id = c_it->second.subgroup;
    else
        throw UnknownCulprit{ev.culprit};
    auto stage4 = subgroup_redeployments(current, subgroup_id, app, params.max_stage_candidates);
    if (auto pick = evaluator.run(stage4, bar)) return finish(SearchStage::subgroup_redeploy, *pick);

    bud.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    return std::nullopt;
}

std::pair<Configuration, CriterionMarks> brute_force_best(const Application& app,
                                                          const ContextState& state,
                                                          const UserProfile& user,
                                                          const std::vector<SpyAgent>& spies,
                                                          const SearchParams& params,
                                                          SearchBudget* budget) {
    SearchBudget local;
    SearchBudget& bud = budget ? *budget : local;
    const auto started = Clock::now();

    ConfigurationEnumerator en(app);
    std::optional<Configuration> best;
    CandidateScore best_score;

    constexpr std::size_t kChunk = 512;
    std::vector<Configuration> chunk;
    bool done = false;
    while (!done) {
        chunk.clear();
        while (chunk.size() < kChunk) {
            auto cfg = en.next();
            if (!cfg) {
                done = true;
                break;
            }
            chunk.push_back(std::move(*cfg));
        }
        if (bud.candidates_evaluated + chunk.size() > params.brute_force_cap)
            throw BudgetExceeded{params.brute_force_cap};
        auto scores = evaluate_candidates(chunk, app, state, user, spies, params.parallel);
        bud.candidates_evaluated += chunk.size();
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            if (!best || scores[i].overall > best_score.overall + kMarkTolerance) {
                best = chunk[i];
                best_score = scores[i];
            }
        }
    }
    bud.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    if (!best) throw EmptySpace{"no valid configuration"};
    return {*best, best_score.marks};
}

} // namespace qosim
