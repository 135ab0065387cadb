#pragma once

// Test-only reference computations. Everything here is a direct expansion of
// the definitions, deliberately independent of the library's evaluation path.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "qosim/app.hpp"
#include "qosim/qos.hpp"

namespace oracle {

struct HierarchyResult {
    double app_intrinsic = 1.0;
    double app_contextual = 1.0;
    double overall = 1.0;
};

// Weighted-tree expansion by nested loops over the raw structures.
inline HierarchyResult expand_hierarchy(const qosim::Application& app,
                                        const qosim::SubgroupMarks& marks,
                                        const qosim::UserProfile& user) {
    std::map<std::string, std::pair<double, double>> subgroup_cm;
    for (const auto& [sg_id, sg] : app.subgroups) {
        (void)sg;
        double wi = 0, si = 0, wc = 0, sc = 0;
        auto it = marks.find(sg_id);
        if (it != marks.end()) {
            for (const auto& [char_id, mark] : it->second) {
                auto wish = user.wishes.find(char_id);
                if (wish == user.wishes.end()) continue;
                const double w = wish->second.weight;
                if (app.characteristics.at(char_id).kind == qosim::CharKind::intrinsic) {
                    si += w * mark;
                    wi += w;
                } else {
                    sc += w * mark;
                    wc += w;
                }
            }
        }
        subgroup_cm[sg_id] = {wi > 0 ? si / wi : 1.0, wc > 0 ? sc / wc : 1.0};
    }
    std::map<std::string, std::pair<double, double>> group_cm;
    for (const auto& [g_id, group] : app.groups) {
        double wi = 0, si = 0, wc = 0, sc = 0;
        for (const auto& sg_id : group.subgroups) {
            auto w_it = user.subgroup_weights.find(sg_id);
            const double w = w_it == user.subgroup_weights.end() ? 1.0 : w_it->second;
            si += w * subgroup_cm.at(sg_id).first;
            sc += w * subgroup_cm.at(sg_id).second;
            wi += w;
            wc += w;
        }
        group_cm[g_id] = {wi > 0 ? si / wi : 1.0, wc > 0 ? sc / wc : 1.0};
    }
    double wi = 0, si = 0, wc = 0, sc = 0;
    for (const auto& [g_id, cm] : group_cm) {
        auto w_it = user.group_weights.find(g_id);
        const double w = w_it == user.group_weights.end() ? 1.0 : w_it->second;
        si += w * cm.first;
        sc += w * cm.second;
        wi += w;
        wc += w;
    }
    HierarchyResult r;
    r.app_intrinsic = wi > 0 ? si / wi : 1.0;
    r.app_contextual = wc > 0 ? sc / wc : 1.0;
    r.overall = r.app_intrinsic < r.app_contextual ? r.app_intrinsic : r.app_contextual;
    return r;
}

// Intrinsic mark of a configuration by direct expansion: worst contribution
// per (subgroup, characteristic), then the weighted tree.
inline double expand_intrinsic(const qosim::Configuration& cfg, const qosim::Application& app,
                               const qosim::UserProfile& user) {
    qosim::SubgroupMarks marks;
    for (const auto& [slot_id, p] : cfg.placement) {
        const auto& slot = app.slots.at(slot_id);
        const auto& variant = slot.variants.at(p.variant);
        for (const auto& [char_id, mark] : variant.intrinsic_contribution) {
            auto& cell = marks[slot.subgroup];
            auto it = cell.find(char_id);
            if (it == cell.end()) cell[char_id] = mark;
            else if (mark < it->second) it->second = mark;
        }
    }
    return expand_hierarchy(app, marks, user).app_intrinsic;
}

} // namespace oracle
