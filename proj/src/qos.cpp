#include "qosim/qos.hpp"

#include <algorithm>
#include <cmath>

#include "qosim/app.hpp"
#include "qosim/errors.hpp"

namespace qosim {

double UserProfile::wish_weight(const std::string& characteristic) const {
    auto it = wishes.find(characteristic);
    return it == wishes.end() ? 0.0 : it->second.weight;
}

double UserProfile::subgroup_weight(const std::string& id) const {
    auto it = subgroup_weights.find(id);
    return it == subgroup_weights.end() ? 1.0 : it->second;
}

double UserProfile::group_weight(const std::string& id) const {
    auto it = group_weights.find(id);
    return it == group_weights.end() ? 1.0 : it->second;
}

double mark_characteristic(double value, const WishFunction& wish) {
    const auto& bp = wish.breakpoints;
    if (value <= bp.front().value) return bp.front().mark;
    if (value >= bp.back().value) return bp.back().mark;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (value <= bp[i].value) {
            const double span = bp[i].value - bp[i - 1].value;
            const double t = (value - bp[i - 1].value) / span;
            return bp[i - 1].mark + t * (bp[i].mark - bp[i - 1].mark);
        }
    }
    return bp.back().mark;
}

double aggregate_criterion(const std::vector<std::pair<double, double>>& mark_weight) {
    if (mark_weight.empty()) return 1.0; // absence of constraint is not a penalty
    double total_weight = 0.0;
    double sum = 0.0;
    for (const auto& [mark, weight] : mark_weight) {
        sum += mark * weight;
        total_weight += weight;
    }
    if (total_weight <= 0.0) throw AllWeightsZero{};
    return sum / total_weight;
}

double entity_qos(const CriterionMarks& cm) {
    return std::min(cm.intrinsic, cm.contextual);
}

bool service_proximity(const CriterionMarks& a, const CriterionMarks& b,
                       double eps_intrinsic, double eps_contextual) {
    return std::abs(a.intrinsic - b.intrinsic) <= eps_intrinsic &&
           std::abs(a.contextual - b.contextual) <= eps_contextual;
}

namespace {

CriterionMarks subgroup_criteria(const Application& app,
                                 const std::map<std::string, double>& marks,
                                 const UserProfile& user) {
    std::vector<std::pair<double, double>> intrinsic, contextual;
    for (const auto& [char_id, mark] : marks) {
        auto it = app.characteristics.find(char_id);
        if (it == app.characteristics.end()) throw UnknownCharacteristic{char_id};
        auto wish = user.wishes.find(char_id);
        if (wish == user.wishes.end()) continue; // the user does not rate it
        auto& side = it->second.kind == CharKind::intrinsic ? intrinsic : contextual;
        side.emplace_back(mark, wish->second.weight);
    }
    return CriterionMarks{aggregate_criterion(intrinsic), aggregate_criterion(contextual)};
}

} // namespace

QoSReport evaluate_hierarchy(const Application& app, const SubgroupMarks& marks,
                             const UserProfile& user) {
    QoSReport report;
    for (const auto& [sg_id, sg_marks] : marks) {
        if (!app.subgroups.contains(sg_id)) throw UnknownEntity{"subgroup", sg_id};
        report.subgroups[sg_id] = subgroup_criteria(app, sg_marks, user);
    }
    // Sub-groups with no marked characteristic still take part in the averages.
    for (const auto& [sg_id, sg] : app.subgroups) {
        (void)sg;
        report.subgroups.try_emplace(sg_id, CriterionMarks{});
    }

    std::vector<std::pair<double, double>> app_intrinsic, app_contextual;
    for (const auto& [group_id, group] : app.groups) {
        std::vector<std::pair<double, double>> gi, gc;
        for (const auto& sg_id : group.subgroups) {
            const auto& cm = report.subgroups.at(sg_id);
            const double w = user.subgroup_weight(sg_id);
            gi.emplace_back(cm.intrinsic, w);
            gc.emplace_back(cm.contextual, w);
        }
        CriterionMarks gm{aggregate_criterion(gi), aggregate_criterion(gc)};
        report.groups[group_id] = gm;
        const double w = user.group_weight(group_id);
        app_intrinsic.emplace_back(gm.intrinsic, w);
        app_contextual.emplace_back(gm.contextual, w);
    }
    report.application = CriterionMarks{aggregate_criterion(app_intrinsic),
                                        aggregate_criterion(app_contextual)};
    report.overall = entity_qos(report.application);
    return report;
}

} // namespace qosim
