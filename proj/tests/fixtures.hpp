#pragma once

// Shared fixture builders for the test suites.

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qosim/app.hpp"
#include "qosim/context.hpp"
#include "qosim/qos.hpp"

namespace fixtures {

// Random weighted hierarchy plus per-characteristic marks, for checking the
// roll-up against the oracle expansion.
struct HierarchyFixture {
    qosim::Application app;
    qosim::SubgroupMarks marks;
    qosim::UserProfile user;
};

inline HierarchyFixture random_hierarchy(std::mt19937& rng) {
    HierarchyFixture f;
    std::uniform_int_distribution<int> group_count(1, 3), subgroup_count(1, 3), char_count(1, 4);
    std::uniform_real_distribution<double> mark(0.0, 1.0), weight(0.1, 3.0);
    std::bernoulli_distribution intrinsic(0.5);

    int char_seq = 0;
    char buf[32];
    const int groups = group_count(rng);
    for (int gi = 0; gi < groups; ++gi) {
        std::snprintf(buf, sizeof buf, "g%02d", gi);
        qosim::Group group{buf, {}};
        const int subgroups = subgroup_count(rng);
        for (int si = 0; si < subgroups; ++si) {
            std::snprintf(buf, sizeof buf, "sg%02d-%02d", gi, si);
            const std::string sg_id = buf;
            group.subgroups.push_back(sg_id);
            f.app.subgroups[sg_id] = {sg_id, group.id, {}, {}};
            f.user.subgroup_weights[sg_id] = weight(rng);
            const int chars = char_count(rng);
            for (int ci = 0; ci < chars; ++ci) {
                std::snprintf(buf, sizeof buf, "ch%03d", char_seq++);
                const std::string char_id = buf;
                f.app.characteristics[char_id] = {
                    char_id,
                    intrinsic(rng) ? qosim::CharKind::intrinsic : qosim::CharKind::contextual,
                    "mark",
                    ""};
                f.user.wishes[char_id] =
                    qosim::WishFunction{char_id, {{0.0, 0.0}, {1.0, 1.0}}, weight(rng)};
                f.marks[sg_id][char_id] = mark(rng);
            }
        }
        f.app.groups[group.id] = group;
        f.user.group_weights[group.id] = weight(rng);
    }
    return f;
}

// Random component application with a chain topology, sized to stay under
// `max_configs` valid configurations. Exercises families, placement effects
// (cpu contention) and bandwidth caps.
struct AppFixture {
    qosim::Application app;
    qosim::UserProfile user;
    qosim::Configuration initial;
};

inline AppFixture random_app(std::mt19937& rng, std::uint64_t max_configs = 1000) {
    std::uniform_int_distribution<int> slot_count(2, 4), variant_count(2, 4), station_count(1, 3),
        subgroup_count(1, 2);
    std::uniform_real_distribution<double> mark(0.3, 1.0), demand(0.5, 3.0), capacity(4.0, 12.0),
        load(0.0, 3.0), ratio(0.5, 1.0), weight(0.5, 2.0);

    for (;;) {
        AppFixture f;
        char buf[32];
        const int stations = station_count(rng);
        const int slots = slot_count(rng);
        const int subgroups = std::min(subgroup_count(rng), slots);

        std::uint64_t space = 1;
        std::vector<int> variants_per_slot;
        bool feasible = true;
        for (int i = 0; i < slots; ++i) {
            const int v = variant_count(rng);
            variants_per_slot.push_back(v);
            space *= static_cast<std::uint64_t>(v) * stations;
            if (space > max_configs) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;

        for (int i = 0; i < stations; ++i) {
            std::snprintf(buf, sizeof buf, "st%02d", i);
            const double cap = capacity(rng);
            f.app.stations[buf] = {buf, cap, std::min(cap, load(rng))};
        }
        for (int i = 0; i < stations; ++i) {
            for (int j = i + 1; j < stations; ++j) {
                std::snprintf(buf, sizeof buf, "ln%02d%02d", i, j);
                char a[16], b[16];
                std::snprintf(a, sizeof a, "st%02d", i);
                std::snprintf(b, sizeof b, "st%02d", j);
                std::uniform_real_distribution<double> bw(400.0, 2000.0);
                f.app.links[buf] = {buf, a, b, bw(rng), 5.0};
            }
        }

        f.app.characteristics["thr"] = {"thr", qosim::CharKind::contextual, "kbit/s", ""};
        f.user.wishes["thr"] = {"thr", {{0.0, 0.0}, {1000.0, 1.0}}, weight(rng)};

        qosim::Group group{"g0", {}};
        for (int s = 0; s < subgroups; ++s) {
            std::snprintf(buf, sizeof buf, "sg%02d", s);
            f.app.subgroups[buf] = {buf, "g0", {}, {}};
            group.subgroups.push_back(buf);
            f.user.subgroup_weights[buf] = weight(rng);
        }
        f.app.groups["g0"] = group;
        f.user.group_weights["g0"] = 1.0;

        for (int i = 0; i < slots; ++i) {
            std::snprintf(buf, sizeof buf, "sl%02d", i);
            const std::string slot_id = buf;
            std::snprintf(buf, sizeof buf, "sg%02d", i % subgroups);
            const std::string sg_id = buf;
            std::snprintf(buf, sizeof buf, "q%02d", i);
            const std::string char_id = buf;
            f.app.characteristics[char_id] = {char_id, qosim::CharKind::intrinsic, "mark", ""};
            f.user.wishes[char_id] = {char_id, {{0.0, 0.0}, {1.0, 1.0}}, weight(rng)};

            qosim::ProcessorSlot slot{slot_id, sg_id, {"i"}, {"o"}, {}, {}};
            if (i == 0) slot.input_ports.clear();
            for (int v = 0; v < variants_per_slot[i]; ++v) {
                qosim::ComponentVariant var;
                std::snprintf(buf, sizeof buf, "%s-v%02d", slot_id.c_str(), v);
                var.id = buf;
                var.slot = slot_id;
                var.power_rank = v;
                var.cpu_demand = demand(rng);
                var.intrinsic_contribution[char_id] = mark(rng);
                const auto scaling = qosim::TransferRule::CpuScaling::multiply;
                if (i == 0)
                    var.transfer = {{"o", "thr", 0.0, 800.0 + 400.0 * ratio(rng), 0, 1e9, scaling}};
                else
                    var.transfer = {{"o", "thr", ratio(rng), 0.0, 0, 1e9, scaling}};
                slot.variants[var.id] = var;
            }
            f.app.slots[slot_id] = slot;
            f.app.subgroups[sg_id].slots.push_back(slot_id);

            if (i > 0) {
                std::snprintf(buf, sizeof buf, "cn%02d", i);
                char prev[16];
                std::snprintf(prev, sizeof prev, "sl%02d", i - 1);
                qosim::Conduct c{buf, sg_id, prev, "o", slot_id, "i", {"thr"}, false};
                f.app.conducts[c.id] = c;
                f.app.subgroups[sg_id].conducts.push_back(c.id);
            }
        }

        // First valid configuration as the starting point.
        qosim::ConfigurationEnumerator en(f.app);
        auto first = en.next();
        if (!first) continue;
        f.initial = *first;
        return f;
    }
}

} // namespace fixtures
