#include "qosim/app.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "qosim/errors.hpp"

namespace qosim {

namespace {

template <typename Map>
const typename Map::mapped_type& find_or_throw(const Map& m, const std::string& id,
                                               const char* kind) {
    auto it = m.find(id);
    if (it == m.end()) throw UnknownEntity{kind, id};
    return it->second;
}

} // namespace

const ProcessorSlot& Application::slot(const std::string& id) const {
    return find_or_throw(slots, id, "slot");
}
const Conduct& Application::conduct(const std::string& id) const {
    return find_or_throw(conducts, id, "conduct");
}
const Station& Application::station(const std::string& id) const {
    return find_or_throw(stations, id, "station");
}
const Link& Application::link(const std::string& id) const {
    return find_or_throw(links, id, "link");
}
const Characteristic& Application::characteristic(const std::string& id) const {
    return find_or_throw(characteristics, id, "characteristic");
}

std::vector<std::string> Application::stations_for(const ProcessorSlot& slot) const {
    if (slot.admissible_stations.empty()) {
        std::vector<std::string> all;
        all.reserve(stations.size());
        for (const auto& [id, st] : stations) {
            (void)st;
            all.push_back(id);
        }
        return all;
    }
    auto out = slot.admissible_stations;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::string>> Application::route_options(const std::string& a,
                                                                 const std::string& b) const {
    if (a == b) return {{}};

    std::vector<std::vector<std::string>> options;
    for (const auto& [id, ln] : links) {
        if ((ln.a == a && ln.b == b) || (ln.a == b && ln.b == a)) options.push_back({id});
    }
    if (!options.empty()) return options; // already sorted: links map is ordered by id

    // No direct link: the designated route is the lowest-latency path,
    // ties broken by the lexicographic link-id sequence.
    struct Entry {
        double cost;
        std::string station;
        std::vector<std::string> path;
        bool operator>(const Entry& o) const {
            if (cost != o.cost) return cost > o.cost;
            return path > o.path;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    std::map<std::string, double> best;
    frontier.push({0.0, a, {}});
    while (!frontier.empty()) {
        Entry cur = frontier.top();
        frontier.pop();
        if (cur.station == b) return {cur.path};
        auto it = best.find(cur.station);
        if (it != best.end() && it->second <= cur.cost) continue;
        best[cur.station] = cur.cost;
        for (const auto& [id, ln] : links) {
            std::string other;
            if (ln.a == cur.station) other = ln.b;
            else if (ln.b == cur.station) other = ln.a;
            else continue;
            auto path = cur.path;
            path.push_back(id);
            frontier.push({cur.cost + ln.latency_ms, other, std::move(path)});
        }
    }
    return {}; // unreachable pair
}

std::string Configuration::canonical() const {
    std::ostringstream out;
    for (const auto& [slot, p] : placement) out << slot << '=' << p.variant << '@' << p.station << ';';
    out << '|';
    for (const auto& [conduct, route] : routes) {
        out << conduct << '=';
        for (std::size_t i = 0; i < route.size(); ++i) {
            if (i) out << ',';
            out << route[i];
        }
        out << ';';
    }
    return out.str();
}

std::string Configuration::id() const {
    // FNV-1a, 64 bit
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> validate_configuration(const Configuration& cfg, const Application& app) {
    std::vector<std::string> violations;
    for (const auto& [slot_id, slot] : app.slots) {
        auto it = cfg.placement.find(slot_id);
        if (it == cfg.placement.end()) {
            violations.push_back("missing slot: " + slot_id);
            continue;
        }
        const auto& [variant, station] = it->second;
        if (!slot.variants.contains(variant))
            violations.push_back("inadmissible variant: " + variant + " for slot " + slot_id);
        if (!app.stations.contains(station))
            violations.push_back("unknown station: " + station + " for slot " + slot_id);
        else {
            auto admissible = app.stations_for(slot);
            if (std::find(admissible.begin(), admissible.end(), station) == admissible.end())
                violations.push_back("inadmissible station: " + station + " for slot " + slot_id);
        }
    }
    for (const auto& [slot_id, p] : cfg.placement) {
        (void)p;
        if (!app.slots.contains(slot_id)) violations.push_back("unknown slot: " + slot_id);
    }
    for (const auto& [conduct_id, conduct] : app.conducts) {
        auto src = cfg.placement.find(conduct.source_slot);
        auto dst = cfg.placement.find(conduct.sink_slot);
        if (src == cfg.placement.end() || dst == cfg.placement.end()) continue; // reported above
        auto route_it = cfg.routes.find(conduct_id);
        std::vector<std::string> route =
            route_it == cfg.routes.end() ? std::vector<std::string>{} : route_it->second;
        std::string at = src->second.station;
        bool ok = true;
        for (const auto& link_id : route) {
            auto ln = app.links.find(link_id);
            if (ln == app.links.end()) {
                violations.push_back("unknown link in route: " + link_id);
                ok = false;
                break;
            }
            if (ln->second.a == at) at = ln->second.b;
            else if (ln->second.b == at) at = ln->second.a;
            else {
                ok = false;
                break;
            }
        }
        if (ok && at != dst->second.station)
            violations.push_back("disconnected route: " + conduct_id);
    }
    for (const auto& [conduct_id, route] : cfg.routes) {
        (void)route;
        if (!app.conducts.contains(conduct_id)) violations.push_back("unknown conduct: " + conduct_id);
    }
    return violations;
}

ConfigurationEnumerator::ConfigurationEnumerator(const Application& app) : app_(app) {
    if (app.stations.empty()) throw EmptySpace{"no stations"};
    for (const auto& [slot_id, slot] : app.slots) {
        if (slot.variants.empty()) throw EmptySpace{"slot " + slot_id + " has no admissible variant"};
        SlotChoices choices;
        choices.slot = slot_id;
        auto hosts = app.stations_for(slot);
        if (hosts.empty()) throw EmptySpace{"slot " + slot_id + " has no admissible station"};
        for (const auto& [variant_id, variant] : slot.variants) {
            (void)variant;
            for (const auto& station : hosts) choices.options.push_back({variant_id, station});
        }
        slots_.push_back(std::move(choices));
    }
    slot_idx_.assign(slots_.size(), 0);
    for (const auto& [conduct_id, conduct] : app.conducts) {
        (void)conduct;
        conduct_ids_.push_back(conduct_id);
    }
    rebuild_routes();
}

void ConfigurationEnumerator::rebuild_routes() {
    route_opts_.clear();
    route_idx_.clear();
    fresh_routes_ = true;
    std::map<std::string, std::string> host;
    for (std::size_t i = 0; i < slots_.size(); ++i)
        host[slots_[i].slot] = slots_[i].options[slot_idx_[i]].station;
    for (const auto& conduct_id : conduct_ids_) {
        const auto& c = app_.conduct(conduct_id);
        auto opts = app_.route_options(host.at(c.source_slot), host.at(c.sink_slot));
        if (opts.empty()) {
            fresh_routes_ = false; // unreachable placement, skip it entirely
            return;
        }
        route_opts_.push_back(std::move(opts));
        route_idx_.push_back(0);
    }
}

bool ConfigurationEnumerator::advance() {
    // Route odometer first (innermost), then placements.
    if (fresh_routes_) {
        for (std::size_t i = route_idx_.size(); i-- > 0;) {
            if (++route_idx_[i] < route_opts_[i].size()) return true;
            route_idx_[i] = 0;
        }
    }
    for (std::size_t i = slot_idx_.size(); i-- > 0;) {
        if (++slot_idx_[i] < slots_[i].options.size()) {
            rebuild_routes();
            return true;
        }
        slot_idx_[i] = 0;
    }
    return false;
}

std::optional<Configuration> ConfigurationEnumerator::next() {
    while (!exhausted_) {
        if (!fresh_routes_) {
            if (!advance()) {
                exhausted_ = true;
                break;
            }
            continue;
        }
        Configuration cfg;
        for (std::size_t i = 0; i < slots_.size(); ++i)
            cfg.placement[slots_[i].slot] = slots_[i].options[slot_idx_[i]];
        for (std::size_t i = 0; i < conduct_ids_.size(); ++i)
            cfg.routes[conduct_ids_[i]] = route_opts_[i][route_idx_[i]];
        if (!advance()) exhausted_ = true;
        return cfg;
    }
    return std::nullopt;
}

std::vector<Configuration> enumerate_configurations(const Application& app, std::uint64_t cap) {
    ConfigurationEnumerator en(app);
    std::vector<Configuration> out;
    while (auto cfg = en.next()) {
        if (out.size() >= cap) throw BudgetExceeded{cap};
        out.push_back(std::move(*cfg));
    }
    return out;
}

std::uint64_t count_configurations(const Application& app, std::uint64_t cap) {
    ConfigurationEnumerator en(app);
    std::uint64_t n = 0;
    while (en.next()) {
        if (++n > cap) throw BudgetExceeded{cap};
    }
    return n;
}

double intrinsic_mark_of(const Configuration& cfg, const Application& app,
                         const UserProfile& user) {
    SubgroupMarks marks;
    for (const auto& [slot_id, p] : cfg.placement) {
        const auto& slot = app.slot(slot_id);
        const auto& variant = slot.variants.at(p.variant);
        auto& sg_marks = marks[slot.subgroup];
        for (const auto& [char_id, mark] : variant.intrinsic_contribution) {
            auto [it, inserted] = sg_marks.try_emplace(char_id, mark);
            if (!inserted) it->second = std::min(it->second, mark); // worst stage of the chain
        }
    }
    return evaluate_hierarchy(app, marks, user).application.intrinsic;
}

std::vector<Family> partition_into_families(const std::vector<Configuration>& configs,
                                            const Application& app, const UserProfile& user,
                                            double eps_intrinsic) {
    std::vector<std::pair<double, const Configuration*>> ranked;
    ranked.reserve(configs.size());
    for (const auto& cfg : configs) ranked.emplace_back(intrinsic_mark_of(cfg, app, user), &cfg);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Family> families;
    for (const auto& [mark, cfg] : ranked) {
        Family* home = nullptr;
        for (auto& fam : families) {
            if (std::abs(fam.intrinsic_mark - mark) <= eps_intrinsic) {
                home = &fam;
                break;
            }
        }
        if (!home) {
            families.push_back(Family{mark, {}});
            home = &families.back();
        }
        home->members.push_back(*cfg);
    }
    return families;
}

std::vector<Configuration> culprit_neighbors(const Configuration& cfg, const std::string& culprit,
                                             const Application& app) {
    std::vector<Configuration> out;
    if (auto slot_it = app.slots.find(culprit); slot_it != app.slots.end()) {
        const auto& slot = slot_it->second;
        const auto current = cfg.placement.at(culprit);
        for (const auto& [variant_id, variant] : slot.variants) {
            (void)variant;
            for (const auto& station : app.stations_for(slot)) {
                Placement p{variant_id, station};
                if (p == current) continue;
                Configuration candidate = cfg;
                candidate.placement[culprit] = p;
                // Re-route every conduct touching the culprit for the new host.
                bool feasible = true;
                for (const auto& [conduct_id, conduct] : app.conducts) {
                    if (conduct.source_slot != culprit && conduct.sink_slot != culprit) continue;
                    auto opts = app.route_options(candidate.placement.at(conduct.source_slot).station,
                                                  candidate.placement.at(conduct.sink_slot).station);
                    if (opts.empty()) {
                        feasible = false;
                        break;
                    }
                    candidate.routes[conduct_id] = opts.front();
                }
                if (feasible) out.push_back(std::move(candidate));
            }
        }
        return out;
    }
    if (auto c_it = app.conducts.find(culprit); c_it != app.conducts.end()) {
        const auto& conduct = c_it->second;
        auto opts = app.route_options(cfg.placement.at(conduct.source_slot).station,
                                      cfg.placement.at(conduct.sink_slot).station);
        const auto& current = cfg.routes.at(culprit);
        for (auto& route : opts) {
            if (route == current) continue;
            Configuration candidate = cfg;
            candidate.routes[culprit] = std::move(route);
            out.push_back(std::move(candidate));
        }
        return out;
    }
    throw UnknownCulprit{culprit};
}

} // namespace qosim
