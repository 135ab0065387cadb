#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qosim/qos.hpp"

namespace qosim {

// One affine-with-clamp output rule: value_out = clamp(a*in + b, lo, hi),
// optionally scaled by the host's cpu resource factor.
struct TransferRule {
    enum class CpuScaling { none, multiply, divide };
    std::string port;
    std::string characteristic;
    double a = 1.0;
    double b = 0.0;
    double lo = 0.0;
    double hi = 1e9;
    CpuScaling cpu_scaling = CpuScaling::none;
};

struct ComponentVariant {
    std::string id;
    std::string slot;
    std::map<std::string, double> intrinsic_contribution; // characteristic -> mark
    std::vector<TransferRule> transfer;
    double cpu_demand = 0.0;
    int power_rank = 0;
};

struct ProcessorSlot {
    std::string id;
    std::string subgroup;
    std::vector<std::string> input_ports;
    std::vector<std::string> output_ports;
    std::map<std::string, ComponentVariant> variants; // admissible set
    std::vector<std::string> admissible_stations;     // empty = every station
};

struct Conduct {
    std::string id;
    std::string subgroup;
    std::string source_slot, source_port;
    std::string sink_slot, sink_port;
    std::set<std::string> required_characteristics;
    bool loopback = false;
};

struct SubGroup {
    std::string id;
    std::string group;
    std::vector<std::string> slots;
    std::vector<std::string> conducts;
};

struct Group {
    std::string id;
    std::vector<std::string> subgroups;
};

struct Station {
    std::string id;
    double capacity = 1.0;
    double base_load = 0.0;
};

struct Link {
    std::string id;
    std::string a, b; // endpoint stations, distinct
    double bandwidth_kbps = 0.0;
    double latency_ms = 0.0;
};

struct Application {
    std::map<std::string, Characteristic> characteristics;
    std::map<std::string, Group> groups;
    std::map<std::string, SubGroup> subgroups;
    std::map<std::string, ProcessorSlot> slots;
    std::map<std::string, Conduct> conducts;
    std::map<std::string, Station> stations;
    std::map<std::string, Link> links;

    const ProcessorSlot& slot(const std::string& id) const;
    const Conduct& conduct(const std::string& id) const;
    const Station& station(const std::string& id) const;
    const Link& link(const std::string& id) const;
    const Characteristic& characteristic(const std::string& id) const;

    // Admissible host stations of a slot, sorted by id.
    std::vector<std::string> stations_for(const ProcessorSlot& slot) const;

    // Deterministic route options between two stations: every direct link
    // (sorted by id) as a single-hop route, else the designated shortest
    // path by total latency. Empty option list means the pair is unreachable;
    // equal stations yield the single empty route.
    std::vector<std::vector<std::string>> route_options(const std::string& a,
                                                        const std::string& b) const;
};

struct Placement {
    std::string variant;
    std::string station;
    auto operator<=>(const Placement&) const = default;
};

struct Configuration {
    std::map<std::string, Placement> placement;              // slot -> binding
    std::map<std::string, std::vector<std::string>> routes;  // conduct -> link ids

    std::string canonical() const; // stable textual form
    std::string id() const;        // short hash of canonical()
    auto operator<=>(const Configuration&) const = default;
};

// Configurations whose service the user cannot tell apart on the intrinsic
// criterion; the index mark is the founder's.
struct Family {
    double intrinsic_mark = 1.0;
    std::vector<Configuration> members;
};

// Every invariant violation of cfg against app, empty when valid.
std::vector<std::string> validate_configuration(const Configuration& cfg, const Application& app);

// Streams valid configurations exactly once, lexicographic by slot id, then
// variant id, then station id, then route choice.
class ConfigurationEnumerator {
  public:
    explicit ConfigurationEnumerator(const Application& app);
    std::optional<Configuration> next();

  private:
    struct SlotChoices {
        std::string slot;
        std::vector<Placement> options;
    };
    void rebuild_routes();
    bool advance();

    const Application& app_;
    std::vector<SlotChoices> slots_;
    std::vector<std::size_t> slot_idx_;
    std::vector<std::string> conduct_ids_;
    std::vector<std::vector<std::vector<std::string>>> route_opts_;
    std::vector<std::size_t> route_idx_;
    bool exhausted_ = false;
    bool fresh_routes_ = false;
};

// Materializes the stream; throws EmptySpace when a slot has no admissible
// variant and BudgetExceeded past `cap` configurations.
std::vector<Configuration> enumerate_configurations(const Application& app,
                                                    std::uint64_t cap = 1000000);

// Total count of valid configurations (walks route feasibility per placement).
std::uint64_t count_configurations(const Application& app, std::uint64_t cap = 1000000);

// Application-level intrinsic criterion mark of a configuration, from the
// chosen variants' contributions alone; independent of placement and context.
double intrinsic_mark_of(const Configuration& cfg, const Application& app, const UserProfile& user);

// Greedy clustering in descending-mark order: a configuration joins the first
// family whose index mark is within eps_intrinsic, else founds a new family.
std::vector<Family> partition_into_families(const std::vector<Configuration>& configs,
                                            const Application& app, const UserProfile& user,
                                            double eps_intrinsic);

// All valid configurations differing from cfg only at the culprit slot's
// (variant, station) binding, or only at the culprit conduct's route. The
// current configuration itself is excluded.
std::vector<Configuration> culprit_neighbors(const Configuration& cfg, const std::string& culprit,
                                             const Application& app);

} // namespace qosim
