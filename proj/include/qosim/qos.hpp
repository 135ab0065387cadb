#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qosim {

struct Application;

// Marks rate a quality on [0,1]: 0 cripples the service for the user, 1 is optimal.
// Comparisons between marks use this absolute tolerance throughout.
inline constexpr double kMarkTolerance = 1e-9;

enum class CharKind { intrinsic, contextual };

// A simple user-perceivable QoS parameter. Characteristics measured in
// "kbit/s" are throttled by route bandwidth and those in "ms" accumulate
// route latency when a flow crosses the network.
struct Characteristic {
    std::string id;
    CharKind kind = CharKind::contextual;
    std::string unit;
    std::string description;
};

struct WishBreakpoint {
    double value = 0.0;
    double mark = 0.0;
};

// The user's rating of one characteristic: piecewise-linear over breakpoints
// (strictly ascending by value, at least two), clamped at both ends.
struct WishFunction {
    std::string characteristic;
    std::vector<WishBreakpoint> breakpoints;
    double weight = 1.0;
};

struct UserProfile {
    std::map<std::string, WishFunction> wishes; // keyed by characteristic id
    std::map<std::string, double> subgroup_weights; // missing id reads 1.0
    std::map<std::string, double> group_weights;    // missing id reads 1.0

    double wish_weight(const std::string& characteristic) const;
    double subgroup_weight(const std::string& id) const;
    double group_weight(const std::string& id) const;
};

// Intrinsic criterion gathers context-independent characteristics, contextual
// the context-dependent ones. An entity's QoS is the worst of the two.
struct CriterionMarks {
    double intrinsic = 1.0;
    double contextual = 1.0;
};

// point id -> characteristic id -> mark. Points are conducts, terminal slot
// outputs ("out/<slot>/<port>") and spy agents ("spy/<id>").
using PointMarks = std::map<std::string, std::map<std::string, double>>;

// subgroup id -> characteristic id -> mark, the input of hierarchy evaluation.
using SubgroupMarks = std::map<std::string, std::map<std::string, double>>;

struct QoSReport {
    CriterionMarks application;
    std::map<std::string, CriterionMarks> groups;
    std::map<std::string, CriterionMarks> subgroups;
    PointMarks points;
    double overall = 1.0;
    std::int64_t at_ms = 0;
};

// Piecewise-linear interpolation of the user's wish; values outside the
// breakpoint range clamp to the edge marks.
double mark_characteristic(double value, const WishFunction& wish);

// Weighted arithmetic mean of marks. An empty list is an absent constraint
// and rates 1.0; a non-empty list with zero total weight throws AllWeightsZero.
double aggregate_criterion(const std::vector<std::pair<double, double>>& mark_weight);

// min(intrinsic, contextual): the value of the worst criterion.
double entity_qos(const CriterionMarks& cm);

// True when the user would not notice a change between the two services.
bool service_proximity(const CriterionMarks& a, const CriterionMarks& b,
                       double eps_intrinsic, double eps_contextual);

// Rolls per-characteristic marks up the Sub-Group -> Group -> application
// hierarchy. Criterion marks at each level are the wish-weighted average of
// the level below, split by characteristic kind; overall is the min rule at
// the top. Characteristics without a wish do not participate.
QoSReport evaluate_hierarchy(const Application& app, const SubgroupMarks& marks,
                             const UserProfile& user);

} // namespace qosim
