#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qosim/app.hpp"
#include "qosim/context.hpp"
#include "qosim/qos.hpp"
#include "qosim/runtime.hpp"

namespace qosim {

struct ScenarioParams {
    double eps_intrinsic = 0.05;
    double eps_contextual = 0.05;
    double delta = 0.01;
    double event_threshold = 0.1;
    std::int64_t dt_ms = 100;
    std::int64_t action_latency_ms = 200;
    std::int64_t horizon_ms = 10000;
    int adjacent_family_k = 2;
    std::uint64_t exact_enumeration_cap = 10000;
    std::uint64_t max_stage_candidates = 200000;
    std::uint64_t brute_force_cap = 1000000;
    std::uint64_t seed = 0;
};

struct Scenario {
    std::string name;
    Application app;
    UserProfile user;
    std::vector<SpyAgent> spies;
    Configuration default_configuration;
    std::map<std::string, std::string> initial_environment;
    std::vector<ContextEvent> context_events;
    ScenarioParams params;

    RuntimeParams runtime_params(Policy policy) const;
};

// Full structural and referential validation; throws SyntaxError,
// ReferenceError or ConstraintError.
Scenario parse_scenario(const std::string& text);

nlohmann::json scenario_to_json(const Scenario& scenario);

// Bundled scenarios: "surveillance135", "toy6" and "scaling(n,v,s)".
Scenario generate_reference_scenario(const std::string& name);

} // namespace qosim
