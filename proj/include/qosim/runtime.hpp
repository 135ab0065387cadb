#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qosim/app.hpp"
#include "qosim/context.hpp"
#include "qosim/events.hpp"
#include "qosim/search.hpp"
#include "qosim/trace.hpp"

namespace qosim {

// The five local manager roles present on every station the application uses.
// In the simulation they are per-station facades over the shared engines.
inline constexpr std::array<const char*, 5> kManagerRoles = {
    "events", "evaluation", "communication", "user", "supervision"};

struct LocalPlatform {
    std::string station;
    std::vector<std::string> managers; // the five roles, in kManagerRoles order
};

struct ReconfigurationOrder {
    ReconfigurationPlan plan;
    std::int64_t issued_at = 0;
    std::int64_t completes_at = 0; // issued_at + per-action latency each
};

// Replays the order onto the running configuration. Throws StalePlan when the
// running configuration is no longer the one the plan was built against.
Configuration apply_reconfiguration(const ReconfigurationOrder& order,
                                    const Configuration& running);

enum class Policy { heuristic, exhaustive };

struct RuntimeParams {
    std::int64_t dt_ms = 100;
    std::int64_t action_latency_ms = 200;
    double event_threshold = 0.1;
    std::int64_t horizon_ms = 10000;
    Policy policy = Policy::heuristic;
    SearchParams search;
};

class Simulation;

// Runs the whole fixed-tick loop and returns the audit trace.
Trace run_simulation_loop(const Application& app, const UserProfile& user,
                          std::vector<SpyAgent> spies, Configuration default_configuration,
                          std::vector<ContextEvent> context_events,
                          std::map<std::string, std::string> initial_environment,
                          const RuntimeParams& params);

// Deterministic fixed-tick control loop: apply due context events, evaluate,
// detect, pick one event, search, commit at most one order at a time.
class Simulation {
  public:
    Simulation(const Application& app, const UserProfile& user, std::vector<SpyAgent> spies,
               Configuration default_configuration, std::vector<ContextEvent> context_events,
               std::map<std::string, std::string> initial_environment, RuntimeParams params);

    // Validates the default configuration, instantiates one LocalPlatform per
    // used station and samples QoS at t=0. Throws InvalidDefaultConfiguration.
    void deploy_initial();

    // Runs deploy_initial plus every tick up to the horizon.
    const Trace& run();

    const Trace& trace() const { return trace_; }
    const Configuration& running() const { return running_; }
    const std::vector<LocalPlatform>& platforms() const { return platforms_; }
    const EventQueue& queue() const { return queue_; }

  private:
    void tick(std::int64_t now);
    nlohmann::json action_json(const std::vector<PlanAction>& actions) const;

    const Application& app_;
    const UserProfile& user_;
    std::vector<SpyAgent> spies_;
    Configuration running_;
    std::vector<ContextEvent> script_;
    RuntimeParams params_;

    ContextState state_;
    std::optional<QoSReport> prev_report_;
    ContextState prev_state_;
    EventQueue queue_;
    std::optional<ReconfigurationOrder> in_flight_;
    std::vector<LocalPlatform> platforms_;
    std::size_t next_script_ = 0;
    std::uint64_t next_event_id_ = 1;
    Trace trace_;
    bool deployed_ = false;
};

} // namespace qosim
