#pragma once

#include <stdexcept>
#include <string>

namespace qosim {

// Base for all model-level failures.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AllWeightsZero : ModelError {
    AllWeightsZero() : ModelError("aggregation over a non-empty mark list whose weights sum to zero") {}
};

struct UnknownCharacteristic : ModelError {
    explicit UnknownCharacteristic(const std::string& id)
        : ModelError("unknown characteristic: " + id) {}
};

struct UnknownEntity : ModelError {
    UnknownEntity(const std::string& kind, const std::string& id)
        : ModelError("unknown " + kind + ": " + id) {}
};

struct UnknownCulprit : ModelError {
    explicit UnknownCulprit(const std::string& id) : ModelError("unknown culprit: " + id) {}
};

struct CyclicTopology : ModelError {
    CyclicTopology() : ModelError("conduct graph has a cycle (loopback conducts excepted)") {}
};

struct EmptySpace : ModelError {
    explicit EmptySpace(const std::string& what) : ModelError("empty configuration space: " + what) {}
};

struct BudgetExceeded : ModelError {
    explicit BudgetExceeded(std::uint64_t cap)
        : ModelError("candidate budget exceeded (cap " + std::to_string(cap) + ")") {}
};

struct InvalidDefaultConfiguration : ModelError {
    explicit InvalidDefaultConfiguration(const std::string& why)
        : ModelError("invalid default configuration: " + why) {}
};

struct StalePlan : ModelError {
    StalePlan() : ModelError("plan was built against a superseded configuration") {}
};

struct UnknownName : ModelError {
    explicit UnknownName(const std::string& name) : ModelError("unknown scenario name: " + name) {}
};

// Scenario file problems, reported with enough context to fix the file.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : ScenarioError {
    explicit SyntaxError(const std::string& detail) : ScenarioError("syntax error: " + detail) {}
};

struct ReferenceError : ScenarioError {
    ReferenceError(const std::string& where, const std::string& id)
        : ScenarioError("dangling reference in " + where + ": " + id) {}
};

struct ConstraintError : ScenarioError {
    explicit ConstraintError(const std::string& detail) : ScenarioError("constraint violated: " + detail) {}
};

} // namespace qosim
