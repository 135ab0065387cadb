#pragma once

#include <vector>

#include "qosim/app.hpp"
#include "qosim/context.hpp"
#include "qosim/qos.hpp"

namespace qosim {

struct CandidateScore {
    CriterionMarks marks;
    double overall = 0.0;
};

// Batch QoS prediction over candidate configurations. Both kernels write
// scores by candidate index, so results are identical and deterministic; the
// parallel kernel spreads candidates across OpenMP threads.
std::vector<CandidateScore> evaluate_candidates_serial(const std::vector<Configuration>& candidates,
                                                       const Application& app,
                                                       const ContextState& state,
                                                       const UserProfile& user,
                                                       const std::vector<SpyAgent>& spies);

std::vector<CandidateScore> evaluate_candidates_parallel(const std::vector<Configuration>& candidates,
                                                         const Application& app,
                                                         const ContextState& state,
                                                         const UserProfile& user,
                                                         const std::vector<SpyAgent>& spies);

std::vector<CandidateScore> evaluate_candidates(const std::vector<Configuration>& candidates,
                                                const Application& app, const ContextState& state,
                                                const UserProfile& user,
                                                const std::vector<SpyAgent>& spies, bool parallel);

} // namespace qosim
