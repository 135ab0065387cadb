#include "qosim/eval_kernel.hpp"

namespace qosim {

namespace {

CandidateScore score_one(const Configuration& cfg, const Application& app,
                         const ContextState& state, const UserProfile& user,
                         const std::vector<SpyAgent>& spies) {
    const QoSReport report = evaluate_configuration(cfg, app, state, user, spies);
    return CandidateScore{report.application, report.overall};
}

} // namespace

std::vector<CandidateScore> evaluate_candidates_serial(const std::vector<Configuration>& candidates,
                                                       const Application& app,
                                                       const ContextState& state,
                                                       const UserProfile& user,
                                                       const std::vector<SpyAgent>& spies) {
    std::vector<CandidateScore> scores(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        scores[i] = score_one(candidates[i], app, state, user, spies);
    return scores;
}

std::vector<CandidateScore> evaluate_candidates_parallel(const std::vector<Configuration>& candidates,
                                                         const Application& app,
                                                         const ContextState& state,
                                                         const UserProfile& user,
                                                         const std::vector<SpyAgent>& spies) {
    std::vector<CandidateScore> scores(candidates.size());
    const auto n = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i)
        scores[i] = score_one(candidates[i], app, state, user, spies);
    return scores;
}

std::vector<CandidateScore> evaluate_candidates(const std::vector<Configuration>& candidates,
                                                const Application& app, const ContextState& state,
                                                const UserProfile& user,
                                                const std::vector<SpyAgent>& spies, bool parallel) {
    // Tiny batches are not worth the fork/join.
    if (parallel && candidates.size() >= 16)
        return evaluate_candidates_parallel(candidates, app, state, user, spies);
    return evaluate_candidates_serial(candidates, app, state, user, spies);
}

} // namespace qosim
