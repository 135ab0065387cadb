// Compares the serial and OpenMP candidate-evaluation kernels on scaling
// fixtures and reports throughput, verifying both produce identical scores.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qosim/eval_kernel.hpp"
#include "qosim/scenario.hpp"

using namespace qosim;

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
        .count();
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t batch_cap = argc > 1 ? std::stoull(argv[1]) : 20000;

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled at build time\n");
#endif
    std::printf("%-18s %10s %12s %12s %9s %s\n", "fixture", "batch", "serial ms", "parallel ms",
                "speedup", "match");

    const char* fixtures[] = {"scaling(3,3,2)", "scaling(4,4,3)", "scaling(5,4,4)",
                              "scaling(6,5,4)"};
    for (const char* name : fixtures) {
        auto scenario = generate_reference_scenario(name);
        auto state = ContextState::initial(scenario.app);

        std::vector<Configuration> batch;
        ConfigurationEnumerator en(scenario.app);
        while (batch.size() < batch_cap) {
            auto cfg = en.next();
            if (!cfg) break;
            batch.push_back(std::move(*cfg));
        }

        auto t0 = std::chrono::steady_clock::now();
        auto serial = evaluate_candidates_serial(batch, scenario.app, state, scenario.user,
                                                 scenario.spies);
        const double serial_ms = elapsed_ms(t0);

        t0 = std::chrono::steady_clock::now();
        auto parallel = evaluate_candidates_parallel(batch, scenario.app, state, scenario.user,
                                                     scenario.spies);
        const double parallel_ms = elapsed_ms(t0);

        bool match = serial.size() == parallel.size();
        for (std::size_t i = 0; match && i < serial.size(); ++i) {
            match = serial[i].overall == parallel[i].overall &&
                    serial[i].marks.intrinsic == parallel[i].marks.intrinsic &&
                    serial[i].marks.contextual == parallel[i].marks.contextual;
        }

        std::printf("%-18s %10zu %12.2f %12.2f %8.2fx %s\n", name, batch.size(), serial_ms,
                    parallel_ms, parallel_ms > 0 ? serial_ms / parallel_ms : 0.0,
                    match ? "yes" : "NO");
        if (!match) return 1;
    }
    return 0;
}
