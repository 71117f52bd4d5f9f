/*
   Copyright 2026 The Txparallax Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Compares the serial reference conflict kernel against the OpenMP one on
// synthetic defi-preset batches of growing size. Both must produce the same
// edge list; the table reports wall time and speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <txparallax/graph.hpp>
#include <txparallax/synth.hpp>

namespace {

double now_seconds() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
#endif
}

template <typename F>
double time_best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const double start = now_seconds();
        f();
        const double elapsed = now_seconds() - start;
        if (elapsed < best) {
            best = elapsed;
        }
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace txparallax;

    int repeats = 5;
    if (argc > 1) {
        repeats = std::atoi(argv[1]);
        if (repeats < 1) {
            std::fprintf(stderr, "usage: %s [repeats]\n", argv[0]);
            return 1;
        }
    }

    const WorkloadProfile profile = WorkloadProfile::preset("defi");
    const std::size_t kMaxBlocks = 40;
    std::vector<BlockTrace> blocks;
    blocks.reserve(kMaxBlocks);
    for (std::size_t i = 0; i < kMaxBlocks; ++i) {
        blocks.push_back(generate_block(profile, i));
    }

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("%8s %8s %10s %12s %12s %8s\n", "blocks", "txs", "edges", "serial_ms",
                "parallel_ms", "speedup");

    for (const std::size_t batch : {1UL, 5UL, 10UL, 20UL, 40UL}) {
        const std::span<const BlockTrace> span{blocks.data(), batch};
        const BatchScopes scopes = collect_scopes(span, nullptr);

        std::vector<std::pair<std::uint32_t, std::uint32_t>> serial_edges;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> parallel_edges;
        const double serial_s = time_best_of(repeats, [&] {
            serial_edges = conflict_edges_serial(scopes.indexed, ConflictMode::kWriteAware);
        });
        const double parallel_s = time_best_of(repeats, [&] {
            parallel_edges = conflict_edges_parallel(scopes.indexed, ConflictMode::kWriteAware);
        });

        if (serial_edges != parallel_edges) {
            std::fprintf(stderr, "kernel mismatch at batch size %zu\n", batch);
            return 1;
        }
        std::printf("%8zu %8zu %10zu %12.3f %12.3f %8.2f\n", batch, scopes.indexed.size(),
                    serial_edges.size(), serial_s * 1e3, parallel_s * 1e3,
                    parallel_s > 0 ? serial_s / parallel_s : 0.0);
    }
    return 0;
}
