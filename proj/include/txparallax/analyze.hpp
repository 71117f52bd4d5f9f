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

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include <txparallax/graph.hpp>

namespace txparallax {

enum class ScheduleMode : std::uint8_t { kEarliestStart, kBarrierRounds };

std::string_view schedule_mode_name(ScheduleMode mode);
std::optional<ScheduleMode> schedule_mode_from_name(std::string_view name);

//! Gas-time interval assigned to one transaction; end - start = its gas.
struct ScheduleSlot {
    std::uint64_t start{0};
    std::uint64_t end{0};
};

struct Schedule {
    std::vector<ScheduleSlot> assignments;  // indexed like TxGraph.vertices
    std::uint64_t makespan{0};
    ScheduleMode mode{ScheduleMode::kEarliestStart};
};

struct ComponentResult {
    std::vector<std::uint32_t> members;  // sorted vertex indices
    std::uint64_t gas{0};
};

struct CliqueResult {
    std::vector<std::uint32_t> members;  // sorted vertex indices
    std::uint64_t gas{0};
    bool exact{true};
};

//! Connected component with the largest summed vertex gas. Ties resolve to
//! the component containing the smallest vertex index.
ComponentResult heaviest_component(const TxGraph& graph);

//! Exact branch-and-bound maximum-weight clique (weight-degeneracy vertex
//! order, suffix-best and weight-sum pruning). When the optional budget runs
//! out the best incumbent is returned with exact=false.
CliqueResult max_weight_clique(const TxGraph& graph,
                               std::optional<std::chrono::milliseconds> budget = std::nullopt);

//! Greedy list schedule. EarliestStart places vertices in descending gas
//! order (ties by position) at the earliest gas time after every placed
//! conflicting vertex. BarrierRounds repeatedly runs a greedy maximal
//! independent set per round, with round length the heaviest member.
Schedule list_schedule(const TxGraph& graph, ScheduleMode mode = ScheduleMode::kEarliestStart);

//! (schedule_gas - clique_gas) / clique_gas; requires clique_gas > 0.
double relative_error(std::uint64_t schedule_gas, std::uint64_t clique_gas);

struct AnalyzeOptions {
    ScheduleMode schedule_mode{ScheduleMode::kEarliestStart};
    bool compute_clique{false};
    std::chrono::milliseconds clique_budget{std::chrono::milliseconds{10000}};
};

struct BlockMetrics {
    std::uint64_t tx_count{0};
    std::uint64_t total_gas{0};
    std::uint64_t heaviest_cc_gas{0};
    std::optional<std::uint64_t> clique_gas;  // absent when the search is skipped
    bool clique_exact{false};
    std::uint64_t schedule_gas{0};
    std::uint64_t heaviest_tx_gas{0};
    std::uint64_t dependency_count{0};
    double speedup_lower{1.0};
    double speedup_upper{1.0};
    double speedup_loose{1.0};
};

//! Populates every metric from one transaction graph. Without a clique the
//! schedule's sequential gas serves as the proxy denominator for
//! speedup_upper. Empty graphs report all gas fields 0 and speedups 1.
BlockMetrics analyze_block(const TxGraph& graph, const AnalyzeOptions& opts = {});

}  // namespace txparallax
