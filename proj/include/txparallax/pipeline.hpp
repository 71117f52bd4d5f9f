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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <txparallax/aggregate.hpp>
#include <txparallax/analyze.hpp>
#include <txparallax/disentangle.hpp>
#include <txparallax/graph.hpp>

namespace txparallax {

struct PipelineOptions {
    ConflictMode mode{ConflictMode::kWriteAware};
    std::optional<DisentangleConfig> rewrites;
    std::size_t batch_size{1};
    AnalyzeOptions analyze;
    int jobs{0};  // 0 = all available workers
};

//! One analyzed block or batch. dependency_count inside metrics is always
//! the AnyTouch count regardless of the conflict mode used for the bounds.
struct BlockRecord {
    std::uint64_t first_block{0};
    std::uint64_t last_block{0};
    std::uint64_t timestamp{0};
    BlockMetrics metrics;
    DisentangleStats stats;
};

//! Batches the blocks (trailing partial batch dropped), builds conflict
//! graphs and computes metrics. Batches are distributed over an OpenMP
//! worker pool; output order and content are independent of the pool size.
std::vector<BlockRecord> analyze_blocks(std::span<const BlockTrace> blocks,
                                        const PipelineOptions& opts);

//! Single-threaded reference with identical output, kept for testing.
std::vector<BlockRecord> analyze_blocks_serial(std::span<const BlockTrace> blocks,
                                               const PipelineOptions& opts);

MetricRecord to_metric_record(const BlockRecord& record);
std::vector<MetricRecord> to_metric_records(std::span<const BlockRecord> records);

std::string render_metrics_csv(std::span<const BlockRecord> records);
std::vector<BlockRecord> parse_metrics_csv(std::istream& input);
std::vector<BlockRecord> load_metrics_csv(const std::filesystem::path& path);

}  // namespace txparallax
