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

#include <txparallax/pipeline.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace txparallax {

namespace {

constexpr const char* kMetricsHeader =
    "first_block,last_block,timestamp,tx_count,total_gas,heaviest_cc_gas,clique_gas,clique_exact,"
    "schedule_gas,heaviest_tx_gas,dependency_count,speedup_lower,speedup_upper,speedup_loose";

BlockRecord analyze_batch(std::span<const BlockTrace> batch, const PipelineOptions& opts,
                          bool parallel_kernel) {
    const DisentangleConfig* cfg = opts.rewrites ? &*opts.rewrites : nullptr;
    auto scopes = collect_scopes(batch, cfg);
    const auto graph = tx_graph_from_scopes(scopes, opts.mode, parallel_kernel);

    BlockRecord record;
    record.first_block = scopes.first_block;
    record.last_block = scopes.last_block;
    record.timestamp = batch.front().timestamp;
    record.stats = scopes.stats;
    record.metrics = analyze_block(graph, opts.analyze);
    if (opts.mode != ConflictMode::kAnyTouch) {
        // Dependency counting follows the interdependency definition, which
        // is broader than the conflict mode driving the bounds.
        const auto touched_edges = parallel_kernel
                                       ? conflict_edges_parallel(scopes.indexed, ConflictMode::kAnyTouch)
                                       : conflict_edges_serial(scopes.indexed, ConflictMode::kAnyTouch);
        record.metrics.dependency_count = touched_edges.size();
    }
    return record;
}

std::string csv_field(const std::string& line, std::size_t& pos, std::size_t row) {
    if (pos == std::string::npos) {
        throw StatsError{"row " + std::to_string(row) + ": too few fields"};
    }
    const auto comma = line.find(',', pos);
    std::string field = comma == std::string::npos ? line.substr(pos)
                                                   : line.substr(pos, comma - pos);
    pos = comma == std::string::npos ? std::string::npos : comma + 1;
    return field;
}

std::uint64_t parse_uint_field(const std::string& field, const char* name, std::size_t row) {
    std::uint64_t value{};
    const auto* begin = field.data();
    const auto* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw StatsError{"row " + std::to_string(row) + ": invalid " + name + " '" + field + "'"};
    }
    return value;
}

double parse_double_field(const std::string& field, const char* name, std::size_t row) {
    double value{};
    const auto* begin = field.data();
    const auto* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw StatsError{"row " + std::to_string(row) + ": invalid " + name + " '" + field + "'"};
    }
    return value;
}

}  // namespace

std::vector<BlockRecord> analyze_blocks(std::span<const BlockTrace> blocks,
                                        const PipelineOptions& opts) {
    const auto batches = merge_blocks(blocks, opts.batch_size);
    std::vector<BlockRecord> records(batches.size());
#ifdef _OPENMP
    const int jobs = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(batches.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::int64_t i = 0; i < count; ++i) {
        records[static_cast<std::size_t>(i)] =
            analyze_batch(batches[static_cast<std::size_t>(i)], opts, true);
    }
#else
    for (std::size_t i = 0; i < batches.size(); ++i) {
        records[i] = analyze_batch(batches[i], opts, true);
    }
#endif
    return records;
}

std::vector<BlockRecord> analyze_blocks_serial(std::span<const BlockTrace> blocks,
                                               const PipelineOptions& opts) {
    const auto batches = merge_blocks(blocks, opts.batch_size);
    std::vector<BlockRecord> records;
    records.reserve(batches.size());
    for (const auto& batch : batches) {
        records.push_back(analyze_batch(batch, opts, false));
    }
    return records;
}

MetricRecord to_metric_record(const BlockRecord& record) {
    return MetricRecord{record.first_block, record.last_block, record.timestamp, record.metrics};
}

std::vector<MetricRecord> to_metric_records(std::span<const BlockRecord> records) {
    std::vector<MetricRecord> out;
    out.reserve(records.size());
    for (const auto& record : records) {
        out.push_back(to_metric_record(record));
    }
    return out;
}

std::string render_metrics_csv(std::span<const BlockRecord> records) {
    std::string out = kMetricsHeader;
    out += '\n';
    for (const auto& record : records) {
        const auto& m = record.metrics;
        out += std::to_string(record.first_block);
        out += ',';
        out += std::to_string(record.last_block);
        out += ',';
        out += std::to_string(record.timestamp);
        out += ',';
        out += std::to_string(m.tx_count);
        out += ',';
        out += std::to_string(m.total_gas);
        out += ',';
        out += std::to_string(m.heaviest_cc_gas);
        out += ',';
        if (m.clique_gas) {
            out += std::to_string(*m.clique_gas);
            out += ',';
            out += m.clique_exact ? '1' : '0';
        } else {
            out += ',';
        }
        out += ',';
        out += std::to_string(m.schedule_gas);
        out += ',';
        out += std::to_string(m.heaviest_tx_gas);
        out += ',';
        out += std::to_string(m.dependency_count);
        out += ',';
        out += format_float(m.speedup_lower);
        out += ',';
        out += format_float(m.speedup_upper);
        out += ',';
        out += format_float(m.speedup_loose);
        out += '\n';
    }
    return out;
}

std::vector<BlockRecord> parse_metrics_csv(std::istream& input) {
    std::string line;
    if (!std::getline(input, line)) {
        throw StatsError{"empty metrics file"};
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kMetricsHeader) {
        throw StatsError{"unexpected metrics header '" + line + "'"};
    }

    std::vector<BlockRecord> records;
    std::size_t row = 1;
    while (std::getline(input, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::size_t pos = 0;
        BlockRecord record;
        record.first_block = parse_uint_field(csv_field(line, pos, row), "first_block", row);
        record.last_block = parse_uint_field(csv_field(line, pos, row), "last_block", row);
        record.timestamp = parse_uint_field(csv_field(line, pos, row), "timestamp", row);
        auto& m = record.metrics;
        m.tx_count = parse_uint_field(csv_field(line, pos, row), "tx_count", row);
        m.total_gas = parse_uint_field(csv_field(line, pos, row), "total_gas", row);
        m.heaviest_cc_gas = parse_uint_field(csv_field(line, pos, row), "heaviest_cc_gas", row);
        const auto clique = csv_field(line, pos, row);
        const auto exact = csv_field(line, pos, row);
        if (!clique.empty()) {
            m.clique_gas = parse_uint_field(clique, "clique_gas", row);
            m.clique_exact = parse_uint_field(exact, "clique_exact", row) != 0;
        } else if (!exact.empty()) {
            throw StatsError{"row " + std::to_string(row) + ": clique_exact without clique_gas"};
        }
        m.schedule_gas = parse_uint_field(csv_field(line, pos, row), "schedule_gas", row);
        m.heaviest_tx_gas = parse_uint_field(csv_field(line, pos, row), "heaviest_tx_gas", row);
        m.dependency_count = parse_uint_field(csv_field(line, pos, row), "dependency_count", row);
        m.speedup_lower = parse_double_field(csv_field(line, pos, row), "speedup_lower", row);
        m.speedup_upper = parse_double_field(csv_field(line, pos, row), "speedup_upper", row);
        m.speedup_loose = parse_double_field(csv_field(line, pos, row), "speedup_loose", row);
        if (pos != std::string::npos) {
            throw StatsError{"row " + std::to_string(row) + ": too many fields"};
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<BlockRecord> load_metrics_csv(const std::filesystem::path& path) {
    std::ifstream input{path};
    if (!input) {
        throw StatsError{"cannot open metrics file: " + path.string()};
    }
    return parse_metrics_csv(input);
}

}  // namespace txparallax
