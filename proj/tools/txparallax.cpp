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

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <txparallax/aggregate.hpp>
#include <txparallax/graph.hpp>
#include <txparallax/ingest.hpp>
#include <txparallax/pipeline.hpp>
#include <txparallax/rpc.hpp>
#include <txparallax/sampling.hpp>
#include <txparallax/synth.hpp>

namespace {

using namespace txparallax;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitRpc = 3;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

//! Output sink: named file, or stdout when the path is empty.
void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(path, text);
    }
}

// ---------------------------------------------------------------------------
// shared option blocks

struct InputOptions {
    std::string traces_path;
    std::string synth_preset;
    std::uint64_t synth_blocks = 0;
    std::uint64_t start_block = 0;
    std::optional<std::uint64_t> seed;
    std::string rpc_url;
    std::vector<std::uint64_t> rpc_blocks;
    std::string block_list_path;
};

struct RpcFlags {
    std::string trace_method = "trace_block";
    int attempts = 5;
    std::uint64_t backoff_ms = 250;
    std::uint64_t timeout_ms = 30000;
    int parallel = 8;
};

void add_rpc_flags(CLI::App* cmd, RpcFlags& flags) {
    cmd->add_option("--trace-method", flags.trace_method,
                    "JSON-RPC method for flat block traces")
        ->capture_default_str();
    cmd->add_option("--attempts", flags.attempts, "max RPC attempts per request")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--backoff-ms", flags.backoff_ms, "base backoff between retries")
        ->capture_default_str();
    cmd->add_option("--timeout-ms", flags.timeout_ms, "per-request timeout")
        ->capture_default_str();
    cmd->add_option("--parallel", flags.parallel, "max in-flight block fetches")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

std::string resolve_rpc_url(const std::string& flag_value) {
    if (!flag_value.empty()) {
        return flag_value;
    }
    if (const char* env = std::getenv("TXPARALLAX_RPC_URL"); env != nullptr && *env != '\0') {
        return env;
    }
    throw UsageError{"no RPC endpoint: pass --rpc or set TXPARALLAX_RPC_URL"};
}

RpcConfig make_rpc_config(const std::string& url_flag, const RpcFlags& flags) {
    RpcConfig config;
    config.url = resolve_rpc_url(url_flag);
    config.trace_method = flags.trace_method;
    config.max_attempts = flags.attempts;
    config.backoff_base = std::chrono::milliseconds{flags.backoff_ms};
    config.timeout = std::chrono::milliseconds{flags.timeout_ms};
    config.parallel_requests = flags.parallel;
    return config;
}

std::vector<std::uint64_t> read_block_list(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) {
        throw std::runtime_error("cannot open block list " + path.string());
    }
    std::vector<std::uint64_t> numbers;
    std::uint64_t value = 0;
    while (in >> value) {
        numbers.push_back(value);
    }
    if (!in.eof()) {
        throw std::runtime_error("block list " + path.string() +
                                 " contains a non-numeric entry");
    }
    return numbers;
}

std::vector<std::uint64_t> gather_block_numbers(const InputOptions& input) {
    std::vector<std::uint64_t> numbers = input.rpc_blocks;
    if (!input.block_list_path.empty()) {
        const auto listed = read_block_list(input.block_list_path);
        numbers.insert(numbers.end(), listed.begin(), listed.end());
    }
    std::sort(numbers.begin(), numbers.end());
    numbers.erase(std::unique(numbers.begin(), numbers.end()), numbers.end());
    if (numbers.empty()) {
        throw UsageError{"no block numbers: pass --block or --block-list"};
    }
    return numbers;
}

std::vector<BlockTrace> generate_synth_blocks(const InputOptions& input) {
    WorkloadProfile profile = WorkloadProfile::preset(input.synth_preset);
    if (input.seed) {
        profile.seed = *input.seed;
    }
    if (input.synth_blocks == 0) {
        throw UsageError{"--synth requires --blocks N (N >= 1)"};
    }
    std::vector<BlockTrace> blocks;
    blocks.reserve(input.synth_blocks);
    for (std::uint64_t i = 0; i < input.synth_blocks; ++i) {
        blocks.push_back(generate_block(profile, input.start_block + i));
    }
    return blocks;
}

//! Materializes the configured input source. Exactly one source must be
//! selected; violations are usage errors.
std::vector<BlockTrace> load_input_blocks(const InputOptions& input, const RpcFlags& rpc) {
    const int sources = (!input.traces_path.empty() ? 1 : 0) +
                        (!input.synth_preset.empty() ? 1 : 0) +
                        (!input.rpc_url.empty() || !input.rpc_blocks.empty() ||
                                 !input.block_list_path.empty()
                             ? 1
                             : 0);
    if (sources != 1) {
        throw UsageError{"exactly one input source: --traces, --synth, or --rpc"};
    }
    if (!input.traces_path.empty()) {
        std::vector<BlockTrace> blocks = load_trace_file(input.traces_path);
        std::cerr << "loaded " << blocks.size() << " blocks from " << input.traces_path << "\n";
        return blocks;
    }
    if (!input.synth_preset.empty()) {
        std::vector<BlockTrace> blocks = generate_synth_blocks(input);
        std::cerr << "generated " << blocks.size() << " synthetic blocks (preset "
                  << input.synth_preset << ")\n";
        return blocks;
    }
    const RpcClient client{make_rpc_config(input.rpc_url, rpc)};
    const std::vector<std::uint64_t> numbers = gather_block_numbers(input);
    std::cerr << "fetching " << numbers.size() << " blocks from " << client.config().url << "\n";
    std::vector<BlockTrace> blocks = client.fetch_blocks(numbers);
    std::cerr << "fetched " << blocks.size() << " blocks\n";
    return blocks;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeFlags {
    InputOptions input;
    RpcFlags rpc;
    std::string conflict_mode = "write-aware";
    std::string disentangle_path;
    std::size_t batch_size = 1;
    bool clique = false;
    std::uint64_t clique_budget_ms = 10000;
    std::string schedule = "earliest-start";
    std::string window = "daily";
    std::string format = "csv";
    int jobs = 0;
    std::string out_path;
    std::string out_aggregate_path;
    std::string dump_dir;
};

void add_input_flags(CLI::App* cmd, InputOptions& input, bool with_rpc, RpcFlags* rpc) {
    cmd->add_option("--traces", input.traces_path, "newline-delimited trace file");
    cmd->add_option("--synth", input.synth_preset,
                    "synthetic workload preset: pre-defi, defi, recent");
    cmd->add_option("--blocks", input.synth_blocks, "number of synthetic blocks");
    cmd->add_option("--start-block", input.start_block, "first synthetic block number")
        ->capture_default_str();
    cmd->add_option("--seed", input.seed, "synthetic workload seed (default: preset seed)");
    if (with_rpc) {
        cmd->add_option("--rpc", input.rpc_url,
                        "JSON-RPC endpoint (or TXPARALLAX_RPC_URL)");
        cmd->add_option("--block", input.rpc_blocks, "block number to fetch (repeatable)");
        cmd->add_option("--block-list", input.block_list_path,
                        "file with one block number per line");
        add_rpc_flags(cmd, *rpc);
    }
}

PipelineOptions make_pipeline_options(const AnalyzeFlags& flags) {
    PipelineOptions opts;
    const auto mode = conflict_mode_from_name(flags.conflict_mode);
    if (!mode) {
        throw UsageError{"unknown conflict mode \"" + flags.conflict_mode +
                         "\" (write-aware, any-touch)"};
    }
    opts.mode = *mode;
    if (!flags.disentangle_path.empty()) {
        opts.rewrites = DisentangleConfig::load_file(flags.disentangle_path);
    }
    if (flags.batch_size == 0) {
        throw UsageError{"--batch-size must be at least 1"};
    }
    opts.batch_size = flags.batch_size;
    const auto schedule = schedule_mode_from_name(flags.schedule);
    if (!schedule) {
        throw UsageError{"unknown schedule mode \"" + flags.schedule +
                         "\" (earliest-start, barrier-rounds)"};
    }
    opts.analyze.schedule_mode = *schedule;
    opts.analyze.compute_clique = flags.clique;
    opts.analyze.clique_budget = std::chrono::milliseconds{flags.clique_budget_ms};
    opts.jobs = flags.jobs;
    return opts;
}

void dump_batch_graphs(const std::filesystem::path& dir, std::span<const BlockTrace> blocks,
                       const PipelineOptions& opts) {
    std::filesystem::create_directories(dir);
    for (const auto batch : merge_blocks(blocks, opts.batch_size)) {
        const DisentangleConfig* rewrites = opts.rewrites ? &*opts.rewrites : nullptr;
        const BatchScopes scopes = collect_scopes(batch, rewrites);
        const TxGraph tg = tx_graph_from_scopes(scopes, opts.mode);
        const AddressGraph ag = build_address_graph(batch, rewrites);
        const std::string stem =
            std::to_string(scopes.first_block) + "_" + std::to_string(scopes.last_block);
        write_text_file(dir / ("tg_" + stem + ".json"), dump_tx_graph(tg) + "\n");
        write_text_file(dir / ("ag_" + stem + ".json"), dump_address_graph(ag) + "\n");
    }
    std::cerr << "graph dumps written to " << dir.string() << "\n";
}

int cmd_analyze(const AnalyzeFlags& flags) {
    const PipelineOptions opts = make_pipeline_options(flags);
    const auto window = window_from_name(flags.window);
    if (!window) {
        throw UsageError{"unknown window \"" + flags.window + "\" (daily, monthly)"};
    }
    if (flags.format != "csv" && flags.format != "json") {
        throw UsageError{"unknown aggregate format \"" + flags.format + "\" (csv, json)"};
    }

    const std::vector<BlockTrace> blocks = load_input_blocks(flags.input, flags.rpc);
    const std::vector<BlockRecord> records = analyze_blocks(blocks, opts);
    if (records.empty()) {
        throw std::runtime_error("no complete batches to analyze (batch size " +
                                 std::to_string(opts.batch_size) + ", " +
                                 std::to_string(blocks.size()) + " blocks)");
    }
    std::cerr << "analyzed " << records.size() << " record(s), conflict mode "
              << conflict_mode_name(opts.mode) << ", batch size " << opts.batch_size << "\n";
    if (opts.rewrites) {
        DisentangleStats totals;
        for (const BlockRecord& record : records) {
            totals += record.stats;
        }
        std::cerr << "disentangled: " << totals.rewritten_calls << " token calls rewritten ("
                  << totals.malformed_calldata << " malformed), " << totals.rerouted_frames
                  << " frames rerouted (" << totals.dropped_frames << " dropped)\n";
    }

    if (!flags.out_path.empty()) {
        write_text_file(flags.out_path, render_metrics_csv(records));
        std::cerr << "per-block metrics written to " << flags.out_path << "\n";
    }

    const std::vector<MetricRecord> metric_records = to_metric_records(records);
    const std::vector<AggregateRow> rows = aggregate(metric_records, *window);
    const std::string report =
        flags.format == "json" ? render_aggregate_json(rows) : render_aggregate_csv(rows);
    write_output(flags.out_aggregate_path, report);
    if (!flags.out_aggregate_path.empty()) {
        std::cerr << "aggregate report written to " << flags.out_aggregate_path << "\n";
    }

    if (!flags.dump_dir.empty()) {
        dump_batch_graphs(flags.dump_dir, blocks, opts);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthFlags {
    std::string preset;
    std::uint64_t blocks = 0;
    std::uint64_t start_block = 0;
    std::optional<std::uint64_t> seed;
    std::string out_path;
};

int cmd_synth(const SynthFlags& flags) {
    InputOptions input;
    input.synth_preset = flags.preset;
    input.synth_blocks = flags.blocks;
    input.start_block = flags.start_block;
    input.seed = flags.seed;
    const std::vector<BlockTrace> blocks = generate_synth_blocks(input);
    std::ostringstream buffer;
    emit_trace_file(buffer, blocks);
    write_output(flags.out_path, buffer.str());
    std::cerr << "generated " << blocks.size() << " blocks (preset " << flags.preset << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sample

struct SampleFlags {
    std::string ranges_path;
    std::uint64_t seed = 0;
    std::size_t per_day = 65;
    std::string out_path;
};

int cmd_sample(const SampleFlags& flags) {
    const std::vector<DayBlockRange> ranges = load_day_ranges_csv(flags.ranges_path);
    const std::vector<std::uint64_t> numbers =
        plan_samples(ranges, SamplePlan{flags.seed, flags.per_day});
    std::string out;
    for (const std::uint64_t number : numbers) {
        out += std::to_string(number);
        out += '\n';
    }
    write_output(flags.out_path, out);
    std::cerr << "sampled " << numbers.size() << " blocks over " << ranges.size() << " day(s)\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fetch

struct FetchFlags {
    std::string rpc_url;
    std::vector<std::uint64_t> blocks;
    std::string block_list_path;
    RpcFlags rpc;
    std::string out_path;
};

int cmd_fetch(const FetchFlags& flags) {
    InputOptions input;
    input.rpc_url = flags.rpc_url;
    input.rpc_blocks = flags.blocks;
    input.block_list_path = flags.block_list_path;
    const RpcClient client{make_rpc_config(flags.rpc_url, flags.rpc)};
    const std::vector<std::uint64_t> numbers = gather_block_numbers(input);
    std::cerr << "fetching " << numbers.size() << " blocks from " << client.config().url << "\n";
    const std::vector<BlockTrace> blocks = client.fetch_blocks(numbers);
    std::ostringstream buffer;
    emit_trace_file(buffer, blocks);
    write_output(flags.out_path, buffer.str());
    std::cerr << "fetched " << blocks.size() << " blocks\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// aggregate

struct AggregateFlags {
    std::string metrics_path;
    std::string window = "daily";
    std::string format = "csv";
    std::string out_path;
};

int cmd_aggregate(const AggregateFlags& flags) {
    const auto window = window_from_name(flags.window);
    if (!window) {
        throw UsageError{"unknown window \"" + flags.window + "\" (daily, monthly)"};
    }
    if (flags.format != "csv" && flags.format != "json") {
        throw UsageError{"unknown aggregate format \"" + flags.format + "\" (csv, json)"};
    }
    const std::vector<BlockRecord> records = load_metrics_csv(flags.metrics_path);
    const std::vector<MetricRecord> metric_records = to_metric_records(records);
    const std::vector<AggregateRow> rows = aggregate(metric_records, *window);
    write_output(flags.out_path,
                 flags.format == "json" ? render_aggregate_json(rows)
                                        : render_aggregate_csv(rows));
    std::cerr << "aggregated " << records.size() << " records into " << rows.size()
              << " rows\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transaction conflict graph analyzer"};
    app.require_subcommand(1);

    AnalyzeFlags analyze;
    CLI::App* analyze_cmd = app.add_subcommand(
        "analyze", "build conflict graphs and compute parallelizability bounds");
    add_input_flags(analyze_cmd, analyze.input, true, &analyze.rpc);
    analyze_cmd->add_option("--conflict-mode", analyze.conflict_mode,
                            "write-aware or any-touch")
        ->capture_default_str();
    analyze_cmd->add_option("--disentangle", analyze.disentangle_path,
                            "disentangle config JSON (omit to disable rewrites)");
    analyze_cmd->add_option("--batch-size", analyze.batch_size,
                            "merge k consecutive blocks per record")
        ->capture_default_str();
    analyze_cmd->add_flag("--clique", analyze.clique,
                          "compute the exact max-weight clique bound");
    analyze_cmd->add_option("--clique-budget-ms", analyze.clique_budget_ms,
                            "clique search budget per record")
        ->capture_default_str();
    analyze_cmd->add_option("--schedule", analyze.schedule,
                            "earliest-start or barrier-rounds")
        ->capture_default_str();
    analyze_cmd->add_option("--window", analyze.window, "aggregate window: daily or monthly")
        ->capture_default_str();
    analyze_cmd->add_option("--format", analyze.format, "aggregate format: csv or json")
        ->capture_default_str();
    analyze_cmd->add_option("--jobs", analyze.jobs,
                            "worker threads (0 = all available processors)")
        ->capture_default_str();
    analyze_cmd->add_option("--out", analyze.out_path, "per-block metrics CSV path");
    analyze_cmd->add_option("--out-aggregate", analyze.out_aggregate_path,
                            "aggregate report path (default: stdout)");
    analyze_cmd->add_option("--dump-graphs", analyze.dump_dir,
                            "write canonical graph JSON dumps into this directory");

    SynthFlags synth;
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "generate a deterministic synthetic trace file");
    synth_cmd->add_option("--preset", synth.preset, "pre-defi, defi, or recent")->required();
    synth_cmd->add_option("--blocks", synth.blocks, "number of blocks")->required();
    synth_cmd->add_option("--start-block", synth.start_block, "first block number")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "workload seed (default: preset seed)");
    synth_cmd->add_option("--out", synth.out_path, "trace file path (default: stdout)");

    SampleFlags sample;
    CLI::App* sample_cmd =
        app.add_subcommand("sample", "draw per-day block samples from day ranges");
    sample_cmd->add_option("--ranges", sample.ranges_path,
                           "CSV with day,first_block,last_block")
        ->required();
    sample_cmd->add_option("--seed", sample.seed, "sampling seed")->capture_default_str();
    sample_cmd->add_option("--per-day", sample.per_day, "blocks sampled per day")
        ->capture_default_str();
    sample_cmd->add_option("--out", sample.out_path,
                           "output path, one block number per line (default: stdout)");

    FetchFlags fetch;
    CLI::App* fetch_cmd =
        app.add_subcommand("fetch", "fetch block traces from a JSON-RPC archive node");
    fetch_cmd->add_option("--rpc", fetch.rpc_url, "JSON-RPC endpoint (or TXPARALLAX_RPC_URL)");
    fetch_cmd->add_option("--block", fetch.blocks, "block number to fetch (repeatable)");
    fetch_cmd->add_option("--block-list", fetch.block_list_path,
                          "file with one block number per line");
    add_rpc_flags(fetch_cmd, fetch.rpc);
    fetch_cmd->add_option("--out", fetch.out_path, "trace file path (default: stdout)");

    AggregateFlags agg;
    CLI::App* agg_cmd =
        app.add_subcommand("aggregate", "window and aggregate a per-block metrics CSV");
    agg_cmd->add_option("--metrics", agg.metrics_path, "per-block metrics CSV from analyze")
        ->required();
    agg_cmd->add_option("--window", agg.window, "daily or monthly")->capture_default_str();
    agg_cmd->add_option("--format", agg.format, "csv or json")->capture_default_str();
    agg_cmd->add_option("--out", agg.out_path, "report path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(analyze_cmd)) return cmd_analyze(analyze);
        if (app.got_subcommand(synth_cmd)) return cmd_synth(synth);
        if (app.got_subcommand(sample_cmd)) return cmd_sample(sample);
        if (app.got_subcommand(fetch_cmd)) return cmd_fetch(fetch);
        if (app.got_subcommand(agg_cmd)) return cmd_aggregate(agg);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const RpcError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRpc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
