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

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef TXPARALLAX_CLI_PATH
#error "TXPARALLAX_CLI_PATH must point at the txparallax binary"
#endif
#ifndef TXPARALLAX_FIXTURE_DIR
#error "TXPARALLAX_FIXTURE_DIR must point at the fixture directory"
#endif

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code{-1};
    std::string output;  // stdout only
};

CliResult run_cli(const std::string& args) {
    const std::string command = std::string{TXPARALLAX_CLI_PATH} + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
        result.output.append(buffer, n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

//! Scratch directory shared by the whole test binary run.
const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        const fs::path d =
            fs::temp_directory_path() / ("txparallax_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in{path, std::ios::binary};
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::size_t count_lines(const std::string& text) {
    std::size_t lines = 0;
    for (const char c : text) {
        if (c == '\n') {
            ++lines;
        }
    }
    return lines;
}

const std::string kFixtureDir = TXPARALLAX_FIXTURE_DIR;

}  // namespace

TEST_CASE("missing subcommands and unknown flags are usage errors") {
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("analyze --no-such-flag").exit_code == 1);
    CHECK(run_cli("synth --preset defi").exit_code == 1);  // --blocks is required
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("analyze --help").exit_code == 0);
}

TEST_CASE("analyze demands exactly one input source") {
    CHECK(run_cli("analyze").exit_code == 1);
    CHECK(run_cli("analyze --synth defi --blocks 2 --traces x.jsonl").exit_code == 1);
}

TEST_CASE("bad input files are input errors") {
    CHECK(run_cli("analyze --traces /nonexistent/missing.jsonl").exit_code == 2);
    CHECK(run_cli("analyze --synth no-such-preset --blocks 2").exit_code == 2);
}

TEST_CASE("bad enum values are usage errors") {
    CHECK(run_cli("analyze --synth defi --blocks 2 --conflict-mode both").exit_code == 1);
    CHECK(run_cli("analyze --synth defi --blocks 2 --schedule asap").exit_code == 1);
    CHECK(run_cli("analyze --synth defi --blocks 2 --window weekly").exit_code == 1);
    CHECK(run_cli("analyze --synth defi --blocks 2 --format xml").exit_code == 1);
    CHECK(run_cli("analyze --synth defi --blocks 2 --batch-size 0").exit_code == 1);
}

TEST_CASE("unreachable RPC endpoints exit with the RPC code") {
    CHECK(run_cli("fetch --rpc http://127.0.0.1:1 --block 5 --attempts 1 --backoff-ms 1")
              .exit_code == 3);
    CHECK(run_cli("analyze --rpc http://127.0.0.1:1 --block 5 --attempts 1 --backoff-ms 1")
              .exit_code == 3);
}

TEST_CASE("synth emits deterministic trace files") {
    const fs::path first = scratch_dir() / "synth_a.jsonl";
    const fs::path second = scratch_dir() / "synth_b.jsonl";
    CHECK(run_cli("synth --preset defi --blocks 3 --seed 5 --out " + first.string())
              .exit_code == 0);
    CHECK(run_cli("synth --preset defi --blocks 3 --seed 5 --out " + second.string())
              .exit_code == 0);
    const std::string body = read_file(first);
    CHECK(body == read_file(second));
    CHECK(count_lines(body) == 3);

    const auto to_stdout = run_cli("synth --preset defi --blocks 3 --seed 5");
    CHECK(to_stdout.exit_code == 0);
    CHECK(to_stdout.output == body);
}

TEST_CASE("analyze batches, writes metrics and aggregates deterministically") {
    const fs::path metrics_a = scratch_dir() / "metrics_a.csv";
    const fs::path metrics_b = scratch_dir() / "metrics_b.csv";
    const fs::path agg_a = scratch_dir() / "agg_a.csv";
    const fs::path agg_b = scratch_dir() / "agg_b.csv";
    const std::string base =
        "analyze --synth defi --blocks 50 --batch-size 10 --seed 7 --disentangle " +
        kFixtureDir + "/../config/default.json";
    CHECK(run_cli(base + " --out " + metrics_a.string() + " --out-aggregate " + agg_a.string())
              .exit_code == 0);
    CHECK(run_cli(base + " --jobs 3 --out " + metrics_b.string() + " --out-aggregate " +
                  agg_b.string())
              .exit_code == 0);

    const std::string metrics = read_file(metrics_a);
    CHECK(metrics == read_file(metrics_b));
    CHECK(count_lines(metrics) == 6);  // header plus five batch records
    CHECK(metrics.rfind("first_block,last_block,timestamp,", 0) == 0);
    CHECK(metrics.find("\n0,9,") != std::string::npos);
    CHECK(metrics.find("\n40,49,") != std::string::npos);

    const std::string agg = read_file(agg_a);
    CHECK(agg == read_file(agg_b));
    CHECK(agg.rfind("window_key,metric,mean,ci_low,ci_high,p90,p99,count\n", 0) == 0);
}

TEST_CASE("analyze reads trace files and prints the aggregate to stdout") {
    const auto result =
        run_cli("analyze --traces " + kFixtureDir + "/golden_3blocks.jsonl");
    CHECK(result.exit_code == 0);
    CHECK(result.output.rfind("window_key,metric,mean,", 0) == 0);
    CHECK(result.output.find("tx_count") != std::string::npos);
}

TEST_CASE("json aggregate output is valid") {
    const auto result = run_cli("analyze --traces " + kFixtureDir +
                                "/golden_3blocks.jsonl --format json");
    CHECK(result.exit_code == 0);
    CHECK(result.output.front() == '[');
    CHECK(result.output.find("\"metric\":\"total_gas\"") != std::string::npos);
}

TEST_CASE("the aggregate subcommand re-windows existing metrics") {
    const fs::path metrics = scratch_dir() / "metrics_for_agg.csv";
    CHECK(run_cli("analyze --synth defi --blocks 6 --seed 7 --out " + metrics.string() +
                  " --out-aggregate /dev/null")
              .exit_code == 0);
    const auto monthly =
        run_cli("aggregate --metrics " + metrics.string() + " --window monthly");
    CHECK(monthly.exit_code == 0);
    CHECK(monthly.output.rfind("window_key,metric,mean,", 0) == 0);
    CHECK(monthly.output.find("2022-08,") != std::string::npos);

    CHECK(run_cli("aggregate --metrics /nonexistent.csv").exit_code == 2);
}

TEST_CASE("graph dumps are written per batch") {
    const fs::path dumps = scratch_dir() / "dumps";
    CHECK(run_cli("analyze --synth defi --blocks 4 --batch-size 2 --seed 7 --dump-graphs " +
                  dumps.string() + " --out-aggregate /dev/null")
              .exit_code == 0);
    CHECK(fs::exists(dumps / "tg_0_1.json"));
    CHECK(fs::exists(dumps / "ag_0_1.json"));
    CHECK(fs::exists(dumps / "tg_2_3.json"));
    CHECK(fs::exists(dumps / "ag_2_3.json"));
    const std::string tg = read_file(dumps / "tg_0_1.json");
    CHECK(tg.rfind("{\"first_block\":0,\"last_block\":1,", 0) == 0);
}

TEST_CASE("the clique flag adds the exact bound") {
    const fs::path metrics = scratch_dir() / "metrics_clique.csv";
    CHECK(run_cli("analyze --synth pre-defi --blocks 2 --seed 7 --clique --out " +
                  metrics.string() + " --out-aggregate /dev/null")
              .exit_code == 0);
    const std::string body = read_file(metrics);
    // clique_gas and clique_exact land in columns 7 and 8 of each data row
    std::istringstream lines{body};
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        std::size_t pos = 0;
        for (int field = 0; field < 6; ++field) {
            pos = line.find(',', pos) + 1;
        }
        CHECK(line[pos] != ',');  // clique_gas is present
    }
}

TEST_CASE("sample draws deterministic per-day block numbers") {
    const fs::path ranges = scratch_dir() / "ranges.csv";
    std::ofstream{ranges} << "day,first_block,last_block\n"
                          << "2022-08-08,1000,1999\n"
                          << "2022-08-09,2000,2999\n";
    const auto first = run_cli("sample --ranges " + ranges.string() + " --seed 3 --per-day 4");
    CHECK(first.exit_code == 0);
    CHECK(count_lines(first.output) == 8);
    const auto second = run_cli("sample --ranges " + ranges.string() + " --seed 3 --per-day 4");
    CHECK(second.output == first.output);
    const auto other_seed =
        run_cli("sample --ranges " + ranges.string() + " --seed 4 --per-day 4");
    CHECK(other_seed.output != first.output);

    CHECK(run_cli("sample --ranges " + ranges.string() + " --per-day 0").exit_code == 2);
    CHECK(run_cli("sample --ranges /nonexistent.csv").exit_code == 2);
}
