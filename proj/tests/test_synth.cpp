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

#include <algorithm>
#include <sstream>
#include <tuple>
#include <vector>

#include <txparallax/analyze.hpp>
#include <txparallax/disentangle.hpp>
#include <txparallax/graph.hpp>
#include <txparallax/ingest.hpp>
#include <txparallax/synth.hpp>

using namespace txparallax;

namespace {

bool starts_with_selector(const std::vector<std::uint8_t>& input, const Selector& selector) {
    return input.size() >= 4 && std::equal(selector.begin(), selector.end(), input.begin());
}

}  // namespace

TEST_CASE("generation is deterministic") {
    const WorkloadProfile profile = WorkloadProfile::preset("defi");
    const BlockTrace a = generate_block(profile, 17);
    const BlockTrace b = generate_block(profile, 17);
    CHECK(emit_block_json(a) == emit_block_json(b));
}

TEST_CASE("different seeds and numbers give different blocks") {
    WorkloadProfile profile = WorkloadProfile::preset("defi");
    const BlockTrace base = generate_block(profile, 17);
    CHECK(emit_block_json(base) != emit_block_json(generate_block(profile, 18)));
    profile.seed = 2;
    CHECK(emit_block_json(base) != emit_block_json(generate_block(profile, 17)));
}

TEST_CASE("every preset produces blocks that pass ingest validation") {
    for (const char* name : {"pre-defi", "defi", "recent"}) {
        const WorkloadProfile profile = WorkloadProfile::preset(name);
        for (std::uint64_t number = 0; number < 5; ++number) {
            const BlockTrace block = generate_block(profile, number);
            CAPTURE(name);
            CAPTURE(number);
            CHECK_NOTHROW(validate_block(block));
            CHECK(block.number == number);
            CHECK(block.timestamp ==
                  profile.first_timestamp + profile.block_interval * number);
            CHECK(block.transactions.size() >= profile.tx_count_min);
            CHECK(block.transactions.size() <= profile.tx_count_max);

            std::uint64_t sum = 0;
            for (const Transaction& tx : block.transactions) {
                sum += tx.gas_used;
            }
            CHECK(block.gas_used == sum);
        }
    }
}

TEST_CASE("token transfers carry decodable calldata") {
    const WorkloadProfile profile = WorkloadProfile::preset("defi");
    const DisentangleConfig cfg = DisentangleConfig::mainnet_defaults();
    const BlockTrace block = generate_block(profile, 9);

    std::size_t transfers = 0;
    for (const Transaction& tx : block.transactions) {
        const CallFrame& root = tx.root_call;
        if (!cfg.is_token(root.to) ||
            !starts_with_selector(root.input, kSelectorTransfer)) {
            continue;
        }
        ++transfers;
        REQUIRE(root.input.size() == 68);
        DisentangleStats stats;
        const auto scopes = rewrite_erc20(root, tx.sender, cfg, &stats);
        CHECK(stats.rewritten_calls == 1);
        CHECK(stats.malformed_calldata == 0);
        CHECK(scopes.size() == 2);
    }
    CHECK(transfers > 10);  // the defi preset is transfer-heavy
}

TEST_CASE("swaps route sender through a router into a pool") {
    const WorkloadProfile profile = WorkloadProfile::preset("defi");
    const DisentangleConfig cfg = DisentangleConfig::mainnet_defaults();
    const BlockTrace block = generate_block(profile, 12);

    std::size_t swaps = 0;
    for (const Transaction& tx : block.transactions) {
        const CallFrame& root = tx.root_call;
        if (!cfg.is_router(root.to)) {
            continue;
        }
        ++swaps;
        CHECK(root.from == tx.sender);
        REQUIRE(root.children.size() == 3);

        // reserve probe, transferFrom pull, then the pool swap
        const CallFrame& probe = root.children[0];
        CHECK(probe.kind == CallKind::kStaticCall);
        CHECK(starts_with_selector(probe.input, kSelectorBalanceOf));

        const CallFrame& pull = root.children[1];
        CHECK(pull.kind == CallKind::kCall);
        CHECK(starts_with_selector(pull.input, kSelectorTransferFrom));

        const CallFrame& swap = root.children[2];
        CHECK(swap.from == root.to);
        REQUIRE(swap.children.size() == 1);
        CHECK(swap.children[0].from == swap.to);
        CHECK(starts_with_selector(swap.children[0].input, kSelectorTransfer));
    }
    CHECK(swaps > 5);
}

TEST_CASE("the defi era entangles much harder than the early era") {
    std::uint64_t pre_defi_cc = 0;
    std::uint64_t pre_defi_total = 0;
    std::uint64_t defi_cc = 0;
    std::uint64_t defi_total = 0;
    for (const auto& [name, cc, total] :
         {std::tuple{"pre-defi", &pre_defi_cc, &pre_defi_total},
          std::tuple{"defi", &defi_cc, &defi_total}}) {
        const WorkloadProfile profile = WorkloadProfile::preset(name);
        for (std::uint64_t number = 0; number < 10; ++number) {
            const std::vector<BlockTrace> blocks{generate_block(profile, number)};
            const TxGraph g = build_tx_graph(blocks, ConflictMode::kWriteAware, nullptr);
            *cc += heaviest_component(g).gas;
            *total += blocks[0].gas_used;
        }
    }
    const double pre_defi_share =
        static_cast<double>(pre_defi_cc) / static_cast<double>(pre_defi_total);
    const double defi_share = static_cast<double>(defi_cc) / static_cast<double>(defi_total);
    CHECK(defi_share > pre_defi_share + 0.2);
}

TEST_CASE("unknown presets are rejected") {
    CHECK_THROWS_AS(WorkloadProfile::preset("classic"), SynthError);
}

TEST_CASE("profile validation rejects bad shapes") {
    WorkloadProfile profile = WorkloadProfile::preset("defi");
    SUBCASE("fractions must sum to one") {
        profile.plain_fraction = 0.9;
        CHECK_THROWS_AS(profile.validate(), SynthError);
    }
    SUBCASE("negative fractions") {
        profile.plain_fraction -= 0.1;
        profile.token_fraction += 0.2;
        profile.heavy_fraction -= 0.1;
        CHECK_THROWS_AS(profile.validate(), SynthError);
    }
    SUBCASE("empty count range") {
        profile.tx_count_min = 10;
        profile.tx_count_max = 9;
        CHECK_THROWS_AS(profile.validate(), SynthError);
    }
    SUBCASE("swaps need hubs") {
        profile.token_hubs = 1;
        CHECK_THROWS_AS(profile.validate(), SynthError);
    }
    SUBCASE("gas medians must be positive") {
        profile.heavy_gas.median = 0;
        CHECK_THROWS_AS(profile.validate(), SynthError);
    }
    SUBCASE("bias must be a probability") {
        profile.token_hub_bias = 1.5;
        CHECK_THROWS_AS(profile.validate(), SynthError);
    }
    SUBCASE("the presets themselves validate") {
        CHECK_NOTHROW(WorkloadProfile::preset("pre-defi").validate());
        CHECK_NOTHROW(WorkloadProfile::preset("defi").validate());
        CHECK_NOTHROW(WorkloadProfile::preset("recent").validate());
    }
}

TEST_CASE("generated blocks survive an emit and reload round-trip") {
    const WorkloadProfile profile = WorkloadProfile::preset("recent");
    std::vector<BlockTrace> blocks;
    for (std::uint64_t number = 3; number < 6; ++number) {
        blocks.push_back(generate_block(profile, number));
    }
    std::stringstream stream;
    emit_trace_file(stream, blocks);
    const auto reloaded = parse_trace_file(stream);
    REQUIRE(reloaded.size() == blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        CHECK(emit_block_json(reloaded[i]) == emit_block_json(blocks[i]));
    }
}
