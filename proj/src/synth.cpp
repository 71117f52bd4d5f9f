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

#include <txparallax/synth.hpp>

#include <cmath>
#include <string>

#include <txparallax/disentangle.hpp>
#include <txparallax/rng.hpp>

namespace txparallax {

namespace {

constexpr std::uint8_t kRoleUser = 0x01;
constexpr std::uint8_t kRoleToken = 0x02;
constexpr std::uint8_t kRoleRouter = 0x03;
constexpr std::uint8_t kRolePool = 0x04;
constexpr std::uint8_t kRoleContract = 0x05;
constexpr std::uint8_t kRoleMarket = 0x06;
constexpr std::uint8_t kRoleInner = 0x07;

//! Synthetic addresses live in their own prefix space so they can never
//! collide with the mainnet hub constants.
Address synth_address(std::uint8_t role, std::uint64_t index) {
    Address address;
    address.bytes[0] = 0x53;
    address.bytes[1] = role;
    for (int i = 0; i < 8; ++i) {
        address.bytes[19 - i] = static_cast<std::uint8_t>(index >> (8 * i));
    }
    return address;
}

//! The first hubs are the real mainnet contracts so the default
//! disentangle config applies to generated workloads; extra hubs stay
//! synthetic and therefore entangled.
Address token_hub(std::uint32_t index) {
    switch (index) {
        case 0: return mainnet::weth();
        case 1: return mainnet::usdc();
        case 2: return mainnet::usdt();
        case 3: return mainnet::dai();
        case 4: return mainnet::link();
        default: return synth_address(kRoleToken, index);
    }
}

Address router_hub(std::uint32_t index) {
    switch (index) {
        case 0: return mainnet::uniswap_v2_router();
        case 1: return mainnet::uniswap_v3_router();
        case 2: return mainnet::sushiswap_router();
        case 3: return mainnet::oneinch_router();
        case 4: return mainnet::uniswap_v3_router02();
        default: return synth_address(kRoleRouter, index);
    }
}

Hash32 synth_hash(SplitMix64& rng) {
    Hash32 hash;
    for (int word = 0; word < 4; ++word) {
        const std::uint64_t value = rng.next();
        for (int i = 0; i < 8; ++i) {
            hash.bytes[static_cast<std::size_t>(word * 8 + i)] =
                static_cast<std::uint8_t>(value >> (8 * (7 - i)));
        }
    }
    return hash;
}

void append_selector(std::vector<std::uint8_t>& out, const Selector& selector) {
    out.insert(out.end(), selector.begin(), selector.end());
}

void append_word_address(std::vector<std::uint8_t>& out, const Address& address) {
    out.insert(out.end(), 12, 0);
    out.insert(out.end(), address.bytes.begin(), address.bytes.end());
}

void append_word_uint(std::vector<std::uint8_t>& out, std::uint64_t value) {
    out.insert(out.end(), 24, 0);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(value >> (8 * (7 - i))));
    }
}

std::vector<std::uint8_t> transfer_input(const Address& to, std::uint64_t amount) {
    std::vector<std::uint8_t> out;
    out.reserve(68);
    append_selector(out, kSelectorTransfer);
    append_word_address(out, to);
    append_word_uint(out, amount);
    return out;
}

std::vector<std::uint8_t> transfer_from_input(const Address& from, const Address& to,
                                              std::uint64_t amount) {
    std::vector<std::uint8_t> out;
    out.reserve(100);
    append_selector(out, kSelectorTransferFrom);
    append_word_address(out, from);
    append_word_address(out, to);
    append_word_uint(out, amount);
    return out;
}

std::vector<std::uint8_t> balance_of_input(const Address& owner) {
    std::vector<std::uint8_t> out;
    out.reserve(36);
    append_selector(out, kSelectorBalanceOf);
    append_word_address(out, owner);
    return out;
}

std::uint64_t draw_gas(SplitMix64& rng, const GasDistribution& dist) {
    if (dist.sigma == 0) {
        return static_cast<std::uint64_t>(std::llround(dist.median));
    }
    const double gas = dist.median * std::exp(dist.sigma * rng.next_gaussian());
    const auto rounded = static_cast<std::uint64_t>(std::llround(gas));
    return std::max<std::uint64_t>(rounded, 21000);
}

Address pick_user(SplitMix64& rng, const WorkloadProfile& profile) {
    return synth_address(kRoleUser, rng.next_below(profile.address_pool));
}

std::uint32_t pick_token_hub(SplitMix64& rng, const WorkloadProfile& profile) {
    if (profile.token_hubs == 1) {
        return 0;
    }
    if (rng.next_unit() < profile.token_hub_bias) {
        return 0;
    }
    return 1 + static_cast<std::uint32_t>(rng.next_below(profile.token_hubs - 1));
}

Transaction plain_transfer_tx(SplitMix64& rng, const WorkloadProfile& profile) {
    Transaction tx;
    tx.sender = pick_user(rng, profile);
    const Address recipient = pick_user(rng, profile);
    tx.recipient = recipient;
    tx.gas_used = draw_gas(rng, profile.plain_gas);
    tx.root_call = CallFrame{CallKind::kCall, tx.sender, recipient, tx.gas_used, {}, {}};
    return tx;
}

Transaction token_transfer_tx(SplitMix64& rng, const WorkloadProfile& profile) {
    Transaction tx;
    tx.sender = pick_user(rng, profile);
    const Address token = token_hub(pick_token_hub(rng, profile));
    const Address recipient = pick_user(rng, profile);
    tx.recipient = token;
    tx.gas_used = draw_gas(rng, profile.token_gas);
    const std::uint64_t call_gas = tx.gas_used > 21000 ? tx.gas_used - 21000 : tx.gas_used;
    tx.root_call = CallFrame{CallKind::kCall, tx.sender, token, call_gas,
                             transfer_input(recipient, rng.next()), {}};
    return tx;
}

Transaction router_swap_tx(SplitMix64& rng, const WorkloadProfile& profile) {
    Transaction tx;
    tx.sender = pick_user(rng, profile);
    const Address router = router_hub(static_cast<std::uint32_t>(rng.next_below(profile.router_hubs)));
    const auto pool_index = static_cast<std::uint32_t>(rng.next_below(profile.pool_hubs));
    const Address pool = synth_address(kRolePool, pool_index);
    // Every pool pairs the hub-0 token with one of the others.
    const Address token_a = token_hub(0);
    const Address token_b = token_hub(1 + pool_index % (profile.token_hubs - 1));
    const bool a_in = (rng.next() & 1) == 0;
    const Address token_in = a_in ? token_a : token_b;
    const Address token_out = a_in ? token_b : token_a;

    tx.recipient = router;
    tx.gas_used = draw_gas(rng, profile.swap_gas);
    const std::uint64_t call_gas = tx.gas_used > 21000 ? tx.gas_used - 21000 : tx.gas_used;
    const std::uint64_t amount_in = rng.next();
    const std::uint64_t amount_out = rng.next();

    std::vector<std::uint8_t> swap_input;
    swap_input.reserve(100);
    append_selector(swap_input, Selector{0x38, 0xed, 0x17, 0x39});
    append_word_uint(swap_input, amount_in);
    append_word_uint(swap_input, amount_out);
    append_word_uint(swap_input, 0x60);

    std::vector<std::uint8_t> pool_input;
    pool_input.reserve(68);
    append_selector(pool_input, Selector{0x02, 0x2c, 0x0d, 0x9f});
    append_word_uint(pool_input, amount_out);
    append_word_uint(pool_input, 0);

    CallFrame reserve_check{CallKind::kStaticCall, router, token_in, call_gas * 8 / 100,
                            balance_of_input(pool), {}};
    CallFrame pull{CallKind::kCall, router, token_in, call_gas * 25 / 100,
                   transfer_from_input(tx.sender, pool, amount_in), {}};
    CallFrame payout{CallKind::kCall, pool, token_out, call_gas * 30 / 100,
                     transfer_input(tx.sender, amount_out), {}};
    CallFrame swap{CallKind::kCall, router, pool, call_gas * 50 / 100, std::move(pool_input), {}};
    swap.children.push_back(std::move(payout));

    tx.root_call = CallFrame{CallKind::kCall, tx.sender, router, call_gas, std::move(swap_input), {}};
    tx.root_call.children.push_back(std::move(reserve_check));
    tx.root_call.children.push_back(std::move(pull));
    tx.root_call.children.push_back(std::move(swap));
    return tx;
}

Transaction heavy_call_tx(SplitMix64& rng, const WorkloadProfile& profile) {
    Transaction tx;
    tx.sender = pick_user(rng, profile);
    const bool shared = rng.next_unit() < profile.heavy_shared_fraction;
    const std::uint64_t contract_index = shared ? 0 : 1 + rng.next_below(profile.address_pool);
    const Address target = shared ? synth_address(kRoleMarket, 0)
                                  : synth_address(kRoleContract, contract_index);

    tx.recipient = target;
    tx.gas_used = draw_gas(rng, profile.heavy_gas);
    const std::uint64_t call_gas = tx.gas_used > 21000 ? tx.gas_used - 21000 : tx.gas_used;

    std::vector<std::uint8_t> input;
    input.reserve(68);
    append_selector(input, Selector{0xfe, 0xed, 0xca, 0x11});
    append_word_uint(input, rng.next());
    append_word_uint(input, rng.next());

    // Proxy-style implementation and one helper, both keyed to the target so
    // distinct heavy contracts never share internals.
    CallFrame implementation{CallKind::kDelegateCall, target,
                             synth_address(kRoleInner, contract_index * 2), call_gas * 30 / 100,
                             {}, {}};
    CallFrame helper{CallKind::kCall, target, synth_address(kRoleInner, contract_index * 2 + 1),
                     call_gas * 20 / 100, {}, {}};

    tx.root_call = CallFrame{CallKind::kCall, tx.sender, target, call_gas, std::move(input), {}};
    tx.root_call.children.push_back(std::move(implementation));
    tx.root_call.children.push_back(std::move(helper));
    return tx;
}

}  // namespace

void WorkloadProfile::validate() const {
    const auto fail = [](const std::string& message) { throw SynthError{"invalid profile: " + message}; };
    const double sum = plain_fraction + token_fraction + swap_fraction + heavy_fraction;
    if (plain_fraction < 0 || token_fraction < 0 || swap_fraction < 0 || heavy_fraction < 0) {
        fail("class fractions must be non-negative");
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        fail("class fractions must sum to 1");
    }
    if (tx_count_min == 0 || tx_count_min > tx_count_max) {
        fail("transaction count range is empty");
    }
    if (address_pool < 2) {
        fail("address pool too small");
    }
    if (token_fraction > 0 && token_hubs == 0) {
        fail("token transfers need at least one token hub");
    }
    if (swap_fraction > 0 && (token_hubs < 2 || router_hubs == 0 || pool_hubs == 0)) {
        fail("swaps need two token hubs, a router and a pool");
    }
    for (const auto& dist : {plain_gas, token_gas, swap_gas, heavy_gas}) {
        if (dist.median <= 0 || dist.sigma < 0) {
            fail("gas distributions need a positive median and non-negative sigma");
        }
    }
    if (token_hub_bias < 0 || token_hub_bias > 1 || heavy_shared_fraction < 0 ||
        heavy_shared_fraction > 1) {
        fail("probabilities must lie in [0, 1]");
    }
    if (block_interval == 0) {
        fail("block interval must be positive");
    }
}

WorkloadProfile WorkloadProfile::preset(std::string_view name) {
    WorkloadProfile profile;
    if (name == "pre-defi") {
        profile.tx_count_min = 80;
        profile.tx_count_max = 120;
        profile.plain_fraction = 0.80;
        profile.token_fraction = 0.12;
        profile.swap_fraction = 0.02;
        profile.heavy_fraction = 0.06;
        profile.token_hubs = 10;
        profile.router_hubs = 2;
        profile.pool_hubs = 4;
        profile.address_pool = 4000;
        profile.token_gas = {36000, 0.25};
        profile.swap_gas = {100000, 0.3};
        profile.heavy_gas = {120000, 0.8};
        profile.token_hub_bias = 0.25;
        profile.heavy_shared_fraction = 0.2;
        profile.first_timestamp = 1500000000;
        profile.block_interval = 14;
        return profile;
    }
    if (name == "defi") {
        profile.tx_count_min = 195;
        profile.tx_count_max = 205;
        profile.plain_fraction = 0.32;
        profile.token_fraction = 0.35;
        profile.swap_fraction = 0.25;
        profile.heavy_fraction = 0.08;
        profile.token_hubs = 7;
        profile.router_hubs = 4;
        profile.pool_hubs = 8;
        profile.address_pool = 5000;
        profile.token_gas = {40000, 0.3};
        profile.swap_gas = {110000, 0.4};
        profile.heavy_gas = {220000, 1.0};
        profile.token_hub_bias = 0.5;
        profile.heavy_shared_fraction = 0.9;
        profile.first_timestamp = 1660000000;
        profile.block_interval = 12;
        return profile;
    }
    if (name == "recent") {
        profile.tx_count_min = 230;
        profile.tx_count_max = 270;
        profile.plain_fraction = 0.25;
        profile.token_fraction = 0.30;
        profile.swap_fraction = 0.28;
        profile.heavy_fraction = 0.17;
        profile.token_hubs = 7;
        profile.router_hubs = 4;
        profile.pool_hubs = 8;
        profile.address_pool = 6000;
        profile.token_gas = {45000, 0.3};
        profile.swap_gas = {130000, 0.4};
        profile.heavy_gas = {300000, 1.0};
        profile.token_hub_bias = 0.5;
        profile.heavy_shared_fraction = 0.6;
        profile.first_timestamp = 1700000000;
        profile.block_interval = 12;
        return profile;
    }
    throw SynthError{"unknown preset \"" + std::string{name} + "\""};
}

BlockTrace generate_block(const WorkloadProfile& profile, std::uint64_t block_number) {
    profile.validate();
    SplitMix64 rng{mix_seed(profile.seed, block_number)};

    BlockTrace block;
    block.number = block_number;
    block.timestamp = profile.first_timestamp + std::uint64_t{profile.block_interval} * block_number;

    const std::uint64_t span = profile.tx_count_max - profile.tx_count_min + 1;
    const std::uint64_t tx_count = profile.tx_count_min + rng.next_below(span);
    block.transactions.reserve(tx_count);
    for (std::uint64_t i = 0; i < tx_count; ++i) {
        const double u = rng.next_unit();
        Transaction tx;
        if (u < profile.plain_fraction) {
            tx = plain_transfer_tx(rng, profile);
        } else if (u < profile.plain_fraction + profile.token_fraction) {
            tx = token_transfer_tx(rng, profile);
        } else if (u < profile.plain_fraction + profile.token_fraction + profile.swap_fraction) {
            tx = router_swap_tx(rng, profile);
        } else {
            tx = heavy_call_tx(rng, profile);
        }
        tx.hash = synth_hash(rng);
        block.gas_used += tx.gas_used;
        block.transactions.push_back(std::move(tx));
    }
    return block;
}

}  // namespace txparallax
