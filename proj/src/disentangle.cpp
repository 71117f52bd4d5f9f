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

#include <txparallax/disentangle.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace txparallax {

namespace {

Address must_address(std::string_view hex) {
    const auto parsed = Address::from_hex(hex);
    if (!parsed) {
        throw DisentangleConfigError{"invalid built-in address constant"};
    }
    return *parsed;
}

//! Decoded address arguments of a recognised ERC-20 call.
struct DecodedErc20 {
    enum class Fn : std::uint8_t { kTransfer, kTransferFrom, kApprove, kBalanceOf, kAllowance };

    Fn fn{Fn::kTransfer};
    Address arg0;
    Address arg1;
};

struct DecodeResult {
    std::optional<DecodedErc20> decoded;
    bool malformed{false};
};

//! Reads the address packed into ABI word `index` (last 20 of 32 bytes).
Address abi_address(const std::vector<std::uint8_t>& input, std::size_t index) {
    Address out;
    const std::size_t offset = 4 + 32 * index + 12;
    std::copy_n(input.begin() + static_cast<std::ptrdiff_t>(offset), 20, out.bytes.begin());
    return out;
}

bool selector_is(const std::vector<std::uint8_t>& input, const Selector& selector) {
    return std::equal(selector.begin(), selector.end(), input.begin());
}

DecodeResult decode_erc20(const CallFrame& frame) {
    const auto& input = frame.input;
    if (input.empty()) {
        return {};  // plain value transfer to the token contract
    }
    if (input.size() < 4) {
        return {.decoded = std::nullopt, .malformed = true};
    }

    using Fn = DecodedErc20::Fn;
    Fn fn;
    std::size_t words;
    std::size_t address_args;
    if (selector_is(input, kSelectorTransfer)) {
        fn = Fn::kTransfer;
        words = 2;
        address_args = 1;
    } else if (selector_is(input, kSelectorTransferFrom)) {
        fn = Fn::kTransferFrom;
        words = 3;
        address_args = 2;
    } else if (selector_is(input, kSelectorApprove)) {
        fn = Fn::kApprove;
        words = 2;
        address_args = 1;
    } else if (selector_is(input, kSelectorBalanceOf)) {
        fn = Fn::kBalanceOf;
        words = 1;
        address_args = 1;
    } else if (selector_is(input, kSelectorAllowance)) {
        fn = Fn::kAllowance;
        words = 2;
        address_args = 2;
    } else {
        return {};  // unrecognised selector, keep the coarse token scope
    }

    if (input.size() < 4 + 32 * words) {
        return {.decoded = std::nullopt, .malformed = true};
    }
    DecodedErc20 decoded;
    decoded.fn = fn;
    decoded.arg0 = abi_address(input, 0);
    if (address_args > 1) {
        decoded.arg1 = abi_address(input, 1);
    }
    return {.decoded = decoded, .malformed = false};
}

bool token_call_shape(const CallFrame& frame, const DisentangleConfig& cfg) {
    return cfg.enable_tokens && (frame.kind == CallKind::kCall || frame.kind == CallKind::kStaticCall) &&
           cfg.is_token(frame.to);
}

std::vector<AccessScope> cell_scopes(const DecodedErc20& decoded, const Address& token,
                                     const Address& caller) {
    using Fn = DecodedErc20::Fn;
    using Kind = VirtualCell::Kind;
    const auto balance = [&](const Address& owner) {
        return AccessScope{VirtualCell{Kind::kBalance, token, owner, Address{}}, AccessMode::kWrite};
    };
    const auto allowance = [&](const Address& owner, const Address& spender, AccessMode mode) {
        return AccessScope{VirtualCell{Kind::kAllowance, token, owner, spender}, mode};
    };
    switch (decoded.fn) {
        case Fn::kTransfer:
            return {balance(caller), balance(decoded.arg0)};
        case Fn::kTransferFrom:
            return {balance(decoded.arg0), balance(decoded.arg1),
                    allowance(decoded.arg0, caller, AccessMode::kWrite)};
        case Fn::kApprove:
            return {allowance(caller, decoded.arg0, AccessMode::kWrite)};
        case Fn::kBalanceOf: {
            auto scope = balance(decoded.arg0);
            scope.mode = AccessMode::kRead;
            return {scope};
        }
        case Fn::kAllowance:
            return {allowance(decoded.arg0, decoded.arg1, AccessMode::kRead)};
    }
    return {};
}

//! Router removal over one frame and its subtree. Returns nullopt when the
//! frame collapsed to a childless self-loop on the sender and may be pruned.
std::optional<CallFrame> remove_router_frame(const CallFrame& frame, const Address& tx_sender,
                                             const DisentangleConfig& cfg, bool is_root,
                                             DisentangleStats* stats) {
    CallFrame out;
    out.kind = frame.kind;
    out.gas_used = frame.gas_used;
    out.input = frame.input;
    bool rerouted = false;
    if (cfg.is_router(frame.from)) {
        out.from = tx_sender;
        rerouted = true;
    } else {
        out.from = frame.from;
    }
    if (cfg.is_router(frame.to)) {
        out.to = tx_sender;
        rerouted = true;
    } else {
        out.to = frame.to;
    }
    if (rerouted && stats != nullptr) {
        ++stats->rerouted_frames;
    }

    out.children.reserve(frame.children.size());
    for (const auto& child : frame.children) {
        auto kept = remove_router_frame(child, tx_sender, cfg, false, stats);
        if (kept) {
            out.children.push_back(std::move(*kept));
        }
    }

    if (!is_root && rerouted && out.children.empty() && out.from == tx_sender && out.to == tx_sender) {
        if (stats != nullptr) {
            ++stats->dropped_frames;
        }
        return std::nullopt;
    }
    return out;
}

}  // namespace

DisentangleStats& DisentangleStats::operator+=(const DisentangleStats& other) {
    rewritten_calls += other.rewritten_calls;
    malformed_calldata += other.malformed_calldata;
    rerouted_frames += other.rerouted_frames;
    dropped_frames += other.dropped_frames;
    return *this;
}

namespace mainnet {

Address weth() { return must_address("0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2"); }
Address usdc() { return must_address("0xa0b86991c6218b36c1d19d4a2e9eb0ce3606eb48"); }
Address usdt() { return must_address("0xdac17f958d2ee523a2206206994597c13d831ec7"); }
Address dai() { return must_address("0x6b175474e89094c44da98b954eedeac495271d0f"); }
Address link() { return must_address("0x514910771af9ca656af840dff83e8264ecf986ca"); }
Address uniswap_v2_router() { return must_address("0x7a250d5630b4cf539739df2c5dacb4c659f2488d"); }
Address uniswap_v3_router() { return must_address("0xe592427a0aece92de3edee1f18e0157c05861564"); }
Address uniswap_v3_router02() { return must_address("0x68b3465833fb72a70ecdf485e0e4c7bd8665fc45"); }
Address sushiswap_router() { return must_address("0xd9e1ce17f2641f24ae83637ab66a2cca9c378b9f"); }
Address oneinch_router() { return must_address("0x1111111254fb6c44bac0bed2854e76f90643097d"); }

}  // namespace mainnet

DisentangleConfig DisentangleConfig::mainnet_defaults() {
    DisentangleConfig cfg;
    cfg.tokens = {mainnet::weth(), mainnet::usdc(), mainnet::usdt(), mainnet::dai(),
                  mainnet::link()};
    cfg.routers = {mainnet::uniswap_v2_router(), mainnet::uniswap_v3_router(),
                   mainnet::uniswap_v3_router02(), mainnet::sushiswap_router(),
                   mainnet::oneinch_router()};
    cfg.normalize();
    return cfg;
}

DisentangleConfig DisentangleConfig::from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw DisentangleConfigError{"config is not a JSON object"};
    }
    DisentangleConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "tokens" || key == "routers") {
            if (!value.is_array()) {
                throw DisentangleConfigError{"\"" + key + "\" must be an array"};
            }
            auto& list = key == "tokens" ? cfg.tokens : cfg.routers;
            for (const auto& entry : value) {
                if (!entry.is_string()) {
                    throw DisentangleConfigError{"\"" + key + "\" entries must be strings"};
                }
                const auto address = Address::from_hex(entry.get<std::string>());
                if (!address) {
                    throw DisentangleConfigError{"invalid address in \"" + key + "\": " +
                                                 entry.get<std::string>()};
                }
                list.push_back(*address);
            }
        } else if (key == "enable_tokens" || key == "enable_routers") {
            if (!value.is_boolean()) {
                throw DisentangleConfigError{"\"" + key + "\" must be a boolean"};
            }
            (key == "enable_tokens" ? cfg.enable_tokens : cfg.enable_routers) = value.get<bool>();
        } else {
            throw DisentangleConfigError{"unknown config key \"" + key + "\""};
        }
    }
    cfg.normalize();
    return cfg;
}

DisentangleConfig DisentangleConfig::load_file(const std::filesystem::path& path) {
    std::ifstream input{path};
    if (!input) {
        throw DisentangleConfigError{"cannot open config file: " + path.string()};
    }
    std::ostringstream buffer;
    buffer << input.rdbuf();
    return from_json(buffer.str());
}

std::string DisentangleConfig::to_json() const {
    std::string out = "{\"tokens\":[";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ',';
        out += '"';
        out += tokens[i].to_hex();
        out += '"';
    }
    out += "],\"routers\":[";
    for (std::size_t i = 0; i < routers.size(); ++i) {
        if (i > 0) out += ',';
        out += '"';
        out += routers[i].to_hex();
        out += '"';
    }
    out += "],\"enable_tokens\":";
    out += enable_tokens ? "true" : "false";
    out += ",\"enable_routers\":";
    out += enable_routers ? "true" : "false";
    out += '}';
    return out;
}

void DisentangleConfig::normalize() {
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    std::sort(routers.begin(), routers.end());
    routers.erase(std::unique(routers.begin(), routers.end()), routers.end());
    std::vector<Address> shared;
    std::set_intersection(tokens.begin(), tokens.end(), routers.begin(), routers.end(),
                          std::back_inserter(shared));
    if (!shared.empty()) {
        throw DisentangleConfigError{"address " + shared.front().to_hex() +
                                     " appears in both tokens and routers"};
    }
}

bool DisentangleConfig::is_token(const Address& address) const {
    return std::binary_search(tokens.begin(), tokens.end(), address);
}

bool DisentangleConfig::is_router(const Address& address) const {
    return std::binary_search(routers.begin(), routers.end(), address);
}

std::vector<AccessScope> rewrite_erc20(const CallFrame& frame, const Address& caller,
                                       const DisentangleConfig& cfg, DisentangleStats* stats) {
    if (!token_call_shape(frame, cfg)) {
        return derive_scopes(frame);
    }
    const auto result = decode_erc20(frame);
    if (result.malformed) {
        if (stats != nullptr) {
            ++stats->malformed_calldata;
        }
        return derive_scopes(frame);
    }
    if (!result.decoded) {
        return derive_scopes(frame);
    }
    if (stats != nullptr) {
        ++stats->rewritten_calls;
    }
    return cell_scopes(*result.decoded, frame.to, caller);
}

bool is_rewritten_token_call(const CallFrame& frame, const DisentangleConfig& cfg) {
    if (!token_call_shape(frame, cfg)) {
        return false;
    }
    const auto result = decode_erc20(frame);
    return result.decoded.has_value();
}

FrameScopes frame_scopes(const CallFrame& frame, const DisentangleConfig* cfg,
                         DisentangleStats* stats) {
    if (cfg == nullptr) {
        return FrameScopes{derive_scopes(frame), false};
    }
    auto scopes = rewrite_erc20(frame, frame.from, *cfg, stats);
    return FrameScopes{std::move(scopes), is_rewritten_token_call(frame, *cfg)};
}

CallFrame remove_router(const CallFrame& root, const Address& tx_sender,
                        const DisentangleConfig& cfg, DisentangleStats* stats) {
    auto rewritten = remove_router_frame(root, tx_sender, cfg, true, stats);
    return std::move(*rewritten);
}

BlockTrace disentangle_trees(const BlockTrace& block, const DisentangleConfig& cfg,
                             DisentangleStats* stats) {
    BlockTrace out = block;
    if (!cfg.enable_routers) {
        return out;
    }
    for (auto& tx : out.transactions) {
        tx.root_call = remove_router(tx.root_call, tx.sender, cfg, stats);
    }
    return out;
}

TxScopeSet disentangled_tx_scope_set(const Transaction& tx, const DisentangleConfig& cfg,
                                     DisentangleStats* stats) {
    Transaction rewritten;
    const Transaction* source = &tx;
    if (cfg.enable_routers) {
        rewritten = tx;
        rewritten.root_call = remove_router(tx.root_call, tx.sender, cfg, stats);
        source = &rewritten;
    }

    std::vector<AccessScope> scoped;
    std::vector<ScopeTarget> touched;
    for_each_frame(source->root_call, [&](const CallFrame& frame) {
        auto frame_result = frame_scopes(frame, &cfg, stats);
        for (AccessScope& scope : frame_result.scopes) {
            touched.push_back(scope.target);
            scoped.push_back(std::move(scope));
        }
        touched.emplace_back(frame.from);
        if (!frame_result.rewritten) {
            touched.emplace_back(frame.to);
        }
    });
    scoped.push_back({source->sender, AccessMode::kWrite});
    touched.emplace_back(source->sender);
    return normalize_scopes(std::move(scoped), std::move(touched));
}

std::vector<TxScopeSet> disentangle(const BlockTrace& block, const DisentangleConfig& cfg,
                                    DisentangleStats* stats) {
    std::vector<TxScopeSet> sets;
    sets.reserve(block.transactions.size());
    for (const auto& tx : block.transactions) {
        sets.push_back(disentangled_tx_scope_set(tx, cfg, stats));
    }
    return sets;
}

}  // namespace txparallax
