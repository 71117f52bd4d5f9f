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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <txparallax/scopes.hpp>
#include <txparallax/trace.hpp>

namespace txparallax {

//! Canonical ERC-20 function signatures and their 4-byte selectors. The
//! selector bytes are pinned here and cross-checked against a hash oracle in
//! the test suite.
inline constexpr const char* kSigTransfer = "transfer(address,uint256)";
inline constexpr const char* kSigTransferFrom = "transferFrom(address,address,uint256)";
inline constexpr const char* kSigApprove = "approve(address,uint256)";
inline constexpr const char* kSigBalanceOf = "balanceOf(address)";
inline constexpr const char* kSigAllowance = "allowance(address,address)";

using Selector = std::array<std::uint8_t, 4>;

inline constexpr Selector kSelectorTransfer{0xa9, 0x05, 0x9c, 0xbb};
inline constexpr Selector kSelectorTransferFrom{0x23, 0xb8, 0x72, 0xdd};
inline constexpr Selector kSelectorApprove{0x09, 0x5e, 0xa7, 0xb3};
inline constexpr Selector kSelectorBalanceOf{0x70, 0xa0, 0x82, 0x31};
inline constexpr Selector kSelectorAllowance{0xdd, 0x62, 0xed, 0x3e};

class DisentangleConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Well-known mainnet contract addresses used by the default config and the
//! synthetic workload presets.
namespace mainnet {

Address weth();
Address usdc();
Address usdt();
Address dai();
Address link();
Address uniswap_v2_router();
Address uniswap_v3_router();
Address uniswap_v3_router02();
Address sushiswap_router();
Address oneinch_router();

}  // namespace mainnet

struct DisentangleConfig {
    std::vector<Address> tokens;
    std::vector<Address> routers;
    bool enable_tokens{true};
    bool enable_routers{true};

    //! WETH, USDC, USDT, DAI and LINK plus the Uniswap V2/V3, SushiSwap and
    //! 1inch routers.
    static DisentangleConfig mainnet_defaults();

    static DisentangleConfig from_json(const std::string& text);
    static DisentangleConfig load_file(const std::filesystem::path& path);
    std::string to_json() const;

    //! Sorts and dedupes both sets, then rejects token/router overlap.
    void normalize();

    bool is_token(const Address& address) const;
    bool is_router(const Address& address) const;
};

struct DisentangleStats {
    std::uint64_t rewritten_calls{0};
    std::uint64_t malformed_calldata{0};
    std::uint64_t rerouted_frames{0};
    std::uint64_t dropped_frames{0};

    DisentangleStats& operator+=(const DisentangleStats& other);
};

//! Scopes contributed by a single frame after the ERC-20 rewrite. Frames
//! that do not target a configured token with a recognised, well-formed
//! ERC-20 call fall back to the frame's natural scopes. `caller` is the
//! account the frame executes on behalf of (its `from` endpoint after router
//! removal).
std::vector<AccessScope> rewrite_erc20(const CallFrame& frame, const Address& caller,
                                       const DisentangleConfig& cfg, DisentangleStats* stats);

//! Returns true when the frame will be rewritten to virtual cells rather
//! than contributing its natural address scopes.
bool is_rewritten_token_call(const CallFrame& frame, const DisentangleConfig& cfg);

//! Single decode point shared by scope derivation and graph construction.
//! With a null config the frame's natural scopes are returned unchanged.
struct FrameScopes {
    std::vector<AccessScope> scopes;
    bool rewritten{false};
};

FrameScopes frame_scopes(const CallFrame& frame, const DisentangleConfig* cfg,
                         DisentangleStats* stats);

//! Replaces router endpoints with the transaction sender throughout the
//! tree. Non-root frames that become childless sender self-loops are
//! dropped; the root is always kept so the transaction retains a call tree.
CallFrame remove_router(const CallFrame& root, const Address& tx_sender,
                        const DisentangleConfig& cfg, DisentangleStats* stats);

//! Router removal over every transaction of a block; gas totals unchanged.
BlockTrace disentangle_trees(const BlockTrace& block, const DisentangleConfig& cfg,
                             DisentangleStats* stats);

//! Full per-transaction scope derivation: router removal first, then the
//! ERC-20 rewrite.
TxScopeSet disentangled_tx_scope_set(const Transaction& tx, const DisentangleConfig& cfg,
                                     DisentangleStats* stats);

std::vector<TxScopeSet> disentangle(const BlockTrace& block, const DisentangleConfig& cfg,
                                    DisentangleStats* stats);

}  // namespace txparallax
