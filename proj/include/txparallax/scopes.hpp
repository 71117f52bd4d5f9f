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

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <txparallax/address.hpp>
#include <txparallax/trace.hpp>

namespace txparallax {

enum class AccessMode : std::uint8_t { kRead, kWrite };

std::string_view access_mode_name(AccessMode mode);

//! How conflicts between two transactions are decided.
//!
//! WriteAware follows call-scope semantics: a shared storage scope with at
//! least one write access. AnyTouch follows the dependency notion used for
//! interdependency counting: any shared touched address (call endpoint),
//! regardless of access mode.
enum class ConflictMode : std::uint8_t { kWriteAware, kAnyTouch };

std::string_view conflict_mode_name(ConflictMode mode);
std::optional<ConflictMode> conflict_mode_from_name(std::string_view name);

//! A single balance or allowance entry of an ERC-20 token contract, used as
//! a synthetic scope target after disentanglement.
struct VirtualCell {
    enum class Kind : std::uint8_t { kBalance, kAllowance };

    Kind kind{Kind::kBalance};
    Address token;
    Address owner;
    Address spender;  // zero unless kind == kAllowance

    auto operator<=>(const VirtualCell&) const = default;
};

//! The unit of conflict: a plain address or a virtual token cell. Plain
//! addresses and cells never compare equal, so rewritten vertices are
//! disjoint from the address space by construction.
using ScopeTarget = std::variant<Address, VirtualCell>;

std::string render_target(const ScopeTarget& target);

struct AccessScope {
    ScopeTarget target;
    AccessMode mode{AccessMode::kWrite};
};

//! Per-transaction access summary.
//!
//! `scoped` carries the write-aware storage scopes (write dominates read on
//! equal targets). `touched` carries every address or cell the transaction
//! touched, i.e. all call endpoints plus the fee-paying sender; it is a
//! superset of the scoped targets and drives AnyTouch conflicts.
//! Both vectors are sorted and free of duplicate targets.
struct TxScopeSet {
    std::vector<AccessScope> scoped;
    std::vector<ScopeTarget> touched;
};

//! Storage scopes contributed by a single frame (children excluded):
//! call -> callee written, delegatecall/callcode -> caller written,
//! staticcall -> callee read, value transfer -> both endpoints written.
std::vector<AccessScope> derive_scopes(const CallFrame& frame);

//! Scope summary of the whole call tree plus the sender's balance write.
TxScopeSet tx_scope_set(const Transaction& tx);

bool conflicting(const TxScopeSet& a, const TxScopeSet& b, ConflictMode mode);
bool conflicting(const Transaction& a, const Transaction& b, ConflictMode mode);

//! Merges raw accesses into the sorted/deduplicated TxScopeSet form. Every
//! scoped target is added to touched, so the superset invariant holds by
//! construction; `touched` carries targets with no storage scope of their
//! own (plain call endpoints).
TxScopeSet normalize_scopes(std::vector<AccessScope> scoped, std::vector<ScopeTarget> touched);

}  // namespace txparallax
