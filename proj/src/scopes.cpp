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

#include <txparallax/scopes.hpp>

#include <algorithm>

namespace txparallax {

std::string_view call_kind_name(CallKind kind) {
    switch (kind) {
        case CallKind::kCall: return "call";
        case CallKind::kDelegateCall: return "delegatecall";
        case CallKind::kStaticCall: return "staticcall";
        case CallKind::kCallCode: return "callcode";
        case CallKind::kValueTransfer: return "transfer";
    }
    return "call";
}

std::optional<CallKind> call_kind_from_name(std::string_view name) {
    if (name == "call") return CallKind::kCall;
    if (name == "delegatecall") return CallKind::kDelegateCall;
    if (name == "staticcall") return CallKind::kStaticCall;
    if (name == "callcode") return CallKind::kCallCode;
    if (name == "transfer") return CallKind::kValueTransfer;
    return std::nullopt;
}

std::string_view conflict_mode_name(ConflictMode mode) {
    return mode == ConflictMode::kWriteAware ? "write-aware" : "any-touch";
}

std::optional<ConflictMode> conflict_mode_from_name(std::string_view name) {
    if (name == "write-aware") return ConflictMode::kWriteAware;
    if (name == "any-touch") return ConflictMode::kAnyTouch;
    return std::nullopt;
}

std::string_view access_mode_name(AccessMode mode) {
    return mode == AccessMode::kWrite ? "write" : "read";
}

std::string render_target(const ScopeTarget& target) {
    if (const auto* address = std::get_if<Address>(&target)) {
        return address->to_hex();
    }
    const auto& cell = std::get<VirtualCell>(target);
    std::string out = cell.token.to_hex();
    if (cell.kind == VirtualCell::Kind::kBalance) {
        out += ":balance:";
        out += cell.owner.to_hex();
    } else {
        out += ":allowance:";
        out += cell.owner.to_hex();
        out += ":";
        out += cell.spender.to_hex();
    }
    return out;
}

std::vector<AccessScope> derive_scopes(const CallFrame& frame) {
    switch (frame.kind) {
        case CallKind::kCall:
            return {{frame.to, AccessMode::kWrite}};
        case CallKind::kDelegateCall:
        case CallKind::kCallCode:
            return {{frame.from, AccessMode::kWrite}};
        case CallKind::kStaticCall:
            return {{frame.to, AccessMode::kRead}};
        case CallKind::kValueTransfer:
            return {{frame.from, AccessMode::kWrite}, {frame.to, AccessMode::kWrite}};
    }
    return {};
}

TxScopeSet normalize_scopes(std::vector<AccessScope> scoped, std::vector<ScopeTarget> touched) {
    std::sort(scoped.begin(), scoped.end(), [](const AccessScope& a, const AccessScope& b) {
        if (a.target != b.target) return a.target < b.target;
        // Write first so the dedup below keeps it.
        return static_cast<int>(a.mode) > static_cast<int>(b.mode);
    });
    scoped.erase(std::unique(scoped.begin(), scoped.end(),
                             [](const AccessScope& a, const AccessScope& b) {
                                 return a.target == b.target;
                             }),
                 scoped.end());

    for (const AccessScope& scope : scoped) {
        touched.push_back(scope.target);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    return TxScopeSet{std::move(scoped), std::move(touched)};
}

TxScopeSet tx_scope_set(const Transaction& tx) {
    std::vector<AccessScope> scoped;
    std::vector<ScopeTarget> touched;
    for_each_frame(tx.root_call, [&](const CallFrame& frame) {
        for (AccessScope& scope : derive_scopes(frame)) {
            touched.push_back(scope.target);
            scoped.push_back(std::move(scope));
        }
        touched.emplace_back(frame.from);
        touched.emplace_back(frame.to);
    });
    // The sender's balance pays for gas on every transaction.
    scoped.push_back({tx.sender, AccessMode::kWrite});
    touched.emplace_back(tx.sender);
    return normalize_scopes(std::move(scoped), std::move(touched));
}

namespace {

//! True when the sorted scope runs share a target and at least one side
//! holds write access on it.
bool write_aware_overlap(const std::vector<AccessScope>& a, const std::vector<AccessScope>& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].target < b[j].target) {
            ++i;
        } else if (b[j].target < a[i].target) {
            ++j;
        } else {
            if (a[i].mode == AccessMode::kWrite || b[j].mode == AccessMode::kWrite) {
                return true;
            }
            ++i;
            ++j;
        }
    }
    return false;
}

bool sorted_intersects(const std::vector<ScopeTarget>& a, const std::vector<ScopeTarget>& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            return true;
        }
    }
    return false;
}

}  // namespace

bool conflicting(const TxScopeSet& a, const TxScopeSet& b, ConflictMode mode) {
    if (mode == ConflictMode::kWriteAware) {
        return write_aware_overlap(a.scoped, b.scoped);
    }
    return sorted_intersects(a.touched, b.touched);
}

bool conflicting(const Transaction& a, const Transaction& b, ConflictMode mode) {
    return conflicting(tx_scope_set(a), tx_scope_set(b), mode);
}

}  // namespace txparallax
