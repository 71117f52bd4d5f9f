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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <txparallax/address.hpp>

namespace txparallax {

//! EVM call flavors as they appear in trace data. ValueTransfer is a
//! synthetic kind for plain Ether movements: top-level transactions with
//! empty calldata, internal calls that carry value without calldata, and
//! contract creations / self-destructs mapped at the RPC boundary.
enum class CallKind : std::uint8_t {
    kCall,
    kDelegateCall,
    kStaticCall,
    kCallCode,
    kValueTransfer,
};

std::string_view call_kind_name(CallKind kind);
std::optional<CallKind> call_kind_from_name(std::string_view name);

//! Maximum calldata retained per call: 4-byte selector plus three 32-byte
//! argument words. Enough to decode every rewritten ERC-20 entry point.
inline constexpr std::size_t kMaxInputBytes = 100;

//! One node of a transaction's call tree.
struct CallFrame {
    CallKind kind{CallKind::kCall};
    Address from;
    Address to;
    std::uint64_t gas_used{0};
    //! First kMaxInputBytes bytes of calldata; may be empty.
    std::vector<std::uint8_t> input;
    std::vector<CallFrame> children;
};

struct Transaction {
    Hash32 hash;
    Address sender;
    //! Absent for contract creation.
    std::optional<Address> recipient;
    std::uint64_t gas_used{0};
    CallFrame root_call;
};

struct BlockTrace {
    std::uint64_t number{0};
    std::uint64_t timestamp{0};
    //! Invariant: equals the sum of per-transaction gas_used.
    std::uint64_t gas_used{0};
    std::vector<Transaction> transactions;
};

//! Pre-order visit of a frame and all descendants.
template <typename Fn>
void for_each_frame(const CallFrame& frame, Fn&& fn) {
    fn(frame);
    for (const CallFrame& child : frame.children) {
        for_each_frame(child, fn);
    }
}

}  // namespace txparallax
