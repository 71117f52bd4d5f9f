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

// Terse builders for handcrafted traces in tests.

#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include <txparallax/disentangle.hpp>
#include <txparallax/trace.hpp>

namespace txparallax::testsupport {

inline Address addr(std::uint8_t tag) {
    Address a;
    a.bytes[19] = tag;
    return a;
}

inline Hash32 hash(std::uint8_t tag) {
    Hash32 h;
    h.bytes[31] = tag;
    return h;
}

//! ABI-encodes a call: 4-byte selector, then each address as a 32-byte
//! word, then `extra_words` zero words (e.g. the uint256 amount).
inline std::vector<std::uint8_t> erc20_input(const Selector& selector,
                                             std::initializer_list<Address> args,
                                             std::size_t extra_words = 1) {
    std::vector<std::uint8_t> input(selector.begin(), selector.end());
    for (const Address& a : args) {
        input.insert(input.end(), 12, 0);
        input.insert(input.end(), a.bytes.begin(), a.bytes.end());
    }
    input.insert(input.end(), extra_words * 32, 0);
    return input;
}

inline CallFrame frame(CallKind kind, Address from, Address to, std::uint64_t gas,
                       std::vector<std::uint8_t> input = {},
                       std::vector<CallFrame> children = {}) {
    CallFrame f;
    f.kind = kind;
    f.from = from;
    f.to = to;
    f.gas_used = gas;
    f.input = std::move(input);
    f.children = std::move(children);
    return f;
}

inline Transaction tx(std::uint8_t tag, CallFrame root, std::uint64_t gas = 0) {
    Transaction t;
    t.hash = hash(tag);
    t.sender = root.from;
    t.recipient = root.to;
    t.gas_used = gas == 0 ? root.gas_used : gas;
    t.root_call = std::move(root);
    return t;
}

inline BlockTrace block(std::uint64_t number, std::uint64_t timestamp,
                        std::vector<Transaction> txs) {
    BlockTrace b;
    b.number = number;
    b.timestamp = timestamp;
    b.transactions = std::move(txs);
    b.gas_used = 0;
    for (const Transaction& t : b.transactions) {
        b.gas_used += t.gas_used;
    }
    return b;
}

}  // namespace txparallax::testsupport
