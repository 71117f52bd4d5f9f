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

#include <txparallax/rpc.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include <txparallax/ingest.hpp>

namespace txparallax {

namespace {

using nlohmann::json;

constexpr int kJsonRpcMethodNotFound = -32601;

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading slash, "/" when absent
};

ParsedUrl parse_url(const std::string& url) {
    const std::string_view http = "http://";
    const std::string_view https = "https://";
    std::size_t scheme_len = 0;
    if (url.starts_with(http)) {
        scheme_len = http.size();
    } else if (url.starts_with(https)) {
        throw RpcError{RpcErrorKind::kNetwork,
                       "https endpoints are not supported by this build; use an http URL"};
    } else {
        throw RpcError{RpcErrorKind::kNetwork, "endpoint URL must start with http://"};
    }
    const std::size_t slash = url.find('/', scheme_len);
    if (slash == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, slash), url.substr(slash)};
}

std::string quantity_hex(std::uint64_t value) {
    char buf[19];
    const int written = std::snprintf(buf, sizeof buf, "0x%llx",
                                      static_cast<unsigned long long>(value));
    return std::string(buf, static_cast<std::size_t>(written));
}

std::uint64_t parse_quantity(const json& value, const char* what) {
    if (!value.is_string()) {
        throw RpcError{RpcErrorKind::kProtocol, std::string{what} + " is not a hex string"};
    }
    const std::string& text = value.get_ref<const std::string&>();
    if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
        throw RpcError{RpcErrorKind::kProtocol, std::string{what} + ": bad quantity " + text};
    }
    std::uint64_t out = 0;
    for (std::size_t i = 2; i < text.size(); ++i) {
        const char c = text[i];
        std::uint64_t digit = 0;
        if (c >= '0' && c <= '9') {
            digit = static_cast<std::uint64_t>(c - '0');
        } else if (c >= 'a' && c <= 'f') {
            digit = static_cast<std::uint64_t>(c - 'a' + 10);
        } else if (c >= 'A' && c <= 'F') {
            digit = static_cast<std::uint64_t>(c - 'A' + 10);
        } else {
            throw RpcError{RpcErrorKind::kProtocol, std::string{what} + ": bad quantity " + text};
        }
        if (out > (std::numeric_limits<std::uint64_t>::max() >> 4)) {
            throw RpcError{RpcErrorKind::kProtocol, std::string{what} + ": quantity overflow"};
        }
        out = (out << 4) | digit;
    }
    return out;
}

Address parse_address(const json& value, const char* what) {
    if (!value.is_string()) {
        throw RpcError{RpcErrorKind::kProtocol, std::string{what} + " is not an address string"};
    }
    const auto parsed = Address::from_hex(value.get_ref<const std::string&>());
    if (!parsed) {
        throw RpcError{RpcErrorKind::kProtocol,
                       std::string{what} + ": bad address " + value.get_ref<const std::string&>()};
    }
    return *parsed;
}

Hash32 parse_hash(const json& value, const char* what) {
    if (!value.is_string()) {
        throw RpcError{RpcErrorKind::kProtocol, std::string{what} + " is not a hash string"};
    }
    const auto parsed = Hash32::from_hex(value.get_ref<const std::string&>());
    if (!parsed) {
        throw RpcError{RpcErrorKind::kProtocol,
                       std::string{what} + ": bad hash " + value.get_ref<const std::string&>()};
    }
    return *parsed;
}

std::vector<std::uint8_t> parse_input(const json& value) {
    if (!value.is_string()) {
        return {};
    }
    const auto bytes = bytes_from_hex(value.get_ref<const std::string&>());
    if (!bytes) {
        throw RpcError{RpcErrorKind::kProtocol, "trace input is not valid hex"};
    }
    const std::size_t kept = std::min<std::size_t>(bytes->size(), kMaxInputBytes);
    return std::vector<std::uint8_t>(bytes->begin(),
                                     bytes->begin() + static_cast<std::ptrdiff_t>(kept));
}

//! One flat trace entry in Erigon/parity layout, keyed for tree rebuild.
struct FlatEntry {
    std::vector<std::uint32_t> trace_address;
    CallFrame frame;
};

CallKind call_kind_from(const std::string& call_type) {
    if (call_type == "call") return CallKind::kCall;
    if (call_type == "delegatecall") return CallKind::kDelegateCall;
    if (call_type == "staticcall") return CallKind::kStaticCall;
    if (call_type == "callcode") return CallKind::kCallCode;
    throw RpcError{RpcErrorKind::kProtocol, "unknown callType \"" + call_type + "\""};
}

//! Maps one flat trace to a call frame. Returns nullopt for entries that do
//! not belong to a transaction frame tree (rewards).
std::optional<FlatEntry> map_trace_entry(const json& entry) {
    if (!entry.is_object()) {
        throw RpcError{RpcErrorKind::kProtocol, "trace entry is not an object"};
    }
    const auto type_it = entry.find("type");
    if (type_it == entry.end() || !type_it->is_string()) {
        throw RpcError{RpcErrorKind::kProtocol, "trace entry has no type"};
    }
    const std::string& type = type_it->get_ref<const std::string&>();
    if (type == "reward") {
        return std::nullopt;
    }
    const auto action_it = entry.find("action");
    if (action_it == entry.end() || !action_it->is_object()) {
        throw RpcError{RpcErrorKind::kProtocol, "trace entry has no action"};
    }
    const json& action = *action_it;
    const json* result = nullptr;
    if (const auto it = entry.find("result"); it != entry.end() && it->is_object()) {
        result = &*it;
    }

    FlatEntry out;
    if (const auto it = entry.find("traceAddress"); it != entry.end() && it->is_array()) {
        out.trace_address.reserve(it->size());
        for (const json& step : *it) {
            if (!step.is_number_unsigned()) {
                throw RpcError{RpcErrorKind::kProtocol, "traceAddress step is not an index"};
            }
            out.trace_address.push_back(step.get<std::uint32_t>());
        }
    }

    CallFrame& frame = out.frame;
    if (type == "call") {
        frame.kind = call_kind_from(action.value("callType", "call"));
        frame.from = parse_address(action.at("from"), "action.from");
        frame.to = parse_address(action.at("to"), "action.to");
        if (const auto it = action.find("input"); it != action.end()) {
            frame.input = parse_input(*it);
        }
        frame.gas_used = result ? parse_quantity(result->at("gasUsed"), "result.gasUsed") : 0;
    } else if (type == "create" || type == "create2") {
        // Contract creation writes the created account's state; model it as
        // a plain call into the new address. Init code is not calldata and
        // is dropped.
        frame.kind = CallKind::kCall;
        frame.from = parse_address(action.at("from"), "action.from");
        frame.to = result && result->contains("address")
                       ? parse_address(result->at("address"), "result.address")
                       : Address{};
        frame.gas_used = result ? parse_quantity(result->at("gasUsed"), "result.gasUsed") : 0;
    } else if (type == "suicide" || type == "selfdestruct") {
        frame.kind = CallKind::kValueTransfer;
        frame.from = parse_address(action.at("address"), "action.address");
        frame.to = parse_address(action.at("refundAddress"), "action.refundAddress");
        frame.gas_used = 0;
    } else {
        throw RpcError{RpcErrorKind::kProtocol, "unknown trace type \"" + type + "\""};
    }
    return out;
}

//! Rebuilds per-transaction frame trees from flat traces. Entries arrive in
//! depth-first order per transaction; sorting by traceAddress restores that
//! order even if the node shuffled them.
CallFrame build_tree(std::vector<FlatEntry> entries, std::uint64_t block, std::size_t tx_index) {
    const std::string context =
        "block " + std::to_string(block) + " tx " + std::to_string(tx_index);
    if (entries.empty()) {
        throw RpcError{RpcErrorKind::kProtocol, context + ": no trace entries"};
    }
    std::sort(entries.begin(), entries.end(), [](const FlatEntry& a, const FlatEntry& b) {
        return a.trace_address < b.trace_address;
    });
    if (!entries.front().trace_address.empty()) {
        throw RpcError{RpcErrorKind::kProtocol, context + ": missing root trace entry"};
    }
    CallFrame root = std::move(entries.front().frame);
    std::map<std::vector<std::uint32_t>, CallFrame*> by_path;
    by_path.emplace(std::vector<std::uint32_t>{}, &root);
    for (std::size_t i = 1; i < entries.size(); ++i) {
        FlatEntry& entry = entries[i];
        std::vector<std::uint32_t> parent_path = entry.trace_address;
        parent_path.pop_back();
        const auto parent_it = by_path.find(parent_path);
        if (parent_it == by_path.end()) {
            throw RpcError{RpcErrorKind::kProtocol, context + ": trace entry without parent"};
        }
        CallFrame* parent = parent_it->second;
        parent->children.push_back(std::move(entry.frame));
        by_path.emplace(std::move(entry.trace_address), &parent->children.back());
    }
    return root;
}

struct ReceiptInfo {
    Hash32 hash;
    Address from;
    std::optional<Address> to;
    std::uint64_t gas_used = 0;
};

}  // namespace

std::string_view rpc_error_kind_name(RpcErrorKind kind) {
    switch (kind) {
        case RpcErrorKind::kNetwork: return "network error";
        case RpcErrorKind::kNotFound: return "block not found";
        case RpcErrorKind::kNoTraceSupport: return "no trace support";
        case RpcErrorKind::kProtocol: return "protocol error";
    }
    return "rpc error";
}

namespace {

//! Single JSON-RPC exchange with retries. Transport failures and 5xx
//! responses back off exponentially up to max_attempts; JSON-RPC level
//! errors are never transient and map to a typed failure immediately.
json rpc_call(const RpcConfig& config, const std::string& method, json params) {
    const ParsedUrl url = parse_url(config.url);
    json request{
        {"jsonrpc", "2.0"},
        {"id", 1},
        {"method", method},
        {"params", std::move(params)},
    };
    const std::string body = request.dump();

    std::string last_failure = "no attempts made";
    const int attempts = std::max(config.max_attempts, 1);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(config.backoff_base * (1LL << (attempt - 1)));
        }
        httplib::Client client(url.base);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
        client.set_connection_timeout(seconds.count(), 0);
        client.set_read_timeout(seconds.count(), 0);
        httplib::Result res = client.Post(url.path, body, "application/json");
        if (!res) {
            last_failure = "transport failure (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status >= 500) {
            last_failure = "server returned status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw RpcError{RpcErrorKind::kProtocol,
                           method + ": unexpected status " + std::to_string(res->status)};
        }
        json doc = json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            throw RpcError{RpcErrorKind::kProtocol, method + ": response is not a JSON object"};
        }
        if (const auto err = doc.find("error"); err != doc.end() && !err->is_null()) {
            const int code = err->is_object() ? err->value("code", 0) : 0;
            const std::string message =
                err->is_object() ? err->value("message", std::string{"unknown error"})
                                 : err->dump();
            if (code == kJsonRpcMethodNotFound) {
                throw RpcError{RpcErrorKind::kNoTraceSupport,
                               method + " is not available on this node (" + message + ")"};
            }
            throw RpcError{RpcErrorKind::kProtocol,
                           method + " failed with code " + std::to_string(code) + ": " + message};
        }
        const auto result = doc.find("result");
        if (result == doc.end()) {
            throw RpcError{RpcErrorKind::kProtocol, method + ": response has no result"};
        }
        return *result;
    }
    throw RpcError{RpcErrorKind::kNetwork,
                   method + " failed after " + std::to_string(attempts) + " attempts; last: " +
                       last_failure};
}

std::vector<ReceiptInfo> fetch_receipts(const RpcConfig& config, std::uint64_t number) {
    json result = rpc_call(config, "eth_getBlockReceipts", json::array({quantity_hex(number)}));
    if (result.is_null()) {
        throw RpcError{RpcErrorKind::kNotFound,
                       "no receipts for block " + std::to_string(number)};
    }
    if (!result.is_array()) {
        throw RpcError{RpcErrorKind::kProtocol, "eth_getBlockReceipts: result is not an array"};
    }
    std::vector<ReceiptInfo> receipts;
    receipts.reserve(result.size());
    for (const json& entry : result) {
        if (!entry.is_object()) {
            throw RpcError{RpcErrorKind::kProtocol, "receipt is not an object"};
        }
        ReceiptInfo info;
        info.hash = parse_hash(entry.at("transactionHash"), "receipt.transactionHash");
        info.from = parse_address(entry.at("from"), "receipt.from");
        if (const auto it = entry.find("to"); it != entry.end() && !it->is_null()) {
            info.to = parse_address(*it, "receipt.to");
        } else if (const auto created = entry.find("contractAddress");
                   created != entry.end() && !created->is_null()) {
            info.to = parse_address(*created, "receipt.contractAddress");
        }
        info.gas_used = parse_quantity(entry.at("gasUsed"), "receipt.gasUsed");
        receipts.push_back(info);
    }
    return receipts;
}

}  // namespace

RpcClient::RpcClient(RpcConfig config) : config_{std::move(config)} {
    if (config_.url.empty()) {
        throw RpcError{RpcErrorKind::kNetwork, "no endpoint URL configured"};
    }
}

BlockTrace RpcClient::fetch_block(std::uint64_t number) const {
    const json header = rpc_call(config_, "eth_getBlockByNumber",
                                 json::array({quantity_hex(number), false}));
    if (header.is_null()) {
        throw RpcError{RpcErrorKind::kNotFound, "block " + std::to_string(number) + " not found"};
    }
    if (!header.is_object()) {
        throw RpcError{RpcErrorKind::kProtocol, "eth_getBlockByNumber: result is not an object"};
    }

    BlockTrace block;
    block.number = parse_quantity(header.at("number"), "header.number");
    if (block.number != number) {
        throw RpcError{RpcErrorKind::kProtocol,
                       "node returned block " + std::to_string(block.number) + " for request " +
                           std::to_string(number)};
    }
    block.timestamp = parse_quantity(header.at("timestamp"), "header.timestamp");
    block.gas_used = parse_quantity(header.at("gasUsed"), "header.gasUsed");

    const std::vector<ReceiptInfo> receipts = fetch_receipts(config_, number);

    const json traces =
        rpc_call(config_, config_.trace_method, json::array({quantity_hex(number)}));
    if (!traces.is_array()) {
        throw RpcError{RpcErrorKind::kProtocol,
                       config_.trace_method + ": result is not an array"};
    }
    std::map<std::size_t, std::vector<FlatEntry>> by_tx;
    for (const json& raw : traces) {
        auto entry = map_trace_entry(raw);
        if (!entry) {
            continue;
        }
        const auto pos_it = raw.find("transactionPosition");
        if (pos_it == raw.end() || !pos_it->is_number_unsigned()) {
            throw RpcError{RpcErrorKind::kProtocol, "trace entry has no transactionPosition"};
        }
        by_tx[pos_it->get<std::size_t>()].push_back(std::move(*entry));
    }

    block.transactions.reserve(receipts.size());
    for (std::size_t i = 0; i < receipts.size(); ++i) {
        const ReceiptInfo& receipt = receipts[i];
        Transaction tx;
        tx.hash = receipt.hash;
        tx.sender = receipt.from;
        tx.recipient = receipt.to;
        tx.gas_used = receipt.gas_used;
        if (const auto it = by_tx.find(i); it != by_tx.end()) {
            tx.root_call = build_tree(std::move(it->second), number, i);
        } else {
            // Nodes occasionally omit traces for plain transfers; synthesize
            // the root frame from the receipt so the tree stays well formed.
            tx.root_call.kind = CallKind::kCall;
            tx.root_call.from = receipt.from;
            tx.root_call.to = receipt.to.value_or(Address{});
            tx.root_call.gas_used = receipt.gas_used;
        }
        block.transactions.push_back(std::move(tx));
    }

    try {
        validate_block(block);
    } catch (const TraceParseError& e) {
        throw RpcError{RpcErrorKind::kProtocol,
                       "fetched block failed validation: " + std::string{e.what()}};
    }
    return block;
}

std::vector<BlockTrace> RpcClient::fetch_blocks(std::span<const std::uint64_t> numbers) const {
    std::vector<BlockTrace> out(numbers.size());
    std::vector<std::exception_ptr> failures(numbers.size());
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::min<std::size_t>(
        numbers.size(), static_cast<std::size_t>(std::max(config_.parallel_requests, 1)));

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= numbers.size()) {
                return;
            }
            try {
                out[i] = fetch_block(numbers[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    for (const std::exception_ptr& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return out;
}

}  // namespace txparallax
