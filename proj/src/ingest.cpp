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

#include <txparallax/ingest.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace txparallax {

namespace {

constexpr std::size_t kMaxCallDepth = 512;

[[noreturn]] void fail(std::size_t line, const std::string& message) {
    throw TraceParseError(line, message);
}

std::uint64_t require_uint(const nlohmann::json& obj, const char* key, std::size_t line,
                           const std::string& context) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_unsigned()) {
        fail(line, context + ": missing or non-integer \"" + key + "\"");
    }
    return it->get<std::uint64_t>();
}

std::string require_string(const nlohmann::json& obj, const char* key, std::size_t line,
                           const std::string& context) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        fail(line, context + ": missing or non-string \"" + key + "\"");
    }
    return it->get<std::string>();
}

Address require_address(const nlohmann::json& obj, const char* key, std::size_t line,
                        const std::string& context) {
    const auto address = Address::from_hex(require_string(obj, key, line, context));
    if (!address) {
        fail(line, context + ": \"" + key + "\" is not a 20-byte hex address");
    }
    return *address;
}

CallFrame parse_frame(const nlohmann::json& obj, std::size_t line, const std::string& context,
                      std::size_t depth) {
    if (depth > kMaxCallDepth) {
        fail(line, context + ": call tree exceeds depth limit");
    }
    if (!obj.is_object()) {
        fail(line, context + ": call is not an object");
    }
    CallFrame frame;
    const std::string kind = require_string(obj, "kind", line, context);
    const auto parsed_kind = call_kind_from_name(kind);
    if (!parsed_kind) {
        fail(line, context + ": unknown call kind \"" + kind + "\"");
    }
    frame.kind = *parsed_kind;
    frame.from = require_address(obj, "from", line, context);
    frame.to = require_address(obj, "to", line, context);
    frame.gas_used = require_uint(obj, "gasUsed", line, context);
    const auto input = bytes_from_hex(require_string(obj, "input", line, context));
    if (!input) {
        fail(line, context + ": \"input\" is not a hex byte string");
    }
    const std::size_t kept = std::min<std::size_t>(input->size(), kMaxInputBytes);
    frame.input.assign(input->begin(), input->begin() + static_cast<std::ptrdiff_t>(kept));
    const auto calls = obj.find("calls");
    if (calls == obj.end() || !calls->is_array()) {
        fail(line, context + ": missing \"calls\" array");
    }
    frame.children.reserve(calls->size());
    for (const auto& child : *calls) {
        frame.children.push_back(parse_frame(child, line, context, depth + 1));
    }
    return frame;
}

Transaction parse_transaction(const nlohmann::json& obj, std::size_t line,
                              const std::string& context) {
    if (!obj.is_object()) {
        fail(line, context + ": transaction is not an object");
    }
    Transaction tx;
    const auto hash = Hash32::from_hex(require_string(obj, "hash", line, context));
    if (!hash) {
        fail(line, context + ": \"hash\" is not a 32-byte hex string");
    }
    tx.hash = *hash;
    tx.sender = require_address(obj, "from", line, context);
    const auto to = obj.find("to");
    if (to == obj.end()) {
        fail(line, context + ": missing \"to\"");
    }
    if (!to->is_null()) {
        if (!to->is_string()) {
            fail(line, context + ": \"to\" must be an address or null");
        }
        const auto recipient = Address::from_hex(to->get<std::string>());
        if (!recipient) {
            fail(line, context + ": \"to\" is not a 20-byte hex address");
        }
        tx.recipient = *recipient;
    }
    tx.gas_used = require_uint(obj, "gasUsed", line, context);
    const auto calls = obj.find("calls");
    if (calls == obj.end() || !calls->is_array() || calls->size() != 1) {
        fail(line, context + ": \"calls\" must hold exactly the root call");
    }
    tx.root_call = parse_frame(calls->front(), line, context, 0);
    return tx;
}

BlockTrace parse_block(const nlohmann::json& obj, std::size_t line) {
    if (!obj.is_object()) {
        fail(line, "block is not a JSON object");
    }
    BlockTrace block;
    block.number = require_uint(obj, "number", line, "block");
    const std::string context = "block " + std::to_string(block.number);
    block.timestamp = require_uint(obj, "timestamp", line, context);
    block.gas_used = require_uint(obj, "gasUsed", line, context);
    const auto txs = obj.find("txs");
    if (txs == obj.end() || !txs->is_array()) {
        fail(line, context + ": missing \"txs\" array");
    }
    block.transactions.reserve(txs->size());
    for (std::size_t i = 0; i < txs->size(); ++i) {
        block.transactions.push_back(
            parse_transaction((*txs)[i], line, context + " tx " + std::to_string(i)));
    }
    return block;
}

void emit_frame(std::string& out, const CallFrame& frame) {
    out += "{\"kind\":\"";
    out += call_kind_name(frame.kind);
    out += "\",\"from\":\"";
    out += frame.from.to_hex();
    out += "\",\"to\":\"";
    out += frame.to.to_hex();
    out += "\",\"gasUsed\":";
    out += std::to_string(frame.gas_used);
    out += ",\"input\":\"";
    out += bytes_to_hex(frame.input.data(), frame.input.size());
    out += "\",\"calls\":[";
    for (std::size_t i = 0; i < frame.children.size(); ++i) {
        if (i > 0) out += ',';
        emit_frame(out, frame.children[i]);
    }
    out += "]}";
}

}  // namespace

void validate_block(const BlockTrace& block, std::size_t line) {
    const std::string context = "block " + std::to_string(block.number);
    std::uint64_t tx_gas_sum = 0;
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const Transaction& tx = block.transactions[i];
        if (tx.gas_used == 0) {
            fail(line, context + " tx " + std::to_string(i) + ": gasUsed must be positive");
        }
        if (tx.root_call.from != tx.sender) {
            fail(line, context + " tx " + std::to_string(i) +
                           ": root call \"from\" does not match transaction sender");
        }
        tx_gas_sum += tx.gas_used;
    }
    if (tx_gas_sum != block.gas_used) {
        fail(line, context + ": gasUsed " + std::to_string(block.gas_used) +
                       " does not equal transaction sum " + std::to_string(tx_gas_sum));
    }
}

void parse_trace_stream(std::istream& input, const std::function<void(BlockTrace)>& sink) {
    std::string line;
    std::size_t line_no = 0;
    bool have_previous = false;
    std::uint64_t previous_number = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded()) {
            fail(line_no, "malformed JSON");
        }
        BlockTrace block = parse_block(doc, line_no);
        validate_block(block, line_no);
        if (have_previous && block.number <= previous_number) {
            fail(line_no, "block numbers must be strictly increasing (got " +
                              std::to_string(block.number) + " after " +
                              std::to_string(previous_number) + ")");
        }
        previous_number = block.number;
        have_previous = true;
        sink(std::move(block));
    }
}

std::vector<BlockTrace> parse_trace_file(std::istream& input) {
    std::vector<BlockTrace> blocks;
    parse_trace_stream(input, [&](BlockTrace block) { blocks.push_back(std::move(block)); });
    return blocks;
}

std::vector<BlockTrace> load_trace_file(const std::filesystem::path& path) {
    std::ifstream input{path};
    if (!input) {
        throw TraceParseError(0, "cannot open trace file: " + path.string());
    }
    return parse_trace_file(input);
}

std::string emit_block_json(const BlockTrace& block) {
    std::string out;
    out += "{\"number\":";
    out += std::to_string(block.number);
    out += ",\"timestamp\":";
    out += std::to_string(block.timestamp);
    out += ",\"gasUsed\":";
    out += std::to_string(block.gas_used);
    out += ",\"txs\":[";
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const Transaction& tx = block.transactions[i];
        if (i > 0) out += ',';
        out += "{\"hash\":\"";
        out += tx.hash.to_hex();
        out += "\",\"from\":\"";
        out += tx.sender.to_hex();
        out += "\",\"to\":";
        if (tx.recipient) {
            out += '"';
            out += tx.recipient->to_hex();
            out += '"';
        } else {
            out += "null";
        }
        out += ",\"gasUsed\":";
        out += std::to_string(tx.gas_used);
        out += ",\"calls\":[";
        emit_frame(out, tx.root_call);
        out += "]}";
    }
    out += "]}";
    return out;
}

void emit_trace_file(std::ostream& output, std::span<const BlockTrace> blocks) {
    for (const BlockTrace& block : blocks) {
        output << emit_block_json(block) << '\n';
    }
}

void save_trace_file(const std::filesystem::path& path, std::span<const BlockTrace> blocks) {
    std::ofstream output{path, std::ios::binary};
    if (!output) {
        throw TraceParseError(0, "cannot open output file: " + path.string());
    }
    emit_trace_file(output, blocks);
}

}  // namespace txparallax
