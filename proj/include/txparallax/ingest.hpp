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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <txparallax/trace.hpp>

namespace txparallax {

//! Raised for malformed trace files. `line` is 1-based; 0 when the error is
//! not attributable to a specific line.
class TraceParseError : public std::runtime_error {
  public:
    TraceParseError(std::size_t line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          line_{line} {}

    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

//! Checks the structural invariants of a parsed block: gas totals add up,
//! per-transaction gas is positive, root calls start at the sender.
//! Throws TraceParseError naming the block number and the offending field.
void validate_block(const BlockTrace& block, std::size_t line = 0);

//! Parses a newline-delimited trace file (one block JSON per line) and
//! feeds blocks to `sink` in file order. Block numbers must be strictly
//! increasing. Tolerates a trailing newline.
void parse_trace_stream(std::istream& input, const std::function<void(BlockTrace)>& sink);

std::vector<BlockTrace> parse_trace_file(std::istream& input);
std::vector<BlockTrace> load_trace_file(const std::filesystem::path& path);

//! Canonical single-line JSON for one block: fixed key order, lowercase
//! hex, decimal integers, no whitespace. parse/emit round-trips canonical
//! files byte for byte.
std::string emit_block_json(const BlockTrace& block);

void emit_trace_file(std::ostream& output, std::span<const BlockTrace> blocks);
void save_trace_file(const std::filesystem::path& path, std::span<const BlockTrace> blocks);

}  // namespace txparallax
