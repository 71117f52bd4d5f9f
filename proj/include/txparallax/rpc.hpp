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

#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <txparallax/trace.hpp>

namespace txparallax {

enum class RpcErrorKind : std::uint8_t {
    kNetwork,         // endpoint unreachable or repeatedly failing
    kNotFound,        // block does not exist on the node
    kNoTraceSupport,  // node does not expose the trace method
    kProtocol,        // unexpected or invalid response payload
};

std::string_view rpc_error_kind_name(RpcErrorKind kind);

class RpcError : public std::runtime_error {
  public:
    RpcError(RpcErrorKind kind, const std::string& message)
        : std::runtime_error(std::string{rpc_error_kind_name(kind)} + ": " + message), kind_{kind} {}

    RpcErrorKind kind() const { return kind_; }

  private:
    RpcErrorKind kind_;
};

struct RpcConfig {
    std::string url;  // http://host[:port][/path]
    //! Erigon-style flat trace method; the name is configurable for
    //! compatible endpoints.
    std::string trace_method{"trace_block"};
    int max_attempts{5};
    std::chrono::milliseconds backoff_base{250};
    std::chrono::milliseconds timeout{30000};
    int parallel_requests{8};
};

//! JSON-RPC 2.0 client assembling BlockTraces from block headers, receipts
//! and flat call traces. Transient failures retry with exponential backoff;
//! every returned block passes full trace validation.
class RpcClient {
  public:
    explicit RpcClient(RpcConfig config);

    BlockTrace fetch_block(std::uint64_t number) const;

    //! Fetches many blocks with a bounded number of in-flight requests;
    //! results preserve input order.
    std::vector<BlockTrace> fetch_blocks(std::span<const std::uint64_t> numbers) const;

    const RpcConfig& config() const { return config_; }

  private:
    RpcConfig config_;
};

}  // namespace txparallax
