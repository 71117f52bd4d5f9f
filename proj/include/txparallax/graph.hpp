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
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <txparallax/disentangle.hpp>
#include <txparallax/scopes.hpp>
#include <txparallax/trace.hpp>

namespace txparallax {

class GraphError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Address-level view: a vertex per touched scope target, an edge per call.
//! Rewritten token calls fan out into one edge per virtual cell they access,
//! each keeping the call's gas weight.
struct AddressEdge {
    ScopeTarget from;
    ScopeTarget to;
    std::uint64_t gas{0};
    std::uint32_t tx_index{0};
    AccessMode mode{AccessMode::kWrite};
};

struct AddressGraph {
    std::vector<ScopeTarget> vertices;  // sorted, unique
    std::vector<AddressEdge> edges;     // tx order, frames pre-order
    std::uint64_t first_block{0};
    std::uint64_t last_block{0};
};

//! Transaction-level view: gas-weighted vertices, an edge per conflicting
//! pair under the chosen mode.
struct TxVertex {
    Hash32 hash;
    std::uint64_t block_number{0};
    std::uint64_t gas{0};
};

struct TxGraph {
    std::vector<TxVertex> vertices;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u < v, lexicographic
    std::uint64_t first_block{0};
    std::uint64_t last_block{0};
    ConflictMode mode{ConflictMode::kWriteAware};
};

//! Scope targets interned to dense ids so the conflict kernels work on
//! sorted integer vectors.
struct IndexedScopes {
    std::vector<std::uint32_t> touched;  // sorted ids of all touched targets
    std::vector<std::uint32_t> scoped;   // sorted ids of all storage scopes
    std::vector<std::uint32_t> written;  // sorted subset of scoped with write access
};

//! Per-batch transaction scope summary shared by the graph builders and the
//! analysis pipeline, so scopes are derived once per batch.
struct BatchScopes {
    std::vector<TxVertex> vertices;
    std::vector<TxScopeSet> scope_sets;
    std::vector<IndexedScopes> indexed;
    std::uint64_t first_block{0};
    std::uint64_t last_block{0};
    DisentangleStats stats;
};

//! Derives (optionally disentangled) scope sets for every transaction of a
//! consecutive block batch.
BatchScopes collect_scopes(std::span<const BlockTrace> blocks, const DisentangleConfig* rewrites);

//! Conflict edge kernels over indexed scope sets. Both return the pair list
//! sorted lexicographically; the serial version is the reference, the
//! parallel version distributes rows over OpenMP threads.
std::vector<std::pair<std::uint32_t, std::uint32_t>> conflict_edges_serial(
    std::span<const IndexedScopes> scopes, ConflictMode mode);
std::vector<std::pair<std::uint32_t, std::uint32_t>> conflict_edges_parallel(
    std::span<const IndexedScopes> scopes, ConflictMode mode);

AddressGraph build_address_graph(std::span<const BlockTrace> blocks,
                                 const DisentangleConfig* rewrites);

TxGraph build_tx_graph(std::span<const BlockTrace> blocks, ConflictMode mode,
                       const DisentangleConfig* rewrites);
TxGraph tx_graph_from_scopes(const BatchScopes& scopes, ConflictMode mode,
                             bool parallel_kernel = true);

std::uint64_t dependency_count(const TxGraph& graph);

//! Splits consecutive blocks into non-overlapping batches of k; a trailing
//! partial batch is dropped.
std::vector<std::span<const BlockTrace>> merge_blocks(std::span<const BlockTrace> blocks,
                                                      std::size_t k);

//! Component label per transaction, where each label is the smallest member
//! transaction index; derived from TxGraph edges.
std::vector<std::uint32_t> tx_components(const TxGraph& graph);

//! The same labelling induced by AddressGraph connectivity: a transaction
//! belongs to the component its touched targets live in. Throws GraphError
//! if a transaction's targets span multiple address components.
std::vector<std::uint32_t> induced_tx_components(const AddressGraph& graph,
                                                 std::span<const TxScopeSet> scope_sets);

//! Canonical single-line JSON dumps with sorted vertex and edge lists.
std::string dump_address_graph(const AddressGraph& graph);
std::string dump_tx_graph(const TxGraph& graph);

}  // namespace txparallax
