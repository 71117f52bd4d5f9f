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

#include <txparallax/graph.hpp>

#include <algorithm>
#include <map>

#include <txparallax/union_find.hpp>

namespace txparallax {

namespace {

void check_batch(std::span<const BlockTrace> blocks) {
    if (blocks.empty()) {
        throw GraphError{"batch is empty"};
    }
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        if (blocks[i].number != blocks[i - 1].number + 1) {
            throw GraphError{"batch blocks are not consecutive: " +
                             std::to_string(blocks[i - 1].number) + " followed by " +
                             std::to_string(blocks[i].number)};
        }
    }
}

bool sorted_ids_intersect(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
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

bool indexed_conflict(const IndexedScopes& a, const IndexedScopes& b, ConflictMode mode) {
    if (mode == ConflictMode::kAnyTouch) {
        return sorted_ids_intersect(a.touched, b.touched);
    }
    return sorted_ids_intersect(a.written, b.scoped) || sorted_ids_intersect(a.scoped, b.written);
}

AccessMode natural_edge_mode(CallKind kind) {
    return kind == CallKind::kStaticCall ? AccessMode::kRead : AccessMode::kWrite;
}

void append_uint(std::string& out, std::uint64_t value) {
    out += std::to_string(value);
}

}  // namespace

BatchScopes collect_scopes(std::span<const BlockTrace> blocks, const DisentangleConfig* rewrites) {
    check_batch(blocks);
    BatchScopes batch;
    batch.first_block = blocks.front().number;
    batch.last_block = blocks.back().number;
    for (const auto& block : blocks) {
        for (const auto& tx : block.transactions) {
            batch.vertices.push_back(TxVertex{tx.hash, block.number, tx.gas_used});
            if (rewrites != nullptr) {
                batch.scope_sets.push_back(disentangled_tx_scope_set(tx, *rewrites, &batch.stats));
            } else {
                batch.scope_sets.push_back(tx_scope_set(tx));
            }
        }
    }

    std::map<ScopeTarget, std::uint32_t> interner;
    const auto intern = [&](const ScopeTarget& target) {
        return interner.emplace(target, static_cast<std::uint32_t>(interner.size())).first->second;
    };
    batch.indexed.reserve(batch.scope_sets.size());
    for (const auto& set : batch.scope_sets) {
        IndexedScopes indexed;
        indexed.touched.reserve(set.touched.size());
        for (const auto& target : set.touched) {
            indexed.touched.push_back(intern(target));
        }
        indexed.scoped.reserve(set.scoped.size());
        for (const auto& scope : set.scoped) {
            const auto id = intern(scope.target);
            indexed.scoped.push_back(id);
            if (scope.mode == AccessMode::kWrite) {
                indexed.written.push_back(id);
            }
        }
        std::sort(indexed.touched.begin(), indexed.touched.end());
        std::sort(indexed.scoped.begin(), indexed.scoped.end());
        std::sort(indexed.written.begin(), indexed.written.end());
        batch.indexed.push_back(std::move(indexed));
    }
    return batch;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> conflict_edges_serial(
    std::span<const IndexedScopes> scopes, ConflictMode mode) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    const std::size_t n = scopes.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (indexed_conflict(scopes[i], scopes[j], mode)) {
                edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
            }
        }
    }
    return edges;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> conflict_edges_parallel(
    std::span<const IndexedScopes> scopes, ConflictMode mode) {
    const std::int64_t n = static_cast<std::int64_t>(scopes.size());
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> rows(scopes.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        for (std::int64_t j = i + 1; j < n; ++j) {
            if (indexed_conflict(scopes[static_cast<std::size_t>(i)], scopes[static_cast<std::size_t>(j)],
                                 mode)) {
                row.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
            }
        }
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& row : rows) {
        edges.insert(edges.end(), row.begin(), row.end());
    }
    return edges;
}

AddressGraph build_address_graph(std::span<const BlockTrace> blocks,
                                 const DisentangleConfig* rewrites) {
    check_batch(blocks);
    AddressGraph graph;
    graph.first_block = blocks.front().number;
    graph.last_block = blocks.back().number;

    std::uint32_t tx_index = 0;
    for (const auto& original : blocks) {
        const BlockTrace* block = &original;
        BlockTrace rewritten;
        if (rewrites != nullptr) {
            rewritten = disentangle_trees(original, *rewrites, nullptr);
            block = &rewritten;
        }
        for (const auto& tx : block->transactions) {
            for_each_frame(tx.root_call, [&](const CallFrame& frame) {
                if (rewrites != nullptr && is_rewritten_token_call(frame, *rewrites)) {
                    for (AccessScope& scope : rewrite_erc20(frame, frame.from, *rewrites, nullptr)) {
                        graph.edges.push_back(AddressEdge{ScopeTarget{frame.from},
                                                          std::move(scope.target), frame.gas_used,
                                                          tx_index, scope.mode});
                    }
                } else {
                    graph.edges.push_back(AddressEdge{ScopeTarget{frame.from}, ScopeTarget{frame.to},
                                                      frame.gas_used, tx_index,
                                                      natural_edge_mode(frame.kind)});
                }
            });
            ++tx_index;
        }
    }

    graph.vertices.reserve(graph.edges.size() * 2);
    for (const auto& edge : graph.edges) {
        graph.vertices.push_back(edge.from);
        graph.vertices.push_back(edge.to);
    }
    std::sort(graph.vertices.begin(), graph.vertices.end());
    graph.vertices.erase(std::unique(graph.vertices.begin(), graph.vertices.end()),
                         graph.vertices.end());
    return graph;
}

TxGraph tx_graph_from_scopes(const BatchScopes& scopes, ConflictMode mode, bool parallel_kernel) {
    TxGraph graph;
    graph.vertices = scopes.vertices;
    graph.first_block = scopes.first_block;
    graph.last_block = scopes.last_block;
    graph.mode = mode;
    graph.edges = parallel_kernel ? conflict_edges_parallel(scopes.indexed, mode)
                                  : conflict_edges_serial(scopes.indexed, mode);
    return graph;
}

TxGraph build_tx_graph(std::span<const BlockTrace> blocks, ConflictMode mode,
                       const DisentangleConfig* rewrites) {
    return tx_graph_from_scopes(collect_scopes(blocks, rewrites), mode);
}

std::uint64_t dependency_count(const TxGraph& graph) {
    return graph.edges.size();
}

std::vector<std::span<const BlockTrace>> merge_blocks(std::span<const BlockTrace> blocks,
                                                      std::size_t k) {
    if (k == 0) {
        throw GraphError{"batch size must be positive"};
    }
    check_batch(blocks);
    std::vector<std::span<const BlockTrace>> batches;
    for (std::size_t start = 0; start + k <= blocks.size(); start += k) {
        batches.push_back(blocks.subspan(start, k));
    }
    return batches;
}

std::vector<std::uint32_t> tx_components(const TxGraph& graph) {
    DisjointSet dsu{graph.vertices.size()};
    for (const auto& [u, v] : graph.edges) {
        dsu.unite(u, v);
    }
    std::vector<std::uint32_t> label(graph.vertices.size());
    std::vector<std::uint32_t> smallest(graph.vertices.size(), UINT32_MAX);
    for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
        const auto root = dsu.find(i);
        smallest[root] = std::min(smallest[root], static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
        label[i] = smallest[dsu.find(i)];
    }
    return label;
}

std::vector<std::uint32_t> induced_tx_components(const AddressGraph& graph,
                                                 std::span<const TxScopeSet> scope_sets) {
    const auto vertex_id = [&](const ScopeTarget& target) -> std::size_t {
        const auto it = std::lower_bound(graph.vertices.begin(), graph.vertices.end(), target);
        if (it == graph.vertices.end() || *it != target) {
            throw GraphError{"scope target " + render_target(target) + " is not a graph vertex"};
        }
        return static_cast<std::size_t>(it - graph.vertices.begin());
    };

    DisjointSet dsu{graph.vertices.size()};
    for (const auto& edge : graph.edges) {
        dsu.unite(vertex_id(edge.from), vertex_id(edge.to));
    }

    std::vector<std::size_t> tx_root(scope_sets.size());
    for (std::size_t i = 0; i < scope_sets.size(); ++i) {
        const auto& touched = scope_sets[i].touched;
        if (touched.empty()) {
            throw GraphError{"transaction " + std::to_string(i) + " touches no targets"};
        }
        const auto root = dsu.find(vertex_id(touched.front()));
        for (const auto& target : touched) {
            if (dsu.find(vertex_id(target)) != root) {
                throw GraphError{"transaction " + std::to_string(i) +
                                 " spans multiple address components"};
            }
        }
        tx_root[i] = root;
    }

    std::vector<std::uint32_t> label(scope_sets.size());
    std::map<std::size_t, std::uint32_t> smallest;
    for (std::size_t i = 0; i < scope_sets.size(); ++i) {
        smallest.emplace(tx_root[i], static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = 0; i < scope_sets.size(); ++i) {
        label[i] = smallest.at(tx_root[i]);
    }
    return label;
}

std::string dump_address_graph(const AddressGraph& graph) {
    auto edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [](const AddressEdge& a, const AddressEdge& b) {
        if (a.from != b.from) return a.from < b.from;
        if (a.to != b.to) return a.to < b.to;
        if (a.tx_index != b.tx_index) return a.tx_index < b.tx_index;
        if (a.gas != b.gas) return a.gas < b.gas;
        return static_cast<int>(a.mode) < static_cast<int>(b.mode);
    });

    std::string out = "{\"first_block\":";
    append_uint(out, graph.first_block);
    out += ",\"last_block\":";
    append_uint(out, graph.last_block);
    out += ",\"vertices\":[";
    for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
        if (i > 0) out += ',';
        out += '"';
        out += render_target(graph.vertices[i]);
        out += '"';
    }
    out += "],\"edges\":[";
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (i > 0) out += ',';
        out += "{\"from\":\"";
        out += render_target(edges[i].from);
        out += "\",\"to\":\"";
        out += render_target(edges[i].to);
        out += "\",\"gas\":";
        append_uint(out, edges[i].gas);
        out += ",\"tx\":";
        append_uint(out, edges[i].tx_index);
        out += ",\"mode\":\"";
        out += access_mode_name(edges[i].mode);
        out += "\"}";
    }
    out += "]}";
    return out;
}

std::string dump_tx_graph(const TxGraph& graph) {
    std::string out = "{\"first_block\":";
    append_uint(out, graph.first_block);
    out += ",\"last_block\":";
    append_uint(out, graph.last_block);
    out += ",\"mode\":\"";
    out += conflict_mode_name(graph.mode);
    out += "\",\"vertices\":[";
    for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
        if (i > 0) out += ',';
        out += "{\"hash\":\"";
        out += graph.vertices[i].hash.to_hex();
        out += "\",\"block\":";
        append_uint(out, graph.vertices[i].block_number);
        out += ",\"gas\":";
        append_uint(out, graph.vertices[i].gas);
        out += '}';
    }
    out += "],\"edges\":[";
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        if (i > 0) out += ',';
        out += '[';
        append_uint(out, graph.edges[i].first);
        out += ',';
        append_uint(out, graph.edges[i].second);
        out += ']';
    }
    out += "]}";
    return out;
}

}  // namespace txparallax
