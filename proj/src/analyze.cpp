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

#include <txparallax/analyze.hpp>

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <txparallax/union_find.hpp>

namespace txparallax {

namespace {

std::vector<std::vector<std::uint32_t>> adjacency_lists(const TxGraph& graph) {
    std::vector<std::vector<std::uint32_t>> adjacent(graph.vertices.size());
    for (const auto& [u, v] : graph.edges) {
        adjacent[u].push_back(v);
        adjacent[v].push_back(u);
    }
    return adjacent;
}

//! Priority used throughout: descending gas, then ascending position.
std::vector<std::uint32_t> priority_order(const TxGraph& graph) {
    std::vector<std::uint32_t> order(graph.vertices.size());
    std::iota(order.begin(), order.end(), 0U);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return graph.vertices[a].gas > graph.vertices[b].gas;
    });
    return order;
}

//! Maximum-weight clique search over a bitset adjacency in a fixed vertex
//! order, with Ostergard-style suffix bounds c[i].
class CliqueSearch {
  public:
    CliqueSearch(const TxGraph& graph, std::optional<std::chrono::milliseconds> budget)
        : n_{graph.vertices.size()}, words_{(n_ + 63) / 64} {
        if (budget) {
            deadline_ = std::chrono::steady_clock::now() + *budget;
        }

        // Weight-degeneracy order: peel the vertex with the smallest summed
        // neighbour weight first; process the reverse so dense cores come
        // first and suffixes stay light.
        const auto adjacent = adjacency_lists(graph);
        std::vector<std::uint64_t> weighted_degree(n_, 0);
        for (std::size_t v = 0; v < n_; ++v) {
            for (const auto u : adjacent[v]) {
                weighted_degree[v] += graph.vertices[u].gas;
            }
        }
        std::vector<bool> removed(n_, false);
        std::vector<std::uint32_t> removal;
        removal.reserve(n_);
        for (std::size_t step = 0; step < n_; ++step) {
            std::size_t pick = n_;
            for (std::size_t v = 0; v < n_; ++v) {
                if (removed[v]) continue;
                if (pick == n_ || weighted_degree[v] < weighted_degree[pick]) {
                    pick = v;
                }
            }
            removed[pick] = true;
            removal.push_back(static_cast<std::uint32_t>(pick));
            for (const auto u : adjacent[pick]) {
                if (!removed[u]) {
                    weighted_degree[u] -= graph.vertices[pick].gas;
                }
            }
        }
        original_of_.assign(removal.rbegin(), removal.rend());
        std::vector<std::uint32_t> position(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            position[original_of_[i]] = static_cast<std::uint32_t>(i);
        }

        weight_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            weight_[i] = graph.vertices[original_of_[i]].gas;
        }
        adj_.assign(n_, std::vector<std::uint64_t>(words_, 0));
        for (const auto& [u, v] : graph.edges) {
            const auto a = position[u];
            const auto b = position[v];
            adj_[a][b / 64] |= std::uint64_t{1} << (b % 64);
            adj_[b][a / 64] |= std::uint64_t{1} << (a % 64);
        }
    }

    CliqueResult run() {
        CliqueResult result;
        if (n_ == 0) {
            return result;
        }
        // Seed the incumbent with the heaviest vertex so a timeout still
        // returns a sound lower bound.
        std::size_t heaviest = 0;
        for (std::size_t i = 1; i < n_; ++i) {
            if (weight_[i] > weight_[heaviest]) {
                heaviest = i;
            }
        }
        best_weight_ = weight_[heaviest];
        best_members_ = {static_cast<std::uint32_t>(heaviest)};

        suffix_best_.assign(n_, 0);
        std::vector<std::uint64_t> candidates(words_);
        for (std::size_t i = n_; i-- > 0;) {
            for (std::size_t w = 0; w < words_; ++w) {
                candidates[w] = adj_[i][w];
            }
            mask_suffix(candidates, i + 1);
            current_.assign(1, static_cast<std::uint32_t>(i));
            expand(candidates, weight_[i]);
            if (timed_out_) {
                break;
            }
            suffix_best_[i] = best_weight_;
        }

        result.gas = best_weight_;
        result.exact = !timed_out_;
        result.members.reserve(best_members_.size());
        for (const auto i : best_members_) {
            result.members.push_back(original_of_[i]);
        }
        std::sort(result.members.begin(), result.members.end());
        return result;
    }

  private:
    void mask_suffix(std::vector<std::uint64_t>& bits, std::size_t from) const {
        for (std::size_t w = 0; w < words_; ++w) {
            if ((w + 1) * 64 <= from) {
                bits[w] = 0;
            } else if (w * 64 < from) {
                bits[w] &= ~std::uint64_t{0} << (from - w * 64);
            }
        }
    }

    bool over_deadline() {
        if (!deadline_) {
            return false;
        }
        if ((++ticks_ & 1023U) != 0) {
            return timed_out_;
        }
        if (std::chrono::steady_clock::now() > *deadline_) {
            timed_out_ = true;
        }
        return timed_out_;
    }

    void record_if_better(std::uint64_t weight) {
        if (weight > best_weight_) {
            best_weight_ = weight;
            best_members_ = current_;
        }
    }

    void expand(std::vector<std::uint64_t>& candidates, std::uint64_t weight) {
        if (timed_out_ || over_deadline()) {
            return;
        }
        std::uint64_t capacity = weight;
        bool any = false;
        for (std::size_t w = 0; w < words_; ++w) {
            auto bits = candidates[w];
            any = any || bits != 0;
            while (bits != 0) {
                const auto b = static_cast<std::size_t>(std::countr_zero(bits));
                capacity += weight_[w * 64 + b];
                bits &= bits - 1;
            }
        }
        if (!any) {
            record_if_better(weight);
            return;
        }

        std::vector<std::uint64_t> next(words_);
        while (true) {
            if (capacity <= best_weight_) {
                return;
            }
            std::size_t u = n_;
            for (std::size_t w = 0; w < words_; ++w) {
                if (candidates[w] != 0) {
                    u = w * 64 + static_cast<std::size_t>(std::countr_zero(candidates[w]));
                    break;
                }
            }
            if (u == n_) {
                return;
            }
            if (weight + suffix_best_[u] <= best_weight_) {
                return;
            }
            candidates[u / 64] &= ~(std::uint64_t{1} << (u % 64));

            bool child_any = false;
            for (std::size_t w = 0; w < words_; ++w) {
                next[w] = candidates[w] & adj_[u][w];
                child_any = child_any || next[w] != 0;
            }
            current_.push_back(static_cast<std::uint32_t>(u));
            if (child_any) {
                auto child = next;
                expand(child, weight + weight_[u]);
            } else {
                record_if_better(weight + weight_[u]);
            }
            current_.pop_back();
            if (timed_out_) {
                return;
            }
            capacity -= weight_[u];
        }
    }

    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint32_t> original_of_;  // order index -> original vertex
    std::vector<std::uint64_t> weight_;       // by order index
    std::vector<std::vector<std::uint64_t>> adj_;
    std::vector<std::uint64_t> suffix_best_;
    std::vector<std::uint32_t> current_;
    std::vector<std::uint32_t> best_members_;
    std::uint64_t best_weight_{0};
    std::optional<std::chrono::steady_clock::time_point> deadline_;
    std::uint64_t ticks_{0};
    bool timed_out_{false};
};

}  // namespace

std::string_view schedule_mode_name(ScheduleMode mode) {
    return mode == ScheduleMode::kEarliestStart ? "earliest-start" : "barrier-rounds";
}

std::optional<ScheduleMode> schedule_mode_from_name(std::string_view name) {
    if (name == "earliest-start") return ScheduleMode::kEarliestStart;
    if (name == "barrier-rounds") return ScheduleMode::kBarrierRounds;
    return std::nullopt;
}

ComponentResult heaviest_component(const TxGraph& graph) {
    ComponentResult result;
    const std::size_t n = graph.vertices.size();
    if (n == 0) {
        return result;
    }
    DisjointSet dsu{n};
    for (const auto& [u, v] : graph.edges) {
        dsu.unite(u, v);
    }
    std::vector<std::uint64_t> component_gas(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        component_gas[dsu.find(i)] += graph.vertices[i].gas;
    }
    std::size_t best_root = dsu.find(0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = dsu.find(i);
        if (component_gas[root] > component_gas[best_root]) {
            best_root = root;
        }
    }
    result.gas = component_gas[best_root];
    for (std::size_t i = 0; i < n; ++i) {
        if (dsu.find(i) == best_root) {
            result.members.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return result;
}

CliqueResult max_weight_clique(const TxGraph& graph,
                               std::optional<std::chrono::milliseconds> budget) {
    return CliqueSearch{graph, budget}.run();
}

Schedule list_schedule(const TxGraph& graph, ScheduleMode mode) {
    Schedule schedule;
    schedule.mode = mode;
    const std::size_t n = graph.vertices.size();
    schedule.assignments.resize(n);
    if (n == 0) {
        return schedule;
    }
    const auto adjacent = adjacency_lists(graph);
    const auto order = priority_order(graph);

    if (mode == ScheduleMode::kEarliestStart) {
        std::vector<bool> placed(n, false);
        for (const auto v : order) {
            std::uint64_t start = 0;
            for (const auto u : adjacent[v]) {
                if (placed[u]) {
                    start = std::max(start, schedule.assignments[u].end);
                }
            }
            schedule.assignments[v] = {start, start + graph.vertices[v].gas};
            placed[v] = true;
            schedule.makespan = std::max(schedule.makespan, schedule.assignments[v].end);
        }
        return schedule;
    }

    std::vector<bool> placed(n, false);
    std::size_t remaining = n;
    std::uint64_t round_start = 0;
    std::vector<bool> in_round(n, false);
    while (remaining > 0) {
        std::vector<std::uint32_t> round;
        std::fill(in_round.begin(), in_round.end(), false);
        for (const auto v : order) {
            if (placed[v]) {
                continue;
            }
            bool independent = true;
            for (const auto u : adjacent[v]) {
                if (in_round[u]) {
                    independent = false;
                    break;
                }
            }
            if (independent) {
                round.push_back(v);
                in_round[v] = true;
            }
        }
        std::uint64_t round_length = 0;
        for (const auto v : round) {
            schedule.assignments[v] = {round_start, round_start + graph.vertices[v].gas};
            round_length = std::max(round_length, graph.vertices[v].gas);
            placed[v] = true;
        }
        remaining -= round.size();
        round_start += round_length;
    }
    schedule.makespan = round_start;
    return schedule;
}

double relative_error(std::uint64_t schedule_gas, std::uint64_t clique_gas) {
    if (clique_gas == 0) {
        throw std::invalid_argument{"relative_error requires a positive clique weight"};
    }
    return (static_cast<double>(schedule_gas) - static_cast<double>(clique_gas)) /
           static_cast<double>(clique_gas);
}

BlockMetrics analyze_block(const TxGraph& graph, const AnalyzeOptions& opts) {
    BlockMetrics metrics;
    metrics.tx_count = graph.vertices.size();
    metrics.dependency_count = dependency_count(graph);
    for (const auto& vertex : graph.vertices) {
        metrics.total_gas += vertex.gas;
        metrics.heaviest_tx_gas = std::max(metrics.heaviest_tx_gas, vertex.gas);
    }
    if (graph.vertices.empty()) {
        return metrics;
    }

    metrics.heaviest_cc_gas = heaviest_component(graph).gas;
    const auto schedule = list_schedule(graph, opts.schedule_mode);
    metrics.schedule_gas = schedule.makespan;
    if (opts.compute_clique) {
        const auto clique = max_weight_clique(graph, opts.clique_budget);
        metrics.clique_gas = clique.gas;
        metrics.clique_exact = clique.exact;
    }

    const auto total = static_cast<double>(metrics.total_gas);
    metrics.speedup_lower = total / static_cast<double>(metrics.heaviest_cc_gas);
    const auto upper_denominator = metrics.clique_gas ? *metrics.clique_gas : metrics.schedule_gas;
    metrics.speedup_upper = total / static_cast<double>(upper_denominator);
    metrics.speedup_loose = total / static_cast<double>(metrics.heaviest_tx_gas);
    return metrics;
}

}  // namespace txparallax
