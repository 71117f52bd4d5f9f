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

#include <txparallax/aggregate.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include <txparallax/date.hpp>

namespace txparallax {

namespace {

constexpr double kZ95 = 1.96;

using MetricExtractor = std::optional<double> (*)(const BlockMetrics&);

struct MetricSpec {
    const char* name;
    MetricExtractor extract;
};

//! Fixed report order for all emitters.
constexpr std::array<MetricSpec, 10> kMetricSpecs{{
    {"tx_count", [](const BlockMetrics& m) { return std::optional{static_cast<double>(m.tx_count)}; }},
    {"total_gas", [](const BlockMetrics& m) { return std::optional{static_cast<double>(m.total_gas)}; }},
    {"heaviest_cc_gas",
     [](const BlockMetrics& m) { return std::optional{static_cast<double>(m.heaviest_cc_gas)}; }},
    {"clique_gas",
     [](const BlockMetrics& m) {
         return m.clique_gas ? std::optional{static_cast<double>(*m.clique_gas)} : std::nullopt;
     }},
    {"schedule_gas",
     [](const BlockMetrics& m) { return std::optional{static_cast<double>(m.schedule_gas)}; }},
    {"heaviest_tx_gas",
     [](const BlockMetrics& m) { return std::optional{static_cast<double>(m.heaviest_tx_gas)}; }},
    {"dependency_count",
     [](const BlockMetrics& m) { return std::optional{static_cast<double>(m.dependency_count)}; }},
    {"speedup_lower", [](const BlockMetrics& m) { return std::optional{m.speedup_lower}; }},
    {"speedup_upper", [](const BlockMetrics& m) { return std::optional{m.speedup_upper}; }},
    {"speedup_loose", [](const BlockMetrics& m) { return std::optional{m.speedup_loose}; }},
}};

double mean_of(std::span<const double> values) {
    double sum = 0;
    for (const double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

}  // namespace

std::string_view window_name(Window window) {
    return window == Window::kDaily ? "daily" : "monthly";
}

std::optional<Window> window_from_name(std::string_view name) {
    if (name == "daily") return Window::kDaily;
    if (name == "monthly") return Window::kMonthly;
    return std::nullopt;
}

std::pair<double, double> confidence_interval(std::span<const double> values) {
    if (values.empty()) {
        throw StatsError{"confidence interval of an empty sample"};
    }
    const double mean = mean_of(values);
    if (values.size() == 1) {
        return {mean, mean};
    }
    double squares = 0;
    for (const double v : values) {
        squares += (v - mean) * (v - mean);
    }
    const double stddev = std::sqrt(squares / static_cast<double>(values.size() - 1));
    const double half = kZ95 * stddev / std::sqrt(static_cast<double>(values.size()));
    return {mean - half, mean + half};
}

double percentile(std::span<const double> values, double p) {
    if (values.empty()) {
        throw StatsError{"percentile of an empty sample"};
    }
    std::vector<double> sorted{values.begin(), values.end()};
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw StatsError{"correlation series differ in length"};
    }
    if (x.size() < 2) {
        throw StatsError{"correlation needs at least two points"};
    }
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0;
    double sxx = 0;
    double syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) {
        return std::nullopt;
    }
    return sxy / std::sqrt(sxx * syy);
}

double price_movement(const PriceBar& bar) {
    return (bar.high - bar.low) / bar.low;
}

std::vector<AggregateRow> aggregate(std::span<const MetricRecord> records, Window window) {
    std::map<std::string, std::vector<const MetricRecord*>> groups;
    for (const auto& record : records) {
        const auto day = civil_from_timestamp(static_cast<std::int64_t>(record.timestamp));
        groups[window == Window::kDaily ? day.to_string() : day.month_key()].push_back(&record);
    }

    std::vector<AggregateRow> rows;
    for (const auto& [key, members] : groups) {
        for (const auto& spec : kMetricSpecs) {
            std::vector<double> values;
            values.reserve(members.size());
            for (const auto* record : members) {
                if (const auto value = spec.extract(record->metrics)) {
                    values.push_back(*value);
                }
            }
            if (values.empty()) {
                continue;  // clique skipped across the whole window
            }
            AggregateRow row;
            row.window_key = key;
            row.metric = spec.name;
            row.mean = mean_of(values);
            const auto [low, high] = confidence_interval(values);
            row.ci_low = low;
            row.ci_high = high;
            row.p90 = percentile(values, 90.0);
            row.p99 = percentile(values, 99.0);
            row.count = values.size();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string format_float(double value) {
    std::array<char, 64> buffer{};
    const int written = std::snprintf(buffer.data(), buffer.size(), "%.6g", value);
    return std::string{buffer.data(), static_cast<std::size_t>(written)};
}

std::string render_aggregate_csv(std::span<const AggregateRow> rows) {
    std::string out = "window_key,metric,mean,ci_low,ci_high,p90,p99,count\n";
    for (const auto& row : rows) {
        out += row.window_key;
        out += ',';
        out += row.metric;
        out += ',';
        out += format_float(row.mean);
        out += ',';
        out += format_float(row.ci_low);
        out += ',';
        out += format_float(row.ci_high);
        out += ',';
        out += format_float(row.p90);
        out += ',';
        out += format_float(row.p99);
        out += ',';
        out += std::to_string(row.count);
        out += '\n';
    }
    return out;
}

std::string render_aggregate_json(std::span<const AggregateRow> rows) {
    std::string out = "[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) out += ',';
        out += "{\"window_key\":\"";
        out += rows[i].window_key;
        out += "\",\"metric\":\"";
        out += rows[i].metric;
        out += "\",\"mean\":";
        out += format_float(rows[i].mean);
        out += ",\"ci_low\":";
        out += format_float(rows[i].ci_low);
        out += ",\"ci_high\":";
        out += format_float(rows[i].ci_high);
        out += ",\"p90\":";
        out += format_float(rows[i].p90);
        out += ",\"p99\":";
        out += format_float(rows[i].p99);
        out += ",\"count\":";
        out += std::to_string(rows[i].count);
        out += '}';
    }
    out += "]";
    return out;
}

}  // namespace txparallax
