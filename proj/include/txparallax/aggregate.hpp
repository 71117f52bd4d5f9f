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
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <txparallax/analyze.hpp>
#include <txparallax/prices.hpp>

namespace txparallax {

class StatsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Window : std::uint8_t { kDaily, kMonthly };

std::string_view window_name(Window window);
std::optional<Window> window_from_name(std::string_view name);

//! One analyzed block or batch, positioned in time for windowing.
struct MetricRecord {
    std::uint64_t first_block{0};
    std::uint64_t last_block{0};
    std::uint64_t timestamp{0};
    BlockMetrics metrics;
};

//! Mean with 95% confidence interval and nearest-rank percentiles of one
//! metric over one window.
struct AggregateRow {
    std::string window_key;
    std::string metric;
    double mean{0};
    double ci_low{0};
    double ci_high{0};
    double p90{0};
    double p99{0};
    std::uint64_t count{0};
};

//! mean +/- 1.96 * s / sqrt(n) with s the sample standard deviation; a
//! single value yields the degenerate interval (mean, mean).
std::pair<double, double> confidence_interval(std::span<const double> values);

//! Nearest-rank percentile: the value at 1-based index ceil(p/100 * n) of
//! the sorted list.
double percentile(std::span<const double> values, double p);

//! Product-moment correlation; absent when either series is constant.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

//! Daily volatility measure (high - low) / low.
double price_movement(const PriceBar& bar);

//! Groups records into UTC daily or monthly windows and aggregates every
//! metric. Rows are ordered by window key, then by the fixed metric order
//! used in reports.
std::vector<AggregateRow> aggregate(std::span<const MetricRecord> records, Window window);

std::string render_aggregate_csv(std::span<const AggregateRow> rows);
std::string render_aggregate_json(std::span<const AggregateRow> rows);

//! Fixed 6-significant-digit float rendering used by every report writer.
std::string format_float(double value);

}  // namespace txparallax
