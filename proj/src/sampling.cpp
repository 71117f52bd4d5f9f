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

#include <txparallax/sampling.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <string>

#include <txparallax/rng.hpp>

namespace txparallax {

namespace {

void validate_ranges(std::span<const DayBlockRange> ranges) {
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const auto& r = ranges[i];
        if (!r.day.valid()) {
            throw SamplingError{"range " + std::to_string(i) + ": invalid day"};
        }
        if (r.first_block > r.last_block) {
            throw SamplingError{"range for " + r.day.to_string() + ": first_block exceeds last_block"};
        }
    }
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        if (!(ranges[i - 1].day < ranges[i].day)) {
            throw SamplingError{"day ranges must be sorted by strictly increasing day"};
        }
        if (ranges[i].first_block <= ranges[i - 1].last_block) {
            throw SamplingError{"block ranges for " + ranges[i - 1].day.to_string() + " and " +
                                ranges[i].day.to_string() + " overlap"};
        }
    }
}

std::uint64_t parse_block_field(const std::string& text, const char* name, std::size_t row) {
    std::uint64_t value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw SamplingError{"row " + std::to_string(row) + ": invalid " + name + " value '" + text + "'"};
    }
    return value;
}

}  // namespace

std::vector<std::uint64_t> plan_samples(std::span<const DayBlockRange> ranges, const SamplePlan& plan) {
    if (plan.per_day == 0) {
        throw SamplingError{"per_day must be at least 1"};
    }
    validate_ranges(ranges);

    std::vector<std::uint64_t> picks;
    for (const auto& range : ranges) {
        const std::uint64_t span = range.last_block - range.first_block + 1;
        if (span <= plan.per_day) {
            for (std::uint64_t b = range.first_block; b <= range.last_block; ++b) {
                picks.push_back(b);
            }
            continue;
        }
        // Partial Fisher-Yates over block offsets: a fresh stream keyed by the
        // range start keeps each day's draw independent of every other day.
        SplitMix64 rng{mix_seed(plan.seed, range.first_block)};
        std::vector<std::uint64_t> offsets(span);
        std::iota(offsets.begin(), offsets.end(), std::uint64_t{0});
        for (std::size_t i = 0; i < plan.per_day; ++i) {
            const std::uint64_t j = i + rng.next_below(span - i);
            std::swap(offsets[i], offsets[j]);
            picks.push_back(range.first_block + offsets[i]);
        }
    }
    std::sort(picks.begin(), picks.end());
    return picks;
}

std::vector<DayBlockRange> day_ranges_from_traces(std::span<const BlockTrace> blocks) {
    std::vector<DayBlockRange> ranges;
    for (const auto& block : blocks) {
        const CivilDate day = civil_from_timestamp(static_cast<std::int64_t>(block.timestamp));
        if (!ranges.empty() && ranges.back().day == day) {
            if (block.number <= ranges.back().last_block) {
                throw SamplingError{"block numbers must be strictly increasing"};
            }
            ranges.back().last_block = block.number;
            continue;
        }
        if (!ranges.empty() && !(ranges.back().day < day)) {
            throw SamplingError{"block timestamps must be non-decreasing across days"};
        }
        ranges.push_back(DayBlockRange{day, block.number, block.number});
    }
    return ranges;
}

std::vector<DayBlockRange> parse_day_ranges_csv(std::istream& input) {
    std::string line;
    if (!std::getline(input, line)) {
        throw SamplingError{"empty day range file"};
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "day,first_block,last_block") {
        throw SamplingError{"expected header 'day,first_block,last_block', got '" + line + "'"};
    }

    std::vector<DayBlockRange> ranges;
    std::size_t row = 1;
    while (std::getline(input, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto first_comma = line.find(',');
        const auto second_comma = first_comma == std::string::npos ? std::string::npos
                                                                   : line.find(',', first_comma + 1);
        if (second_comma == std::string::npos || line.find(',', second_comma + 1) != std::string::npos) {
            throw SamplingError{"row " + std::to_string(row) + ": expected 3 fields"};
        }
        DayBlockRange range;
        const auto day = CivilDate::parse(line.substr(0, first_comma));
        if (!day) {
            throw SamplingError{"row " + std::to_string(row) + ": invalid day '" +
                                line.substr(0, first_comma) + "'"};
        }
        range.day = *day;
        range.first_block =
            parse_block_field(line.substr(first_comma + 1, second_comma - first_comma - 1), "first_block", row);
        range.last_block = parse_block_field(line.substr(second_comma + 1), "last_block", row);
        ranges.push_back(range);
    }
    validate_ranges(ranges);
    return ranges;
}

std::vector<DayBlockRange> load_day_ranges_csv(const std::filesystem::path& path) {
    std::ifstream input{path};
    if (!input) {
        throw SamplingError{"cannot open day range file: " + path.string()};
    }
    return parse_day_ranges_csv(input);
}

}  // namespace txparallax
