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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include <txparallax/date.hpp>
#include <txparallax/trace.hpp>

namespace txparallax {

//! Inclusive range of block numbers mined on a single UTC day.
struct DayBlockRange {
    CivilDate day;
    std::uint64_t first_block{0};
    std::uint64_t last_block{0};
};

struct SamplePlan {
    std::uint64_t seed{0};
    std::size_t per_day{65};
};

class SamplingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Draws `plan.per_day` distinct block numbers uniformly from each day range.
//! Ranges are sampled in day order with an independent deterministic stream
//! per range, so adding or removing days never disturbs the other draws.
//! Returns the union of the draws, sorted ascending. Days shorter than
//! `per_day` contribute every block they have.
std::vector<std::uint64_t> plan_samples(std::span<const DayBlockRange> ranges, const SamplePlan& plan);

//! Groups consecutive block traces into per-day ranges by block timestamp.
std::vector<DayBlockRange> day_ranges_from_traces(std::span<const BlockTrace> blocks);

//! Parses a CSV with header `day,first_block,last_block`.
std::vector<DayBlockRange> parse_day_ranges_csv(std::istream& input);
std::vector<DayBlockRange> load_day_ranges_csv(const std::filesystem::path& path);

}  // namespace txparallax
