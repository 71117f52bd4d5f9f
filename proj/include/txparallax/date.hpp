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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace txparallax {

//! A UTC calendar day.
struct CivilDate {
    std::int32_t year{1970};
    std::uint32_t month{1};
    std::uint32_t day{1};

    auto operator<=>(const CivilDate&) const = default;

    //! Parses "YYYY-MM-DD".
    static std::optional<CivilDate> parse(std::string_view text);
    std::string to_string() const;
    //! "YYYY-MM" (for monthly windows).
    std::string month_key() const;

    bool valid() const;
};

//! Days since 1970-01-01 (may be negative).
std::int64_t days_from_civil(const CivilDate& date);
CivilDate civil_from_days(std::int64_t days);

//! UTC day containing a unix timestamp.
CivilDate civil_from_timestamp(std::uint64_t unix_seconds);

}  // namespace txparallax
