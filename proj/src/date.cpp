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

#include <txparallax/date.hpp>

#include <cstdio>

namespace txparallax {

namespace {

bool parse_uint(std::string_view text, std::uint32_t& out) {
    if (text.empty()) return false;
    std::uint64_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
        if (value > 1'000'000'000ull) return false;
    }
    out = static_cast<std::uint32_t>(value);
    return true;
}

constexpr std::uint32_t days_in_month(std::int32_t year, std::uint32_t month) {
    constexpr std::uint32_t kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return kDays[month - 1];
}

}  // namespace

bool CivilDate::valid() const {
    return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

std::optional<CivilDate> CivilDate::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    std::uint32_t y = 0;
    std::uint32_t m = 0;
    std::uint32_t d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const CivilDate date{static_cast<std::int32_t>(y), m, d};
    if (!date.valid()) {
        return std::nullopt;
    }
    return date;
}

std::string CivilDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
    return buf;
}

std::string CivilDate::month_key() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", year, month);
    return buf;
}

// Howard Hinnant's civil-days algorithms.
std::int64_t days_from_civil(const CivilDate& date) {
    std::int64_t y = date.year;
    const std::int64_t m = date.month;
    const std::int64_t d = date.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const std::uint64_t yoe = static_cast<std::uint64_t>(y - era * 400);
    const std::uint64_t doy = static_cast<std::uint64_t>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const std::uint64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t days) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const std::uint64_t doe = static_cast<std::uint64_t>(days - era * 146097);
    const std::uint64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const std::uint64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::uint64_t mp = (5 * doy + 2) / 153;
    const std::uint64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::uint64_t m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<std::int32_t>(y + (m <= 2)), static_cast<std::uint32_t>(m),
                     static_cast<std::uint32_t>(d)};
}

CivilDate civil_from_timestamp(std::uint64_t unix_seconds) {
    return civil_from_days(static_cast<std::int64_t>(unix_seconds / 86400));
}

}  // namespace txparallax
