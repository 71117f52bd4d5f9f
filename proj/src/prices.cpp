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

#include <txparallax/prices.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

namespace txparallax {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_price_field(const std::string& text, const char* name, std::size_t row) {
    double value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw PriceParseError{row, std::string{"invalid "} + name + " value '" + text + "'"};
    }
    return value;
}

}  // namespace

std::vector<PriceBar> parse_price_csv(std::istream& input) {
    std::string line;
    if (!std::getline(input, line)) {
        throw PriceParseError{0, "empty price file"};
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "date,open,high,low,close") {
        throw PriceParseError{1, "expected header 'date,open,high,low,close', got '" + line + "'"};
    }

    std::vector<PriceBar> bars;
    std::size_t row = 1;
    while (std::getline(input, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 5) {
            throw PriceParseError{row, "expected 5 fields, got " + std::to_string(fields.size())};
        }
        PriceBar bar;
        const auto date = CivilDate::parse(fields[0]);
        if (!date) {
            throw PriceParseError{row, "invalid date '" + fields[0] + "'"};
        }
        bar.date = *date;
        bar.open = parse_price_field(fields[1], "open", row);
        bar.high = parse_price_field(fields[2], "high", row);
        bar.low = parse_price_field(fields[3], "low", row);
        bar.close = parse_price_field(fields[4], "close", row);

        if (bar.low <= 0) {
            throw PriceParseError{row, "low price must be positive"};
        }
        const double body_low = std::min(bar.open, bar.close);
        const double body_high = std::max(bar.open, bar.close);
        if (bar.low > body_low || bar.high < body_high) {
            throw PriceParseError{row, "price range violates low <= open,close <= high"};
        }
        if (!bars.empty() && !(bars.back().date < bar.date)) {
            throw PriceParseError{row, "dates must be strictly increasing"};
        }
        bars.push_back(bar);
    }
    return bars;
}

std::vector<PriceBar> load_price_csv(const std::filesystem::path& path) {
    std::ifstream input{path};
    if (!input) {
        throw PriceParseError{0, "cannot open price file: " + path.string()};
    }
    return parse_price_csv(input);
}

}  // namespace txparallax
