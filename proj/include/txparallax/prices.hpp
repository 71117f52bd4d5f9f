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

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <txparallax/date.hpp>

namespace txparallax {

//! One day of Ether price data in USD.
struct PriceBar {
    CivilDate date;
    double open{0};
    double high{0};
    double low{0};
    double close{0};
};

class PriceParseError : public std::runtime_error {
  public:
    PriceParseError(std::size_t row, const std::string& message)
        : std::runtime_error(row > 0 ? "row " + std::to_string(row) + ": " + message : message),
          row_{row} {}

    std::size_t row() const { return row_; }

  private:
    std::size_t row_;
};

//! Parses a CSV with header `date,open,high,low,close`. Validates
//! low <= min(open, close) <= max(open, close) <= high and low > 0.
std::vector<PriceBar> parse_price_csv(std::istream& input);
std::vector<PriceBar> load_price_csv(const std::filesystem::path& path);

}  // namespace txparallax
