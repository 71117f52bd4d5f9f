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

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace txparallax {

//! A 20-byte account or contract identifier. Canonical rendering is
//! lowercase hex with a 0x prefix; parsing accepts mixed case.
struct Address {
    std::array<std::uint8_t, 20> bytes{};

    auto operator<=>(const Address&) const = default;

    static std::optional<Address> from_hex(std::string_view text);
    std::string to_hex() const;

    bool is_zero() const {
        for (auto b : bytes) {
            if (b != 0) return false;
        }
        return true;
    }
};

//! A 32-byte transaction hash.
struct Hash32 {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Hash32&) const = default;

    static std::optional<Hash32> from_hex(std::string_view text);
    std::string to_hex() const;
};

//! Parses an even-length 0x-prefixed hex string into bytes. Returns
//! std::nullopt on any malformed input instead of throwing.
std::optional<std::basic_string<std::uint8_t>> bytes_from_hex(std::string_view text);

std::string bytes_to_hex(const std::uint8_t* data, std::size_t size);

}  // namespace txparallax

template <>
struct std::hash<txparallax::Address> {
    std::size_t operator()(const txparallax::Address& a) const noexcept {
        // FNV-1a over the 20 bytes.
        std::size_t h = 1469598103934665603ull;
        for (auto b : a.bytes) {
            h = (h ^ b) * 1099511628211ull;
        }
        return h;
    }
};
