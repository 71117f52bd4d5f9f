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

#include <txparallax/address.hpp>

namespace txparallax {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::optional<std::basic_string<std::uint8_t>> bytes_from_hex(std::string_view text) {
    if (text.size() < 2 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
        return std::nullopt;
    }
    text.remove_prefix(2);
    if (text.size() % 2 != 0) {
        return std::nullopt;
    }
    std::basic_string<std::uint8_t> out;
    out.reserve(text.size() / 2);
    for (std::size_t i = 0; i < text.size(); i += 2) {
        const int hi = hex_nibble(text[i]);
        const int lo = hex_nibble(text[i + 1]);
        if (hi < 0 || lo < 0) {
            return std::nullopt;
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string bytes_to_hex(const std::uint8_t* data, std::size_t size) {
    std::string out;
    out.reserve(2 + 2 * size);
    out += "0x";
    for (std::size_t i = 0; i < size; ++i) {
        out += kHexDigits[data[i] >> 4];
        out += kHexDigits[data[i] & 0x0f];
    }
    return out;
}

std::optional<Address> Address::from_hex(std::string_view text) {
    const auto bytes = bytes_from_hex(text);
    if (!bytes || bytes->size() != 20) {
        return std::nullopt;
    }
    Address a;
    std::copy(bytes->begin(), bytes->end(), a.bytes.begin());
    return a;
}

std::string Address::to_hex() const {
    return bytes_to_hex(bytes.data(), bytes.size());
}

std::optional<Hash32> Hash32::from_hex(std::string_view text) {
    const auto bytes = bytes_from_hex(text);
    if (!bytes || bytes->size() != 32) {
        return std::nullopt;
    }
    Hash32 h;
    std::copy(bytes->begin(), bytes->end(), h.bytes.begin());
    return h;
}

std::string Hash32::to_hex() const {
    return bytes_to_hex(bytes.data(), bytes.size());
}

}  // namespace txparallax
