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

// Test-only Keccak-256 (the pre-SHA3 padding variant used by Ethereum).
// Exists purely as an independent oracle for the hard-coded function
// selector constants; production code never hashes anything.

#include <array>
#include <cstdint>
#include <string_view>

namespace txparallax::testsupport {

std::array<std::uint8_t, 32> keccak256(std::string_view data);

}  // namespace txparallax::testsupport
