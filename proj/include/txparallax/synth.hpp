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
#include <stdexcept>
#include <string_view>

#include <txparallax/trace.hpp>

namespace txparallax {

class SynthError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Log-normal gas draw: median * exp(sigma * z).
struct GasDistribution {
    double median{21000};
    double sigma{0};
};

//! Tunable workload shape. The class mix steers how much hub structure a
//! block has: token transfers and swaps pile onto a few token/router/pool
//! hubs, heavy calls optionally share one marketplace contract.
struct WorkloadProfile {
    std::uint64_t seed{1};

    std::uint32_t tx_count_min{100};
    std::uint32_t tx_count_max{100};

    double plain_fraction{1.0};
    double token_fraction{0};
    double swap_fraction{0};
    double heavy_fraction{0};

    std::uint32_t token_hubs{5};
    std::uint32_t router_hubs{2};
    std::uint32_t pool_hubs{4};
    std::uint32_t address_pool{4000};

    GasDistribution plain_gas{21000, 0};
    GasDistribution token_gas{40000, 0.3};
    GasDistribution swap_gas{120000, 0.4};
    GasDistribution heavy_gas{250000, 1.0};

    //! Probability that a token transfer picks hub 0 (the WETH-like hub
    //! every pool pairs with); the rest spread uniformly.
    double token_hub_bias{0.5};
    //! Fraction of heavy calls that hit the shared marketplace contract.
    double heavy_shared_fraction{0.5};

    std::uint64_t first_timestamp{1660000000};
    std::uint32_t block_interval{12};

    void validate() const;

    //! Named presets: "pre-defi", "defi", "recent".
    static WorkloadProfile preset(std::string_view name);
};

//! Deterministic under (profile.seed, block_number); the block timestamp is
//! first_timestamp + block_interval * block_number.
BlockTrace generate_block(const WorkloadProfile& profile, std::uint64_t block_number);

}  // namespace txparallax
