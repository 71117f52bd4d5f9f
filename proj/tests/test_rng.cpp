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

#include <doctest.h>

#include <cmath>
#include <cstdint>

#include <txparallax/rng.hpp>

using namespace txparallax;

TEST_CASE("splitmix64 matches the reference stream for seed 0") {
    SplitMix64 rng{0};
    CHECK(rng.next() == 0xe220a8397b1dcdafull);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ull);
    CHECK(rng.next() == 0x06c45d188009454full);
}

TEST_CASE("splitmix64 streams are reproducible") {
    SplitMix64 a{42};
    SplitMix64 b{42};
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next() == b.next());
    }
}

TEST_CASE("next_below stays within the bound") {
    SplitMix64 rng{7};
    for (int i = 0; i < 1000; ++i) {
        CHECK(rng.next_below(13) < 13);
    }
}

TEST_CASE("next_unit lies in the half-open unit interval") {
    SplitMix64 rng{9};
    double min = 1.0;
    double max = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        min = std::min(min, u);
        max = std::max(max, u);
    }
    CHECK(min < 0.05);
    CHECK(max > 0.95);
}

TEST_CASE("gaussian draws have roughly standard moments") {
    SplitMix64 rng{11};
    const int n = 50000;
    double sum = 0;
    double sum_sq = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_gaussian();
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double variance = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(variance - 1.0) < 0.05);
}

TEST_CASE("mix_seed separates nearby keys") {
    CHECK(mix_seed(1, 1) != mix_seed(1, 2));
    CHECK(mix_seed(1, 1) != mix_seed(2, 1));
    CHECK(mix_seed(3, 4) == mix_seed(3, 4));
}
