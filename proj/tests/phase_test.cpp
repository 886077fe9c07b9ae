// Copyright 2024 The AME-SLOCC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "ame/phase.hpp"

#include <random>

#include "gtest/gtest.h"

using namespace ame;

TEST(phase, root_of_unity_reduces) {
    ASSERT_EQ(root_of_unity(1, 0), Phase::one());
    ASSERT_EQ(root_of_unity(3, 1).num(), 1);
    ASSERT_EQ(root_of_unity(3, 1).den(), 3);
    Phase p = root_of_unity(6, 4);
    ASSERT_EQ(p.num(), 2);
    ASSERT_EQ(p.den(), 3);
    ASSERT_EQ(root_of_unity(4, -1), root_of_unity(4, 3));
    ASSERT_THROW(root_of_unity(0, 1), DomainError);
}

TEST(phase, product) {
    ASSERT_EQ(phase_product({}), Phase::one());
    Phase w = root_of_unity(3, 1);
    ASSERT_EQ(phase_product({w, w, w}), Phase::one());
    ASSERT_EQ(phase_product(std::vector<Phase>(9, Phase::one())), Phase::one());
    ASSERT_TRUE(phase_product({w, Phase::real(0.25)}).kind() == Phase::Kind::Real);
    ASSERT_TRUE(phase_product({w, w}).is_exact());
}

TEST(phase, product_commutes_on_random_turns) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 500; t++) {
        int64_t q1 = 1 + rng() % 60, q2 = 1 + rng() % 60;
        Phase a = root_of_unity(q1, rng() % q1), b = root_of_unity(q2, rng() % q2);
        ASSERT_EQ(phase_product({a, b}), phase_product({b, a}));
        ASSERT_EQ((a * b) / b, a);
        ASSERT_EQ(a * a.conj(), Phase::one());
    }
}

TEST(phase, nth_roots) {
    auto r = nth_roots(Phase::one(), 2);
    ASSERT_EQ(r.size(), 2u);
    ASSERT_EQ(r[0], Phase::one());
    ASSERT_EQ(r[1], root_of_unity(2, 1));

    r = nth_roots(root_of_unity(2, 1), 2);
    ASSERT_EQ(r[0], root_of_unity(4, 1));
    ASSERT_EQ(r[1], root_of_unity(4, 3));

    r = nth_roots(root_of_unity(3, 1), 3);
    ASSERT_EQ(r[0], root_of_unity(9, 1));
    ASSERT_EQ(r[1], root_of_unity(9, 4));
    ASSERT_EQ(r[2], root_of_unity(9, 7));
}

TEST(phase, nth_roots_power_back) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 300; t++) {
        int64_t q = 1 + rng() % 40;
        Phase x = root_of_unity(q, rng() % q);
        int64_t d = 1 + rng() % 9;
        auto roots = nth_roots(x, d);
        ASSERT_EQ((int64_t)roots.size(), d);
        for (size_t i = 0; i < roots.size(); i++) {
            ASSERT_EQ(roots[i].pow(d), x);
            if (i) ASSERT_TRUE(roots[i - 1] < roots[i]);
        }
    }
}

TEST(phase, root_round_trip) {
    for (int64_t q = 1; q <= 100; q++) {
        for (int64_t p = 0; p < q; p++) {
            ASSERT_EQ(root_of_unity(q, p).pow(q), Phase::one());
        }
    }
}

TEST(phase, real_turns_use_tolerance) {
    Phase a = Phase::real(0.3);
    Phase b = Phase::real(0.3 + 1e-12);
    ASSERT_EQ(a, b);
    ASSERT_NE(a, Phase::real(0.3001));
    ASSERT_EQ(Phase::real(1.0 - 1e-13), Phase::one());
    ASSERT_EQ(Phase::real(0.5), root_of_unity(2, 1));
    ASSERT_NEAR(std::abs(Phase::from_angle(1.1).value() - std::polar(1.0, 1.1)), 0, 1e-14);
}
