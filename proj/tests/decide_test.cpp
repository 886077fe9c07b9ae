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


#include "ame/decide.hpp"

#include <random>

#include "gtest/gtest.h"

using namespace ame;

namespace {

MinimalSupportState decorate(const MinimalSupportState &s, std::mt19937_64 &rng, int64_t q) {
    std::vector<Phase> ph;
    for (size_t t = 0; t < s.size(); t++) ph.push_back(Phase::rational((int64_t)(rng() % q), q));
    return MinimalSupportState::create(s.n(), s.d(), s.k(), s.support(), ph);
}

SiteMatrix fourier3_times_id3() {
    auto f = SiteMatrix::butson(fourier(3));
    std::vector<ComplexAmp> e(81, ComplexAmp::integer(0));
    for (int a = 0; a < 3; a++)
        for (int b = 0; b < 3; b++)
            for (int x = 0; x < 3; x++) e[(size_t)(3 * a + x) * 9 + (3 * b + x)] = f.at(a, b);
    return SiteMatrix::dense(9, e, 3, SiteKind::General);
}

}  // namespace

TEST(DecideSlocc, GhzPhaseDecorations) {
    std::mt19937_64 rng(5);
    auto g = construct_ghz(5, 3);
    for (int t = 0; t < 10; t++) {
        auto c = decide_slocc(decorate(g, rng, 7), g);
        ASSERT_EQ(c.verdict, Verdict::Equivalent);
        EXPECT_EQ(c.branch, "lm");
    }
}

TEST(DecideSlocc, Ame55FamiliesSeparated) {
    auto ex3 = construct_ame5_phased(5);
    auto ex5 = SparseState::from_minimal(construct_ame5_prime(5));
    auto c = decide_slocc(ex3, ex5);
    EXPECT_EQ(c.verdict, Verdict::Inequivalent);
    EXPECT_EQ(c.branch, "ame5-certificate");
    EXPECT_EQ(decide_slocc(ex5, ex3).verdict, Verdict::Inequivalent);
    EXPECT_EQ(decide_slocc(ex3, ex3).verdict, Verdict::Equivalent);
}

TEST(DecideSlocc, ComposedAutomorphismReplays) {
    auto s = SparseState::from_minimal(construct_ame49());
    auto op = LocalOperator::uniform(4, fourier3_times_id3());
    auto img = op.apply(s);
    auto c = certify_witness(s, img, op);
    ASSERT_EQ(c.verdict, Verdict::Equivalent);
    EXPECT_TRUE(states_equal_up_to_global_phase(img, s).has_value());
    auto ws = witness_structure(*c.witness);
    EXPECT_TRUE(ws.ok);
    EXPECT_EQ(ws.block_sizes, std::vector<int>(4, 3));
    EXPECT_EQ(decide_slocc(s, img).verdict, Verdict::Equivalent);
}

TEST(DecideSlocc, SymmetryAndTransitivity) {
    std::mt19937_64 rng(77);
    auto base = construct_ame43();
    for (int t = 0; t < 10; t++) {
        auto a = decorate(base, rng, 6), b = decorate(base, rng, 6), c = decorate(base, rng, 6);
        auto ab = decide_slocc(a, b), ba = decide_slocc(b, a), bc = decide_slocc(b, c);
        EXPECT_EQ(ab.verdict, ba.verdict);
        ASSERT_EQ(ab.verdict, Verdict::Equivalent);
        ASSERT_EQ(bc.verdict, Verdict::Equivalent);
        auto composed = bc.witness->compose(*ab.witness);
        EXPECT_EQ(certify_witness(SparseState::from_minimal(a), SparseState::from_minimal(c), composed).verdict,
                  Verdict::Equivalent);
    }
    auto x = with_marked_phase(construct_ame64(), 0, 0.4), y = with_marked_phase(construct_ame64(), 0, 1.2);
    EXPECT_EQ(decide_slocc(x, y).verdict, decide_slocc(y, x).verdict);
}

TEST(DecideSlocc, NonUniformRejected) {
    SparseState prod(2, 2);
    prod.add({0, 0}, ComplexAmp::integer(1));
    EXPECT_THROW(decide_slocc(prod, prod), DomainError);
}
