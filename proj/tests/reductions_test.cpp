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


#include "ame/reductions.hpp"

#include <random>

#include "gtest/gtest.h"

using namespace ame;

TEST(Triangular, RecursionMatchesClosedForm) {
    for (int d = 3; d <= 21; d += 2) {
        EXPECT_EQ(triangular_w_recursive(d), triangular_w_closed(d)) << d;
        EXPECT_EQ(triangular_v_recursive(d), triangular_v_closed(d)) << d;
        EXPECT_NO_THROW(build_u4_u5(d));
    }
    auto w = triangular_w_recursive(7);
    EXPECT_EQ(w[0][1], 0);
    EXPECT_EQ(w[0][2], 2);
    EXPECT_EQ(w[0][3], 6);
    EXPECT_THROW(build_u4_u5(4), DomainError);
    EXPECT_THROW(triangular_v_closed(2), DomainError);
}

TEST(Triangular, LayersAreUnitary) {
    for (int d = 3; d <= 11; d += 2) {
        auto p = build_u4_u5(d);
        EXPECT_TRUE(is_butson(p.u4, d)) << d;
        EXPECT_TRUE(is_butson(p.u5, d)) << d;
    }
}

TEST(Triangular, PrintedMatrices) {
    auto c3 = compare_with_printed(build_u4_u5(3));
    EXPECT_TRUE(c3.literal);
    EXPECT_EQ(c3.root_power, 1);
    auto c5 = compare_with_printed(build_u4_u5(5));
    EXPECT_FALSE(c5.literal);
    EXPECT_EQ(c5.root_power, 2);  // printed exponents are twice the recursion's
}

TEST(Rho345, BlockStructureOfPhasedState) {
    for (int d : {3, 5}) {
        auto rho = reduced_density(construct_ame5_phased(d), {2, 3, 4});
        size_t nonzero = 0;
        for (const auto &[rc, v] : rho.entries) {
            if (v.is_zero()) continue;
            nonzero++;
            auto x = decode(rc.first, 3, d), y = decode(rc.second, 3, d);
            EXPECT_EQ(x[0], y[0]);
            EXPECT_EQ(mod(x[1] - x[2], d), mod(y[1] - y[2], d));
        }
        EXPECT_EQ(nonzero, ipow(d, 4));
    }
}

TEST(Rho345, LemmaHoldsExactly) {
    for (int d : {3, 5, 7}) {
        auto c = rho345_lemma_check(d);
        EXPECT_TRUE(c.holds) << d << ": " << c.detail;
        EXPECT_TRUE(c.exact);
        EXPECT_EQ(c.entries_checked, ipow(d, 6));
    }
    EXPECT_THROW(verify_rho345_lemma(6), DomainError);
}

TEST(Rho345, DenseOracleAgrees) {
    // Independent float computation with Eigen Kronecker products.
    for (int d : {3, 5}) {
        auto p = build_u4_u5(d);
        auto rho = reduced_density(construct_ame5_phased(d), {2, 3, 4}).dense();
        auto target = rho345_minimal(d).dense();
        Eigen::MatrixXcd u4(d, d), u5(d, d);
        for (int i = 0; i < d; i++)
            for (int j = 0; j < d; j++) {
                u4(i, j) = std::conj(p.u4.at(i, j).value()) / std::sqrt((double)d);
                u5(i, j) = std::conj(p.u5.at(i, j).value()) / std::sqrt((double)d);
            }
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d * d * d, d * d * d);
        for (int a = 0; a < d; a++)
            for (int b = 0; b < d; b++)
                for (int c = 0; c < d; c++)
                    for (int b2 = 0; b2 < d; b2++)
                        for (int c2 = 0; c2 < d; c2++) x(a * d * d + b * d + c, a * d * d + b2 * d + c2) = u4(b, b2) * u5(c, c2);
        EXPECT_LT((x * rho * x.adjoint() - target).cwiseAbs().maxCoeff(), 1e-10);
        // Without the conjugate the identity fails.
        Eigen::MatrixXcd y = x.conjugate();
        EXPECT_GT((y * rho * y.adjoint() - target).cwiseAbs().maxCoeff(), 1e-3);
    }
}

TEST(Rho345, MinimalReductionMatchesFormula) {
    for (int d : {5, 7}) {
        auto r = reduced_density(construct_ame5_prime(d), {2, 3, 4});
        auto t = rho345_minimal(d);
        for (uint64_t x = 0; x < r.dim; x++)
            for (uint64_t y = 0; y < r.dim; y++)
                EXPECT_NEAR(std::abs(r.at(x, y) - t.at(x, y)), 0.0, 1e-12);
    }
}

TEST(Ame5Certificate, PrimeFiveAndSeven) {
    for (int d : {5, 7}) {
        auto c = verify_ame5_nonequivalence(d);
        ASSERT_EQ(c.steps.size(), 3u);
        for (const auto &s : c.steps) EXPECT_TRUE(s.passed) << s.name << ": " << s.detail;
        EXPECT_EQ(c.verdict, Verdict::Inequivalent);
    }
    EXPECT_THROW(verify_ame5_nonequivalence(3), DomainError);
    EXPECT_THROW(verify_ame5_nonequivalence(9), DomainError);
}

TEST(Ame5Certificate, LayerColumnsFullyDenseForThree) {
    auto p = build_u4_u5(3);
    LocalOperator op;
    op.sites = {SiteMatrix::butson(p.u4), SiteMatrix::butson(p.u5)};
    for (int a = 0; a < 3; a++)
        for (int b = 0; b < 3; b++) {
            SparseState s(2, 3);
            s.add({a, b}, ComplexAmp::integer(1));
            EXPECT_EQ(op.apply(s).support_count(), 9u);
        }
}

TEST(ReducedFilter, PassesForRelatedStates) {
    std::mt19937_64 rng(1);
    auto s = construct_ame5_prime(5);
    EXPECT_EQ(reduced_lm_filter(s, s).verdict, FilterVerdict::Passed);
    for (int trial = 0; trial < 5; trial++) {
        LocalOperator m;
        for (int j = 0; j < 5; j++) {
            std::vector<int> p = {0, 1, 2, 3, 4};
            std::shuffle(p.begin(), p.end(), rng);
            std::vector<Phase> ph;
            for (int a = 0; a < 5; a++) ph.push_back(Phase::rational((int64_t)(rng() % 10), 10));
            m.sites.push_back(SiteMatrix::monomial(p, ph));
        }
        auto r = reduced_lm_filter(s, m.apply(s));
        EXPECT_EQ(r.verdict, FilterVerdict::Passed);
        EXPECT_EQ(r.subsets_examined, 10u);
    }
    EXPECT_THROW(reduced_lm_filter(construct_ame43(), construct_ame43()), DomainError);
}

TEST(ReducedFilter, RowsShareFewPositions) {
    auto s = construct_ame43();
    for (size_t a = 0; a < s.size(); a++)
        for (size_t b = a + 1; b < s.size(); b++) {
            int same = 0;
            for (int j = 0; j < 4; j++) same += s.row(a)[j] == s.row(b)[j];
            EXPECT_LE(same, s.k() - 1);
        }
}

TEST(ReducedFilter, NonIsotopicProjectionsSeparate) {
    // The building block of the filter: Z4 and Z2xZ2 Cayley tables as supports.
    std::vector<MultiIndex> z4, klein;
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++) {
            z4.push_back({i, j, (i + j) % 4});
            klein.push_back({i, j, i ^ j});
        }
    auto a = MinimalSupportState::create(3, 4, 2, z4), b = MinimalSupportState::create(3, 4, 2, klein);
    auto c = lm_match(a, b);
    EXPECT_EQ(c.verdict, Verdict::Inequivalent);
    EXPECT_EQ(c.reason, Reason::SearchExhausted);
    EXPECT_EQ(lm_match(a, a).verdict, Verdict::Equivalent);
}
