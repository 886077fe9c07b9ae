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


#include "ame/linear_mod1.hpp"

#include <random>

#include "gtest/gtest.h"

using namespace ame;

namespace {

Turn frac(Turn t) {
    Turn f = t - Turn(boost::rational_cast<int64_t>(t));
    return f < 0 ? f + 1 : f;
}

std::vector<Turn> apply_mod(const ModOneSolver::Matrix &a, const std::vector<Turn> &x) {
    std::vector<Turn> r;
    for (const auto &row : a) {
        Turn s = 0;
        for (size_t j = 0; j < row.size(); j++) s += Turn(row[j]) * x[j];
        r.push_back(frac(s));
    }
    return r;
}

// Exhaustive: is there x in (1/q Z)^v / Z^v with A x == b?
bool brute_solvable(const ModOneSolver::Matrix &a, const std::vector<Turn> &b, int q) {
    int v = (int)a[0].size();
    std::vector<int> x(v, 0);
    for (;;) {
        std::vector<Turn> xt;
        for (int t : x) xt.push_back(Turn(t, q));
        if (apply_mod(a, xt) == b) return true;
        int j = 0;
        while (j < v && ++x[j] == q) x[j++] = 0;
        if (j == v) return false;
    }
}

}  // namespace

TEST(ModOneSolver, Inconsistent) {
    ModOneSolver s(ModOneSolver::Matrix{{1}, {1}});
    EXPECT_FALSE(s.solve({Turn(0), Turn(1, 2)}).has_value());
    auto x = s.solve({Turn(1, 3), Turn(1, 3)});
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ((*x)[0], Turn(1, 3));
}

TEST(ModOneSolver, TorsionNeedsFractions) {
    // 2x == 1/2 has solutions x = 1/4, 3/4.
    ModOneSolver s(ModOneSolver::Matrix{{2}});
    auto x = s.solve({Turn(1, 2)});
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(apply_mod(ModOneSolver::Matrix{{2}}, *x)[0], Turn(1, 2));
}

TEST(ModOneSolver, RandomConsistentSystems) {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 300; trial++) {
        int m = 1 + (int)(rng() % 8), v = 1 + (int)(rng() % 6);
        ModOneSolver::Matrix a(m, std::vector<int64_t>(v));
        for (auto &row : a)
            for (auto &e : row) e = (int64_t)(rng() % 5) - 2;
        std::vector<Turn> x0;
        for (int j = 0; j < v; j++) x0.push_back(Turn((int64_t)(rng() % 12), 12));
        auto b = apply_mod(a, x0);
        ModOneSolver s(a);
        auto x = s.solve(b);
        ASSERT_TRUE(x.has_value());
        EXPECT_EQ(apply_mod(a, *x), b);
        std::vector<double> bd;
        for (auto &t : b) bd.push_back(boost::rational_cast<double>(t));
        auto xr = s.solve_real(bd, 1e-9);
        ASSERT_TRUE(xr.has_value());
        for (int i = 0; i < m; i++) {
            double acc = 0;
            for (int j = 0; j < v; j++) acc += (double)a[i][j] * (*xr)[j];
            double f = acc - bd[i];
            f -= std::round(f);
            EXPECT_NEAR(f, 0.0, 1e-9);
        }
    }
}

TEST(ModOneSolver, AgreesWithExhaustiveSearch) {
    std::mt19937_64 rng(777);
    const int q = 4;
    for (int trial = 0; trial < 200; trial++) {
        int m = 1 + (int)(rng() % 4), v = 1 + (int)(rng() % 3);
        ModOneSolver::Matrix a(m, std::vector<int64_t>(v));
        for (auto &row : a)
            for (auto &e : row) e = (int64_t)(rng() % 5) - 2;
        std::vector<Turn> b;
        for (int i = 0; i < m; i++) b.push_back(Turn((int64_t)(rng() % q), q));
        // Solutions of A x == b with b in 1/q Z may need denominators q*|s_i|;
        // the oracle grid 1/(q*8) covers |s_i| <= 8 for these small entries.
        ModOneSolver s(a);
        bool expect = brute_solvable(a, b, q * 8);
        auto x = s.solve(b);
        EXPECT_EQ(x.has_value(), expect);
        if (x) EXPECT_EQ(apply_mod(a, *x), b);
    }
}
