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


#include "ame/cyclotomic.hpp"

#include <random>

#include "gtest/gtest.h"

using namespace ame;

TEST(cyclotomic, polynomials) {
    ASSERT_EQ(cyclotomic_polynomial(1), (std::vector<int64_t>{-1, 1}));
    ASSERT_EQ(cyclotomic_polynomial(2), (std::vector<int64_t>{1, 1}));
    ASSERT_EQ(cyclotomic_polynomial(4), (std::vector<int64_t>{1, 0, 1}));
    ASSERT_EQ(cyclotomic_polynomial(6), (std::vector<int64_t>{1, -1, 1}));
    ASSERT_EQ(cyclotomic_polynomial(12), (std::vector<int64_t>{1, 0, -1, 0, 1}));
    // Phi_105 is the first with a coefficient of modulus 2.
    auto p105 = cyclotomic_polynomial(105);
    ASSERT_EQ(p105.size(), 49u);
    ASSERT_EQ(*std::min_element(p105.begin(), p105.end()), -2);
}

TEST(cyclotomic, vanishing_sums) {
    for (int n = 2; n <= 30; n++) {
        Cyclotomic s(n);
        for (int t = 0; t < n; t++) s.add_term(t, 1);
        ASSERT_TRUE(s.is_zero()) << n;
    }
    // 1 + z6^2 + z6^4 = 0, but 1 + z6 + z6^2 != 0.
    Cyclotomic a(6);
    a.add_term(0, 1);
    a.add_term(2, 1);
    a.add_term(4, 1);
    ASSERT_TRUE(a.is_zero());
    Cyclotomic b(6);
    b.add_term(0, 1);
    b.add_term(1, 1);
    b.add_term(2, 1);
    ASSERT_FALSE(b.is_zero());
    // z6 = -z6^4 : z6 + z6^4 = 0.
    Cyclotomic c(6);
    c.add_term(1, 1);
    c.add_term(4, 1);
    ASSERT_TRUE(c.is_zero());
}

TEST(cyclotomic, matches_float_evaluation) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 400; t++) {
        int n = 1 + rng() % 24;
        Cyclotomic x(n);
        for (int i = 0; i < 4; i++) x.add_term(rng() % n, (int64_t)(rng() % 5) - 2);
        bool zero_float = std::abs(x.to_complex()) < 1e-9;
        ASSERT_EQ(x.is_zero(), zero_float) << x.str();
    }
}

TEST(cyclotomic, arithmetic) {
    Cyclotomic w = Cyclotomic::from_phase(root_of_unity(3, 1));
    Cyclotomic i = Cyclotomic::from_phase(root_of_unity(4, 1));
    ASSERT_EQ(w * w * w, Cyclotomic::integer(1));
    ASSERT_EQ(i * i, Cyclotomic::integer(-1));
    ASSERT_EQ(w * w.conj(), Cyclotomic::integer(1));
    ASSERT_EQ(w + w * w, Cyclotomic::integer(-1));
    std::complex<double> z = (w * i + Cyclotomic::integer(2)).to_complex();
    std::complex<double> expect = std::polar(1.0, 2 * M_PI / 3) * std::complex<double>(0, 1) + 2.0;
    ASSERT_NEAR(std::abs(z - expect), 0, 1e-12);
}

TEST(cyclotomic, phase_of) {
    Phase p;
    ASSERT_TRUE((Cyclotomic::integer(-3)).phase_of(&p));
    ASSERT_EQ(p, root_of_unity(2, 1));
    // -1 = z3 + z3^2 written in order 3.
    Cyclotomic m(3);
    m.add_term(1, 1);
    m.add_term(2, 1);
    ASSERT_TRUE(m.phase_of(&p));
    ASSERT_EQ(p, root_of_unity(2, 1));
    ASSERT_TRUE((Cyclotomic::from_phase(root_of_unity(5, 2)) * 7).phase_of(&p));
    ASSERT_EQ(p, root_of_unity(5, 2));
    // 1 + i = sqrt(2) z8.
    Cyclotomic one_i = Cyclotomic::integer(1) + Cyclotomic::from_phase(root_of_unity(4, 1));
    ASSERT_TRUE(one_i.phase_of(&p));
    ASSERT_EQ(p, root_of_unity(8, 1));
    ASSERT_FALSE(Cyclotomic(5).phase_of(&p));
}

TEST(cyclotomic, amp_falls_back_to_float) {
    ComplexAmp a = ComplexAmp::from_phase(root_of_unity(701, 1));
    ComplexAmp b = ComplexAmp::from_phase(root_of_unity(3, 1));
    ASSERT_TRUE(a.is_exact());
    ASSERT_FALSE((a * b).is_exact());
    ASSERT_NEAR(std::abs((a * b).value() - a.value() * b.value()), 0, 1e-12);
    ComplexAmp r = ComplexAmp::from_phase(Phase::real(0.1));
    ASSERT_FALSE(r.is_exact());
    ASSERT_TRUE((r - r).is_zero());
}
