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


#include "ame/equivalence.hpp"

#include <map>
#include <random>
#include <set>

#include "gtest/gtest.h"

using namespace ame;

namespace {

MinimalSupportState decorate(const MinimalSupportState &s, std::mt19937_64 &rng, int64_t q) {
    std::vector<Phase> ph;
    for (size_t t = 0; t < s.size(); t++) ph.push_back(Phase::rational((int64_t)(rng() % q), q));
    return MinimalSupportState::create(s.n(), s.d(), s.k(), s.support(), ph);
}

LocalOperator random_lm(int n, int d, std::mt19937_64 &rng, int64_t q) {
    LocalOperator op;
    for (int j = 0; j < n; j++) {
        std::vector<int> p(d);
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        std::vector<Phase> ph;
        for (int a = 0; a < d; a++) ph.push_back(Phase::rational((int64_t)(rng() % q), q));
        op.sites.push_back(SiteMatrix::monomial(p, ph));
    }
    op.global = Phase::rational((int64_t)(rng() % q), q);
    return op;
}

using PermTuple = std::vector<std::vector<int>>;

// Independent oracle: every per-site permutation tuple, support mapping checked
// directly, phases by a freshly built solver, replayed on the sparse states.
std::set<PermTuple> brute_lm_maps(const MinimalSupportState &src, const MinimalSupportState &dst) {
    int n = src.n(), d = src.d();
    std::vector<std::vector<int>> perms;
    std::vector<int> p(d);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    ModOneSolver::Matrix a(src.size(), std::vector<int64_t>((size_t)n * d, 0));
    for (size_t t = 0; t < src.size(); t++)
        for (int j = 0; j < n; j++) a[t][(size_t)j * d + src.row(t)[j]] = 1;
    ModOneSolver solver(a);
    std::set<PermTuple> out;
    std::vector<size_t> idx(n, 0);
    for (;;) {
        PermTuple tuple;
        for (int j = 0; j < n; j++) tuple.push_back(perms[idx[j]]);
        std::vector<Turn> tau;
        bool ok = true;
        for (size_t t = 0; t < src.size() && ok; t++) {
            MultiIndex img(n);
            for (int j = 0; j < n; j++) img[j] = tuple[j][src.row(t)[j]];
            auto u = dst.find(img);
            if (!u) {
                ok = false;
                break;
            }
            tau.push_back((dst.phase(*u) / src.phase(t)).rational_turn());
        }
        if (ok) {
            if (auto x = solver.solve(tau)) {
                LocalOperator op;
                for (int j = 0; j < n; j++) {
                    std::vector<Phase> ph;
                    for (int b = 0; b < d; b++) ph.push_back(Phase::rational((*x)[(size_t)j * d + b]));
                    op.sites.push_back(SiteMatrix::monomial(tuple[j], ph));
                }
                EXPECT_TRUE(states_equal_up_to_global_phase(op.apply(SparseState::from_minimal(src)),
                                                            SparseState::from_minimal(dst)));
                out.insert(tuple);
            }
        }
        int j = 0;
        while (j < n && ++idx[j] == perms.size()) idx[j++] = 0;
        if (j == n) break;
    }
    return out;
}

std::set<PermTuple> witness_maps(const std::vector<LocalOperator> &ops) {
    std::set<PermTuple> out;
    for (const auto &op : ops) {
        PermTuple t;
        for (const auto &m : op.sites) t.push_back(m.perm);
        out.insert(t);
    }
    return out;
}

MinimalSupportState ame64_phi(double phi) { return with_marked_phase(construct_ame64(), 0, phi); }

}  // namespace

TEST(ComputeW, Examples) {
    auto s = construct_ame43();
    for (int i = 0; i < 4; i++)
        for (int a = 0; a < 3; a++) EXPECT_TRUE(compute_w(s, {i}, {a}).is_one());
    auto flipped = with_phases(s, {{MultiIndex{0, 0, 0, 0}, Phase::rational(1, 2)}});
    EXPECT_EQ(compute_w(flipped, {0}, {0}), Phase::rational(1, 2));
    EXPECT_TRUE(compute_w(flipped, {0}, {1}).is_one());
    EXPECT_THROW(compute_w(s, {0, 1, 2}, {0, 0, 0}), DomainError);
    auto fam = ame64_phi(0.7);
    EXPECT_EQ(compute_w(fam, {0, 1}, {0, 0}), Phase::from_angle(0.7));
    EXPECT_TRUE(compute_w(fam, {0, 1}, {0, 1}).is_one());
}

TEST(LmMatch, IdentityAndPhaseDecorations) {
    std::mt19937_64 rng(12345);
    auto s = construct_ame43();
    auto self = lm_match(s, s);
    ASSERT_EQ(self.verdict, Verdict::Equivalent);
    for (const auto &m : self.witness->sites) EXPECT_EQ(m.kind, SiteKind::Permutation);
    for (int trial = 0; trial < 20; trial++) {
        auto r = decorate(s, rng, 12);
        auto c = lm_match(r, s);
        ASSERT_EQ(c.verdict, Verdict::Equivalent);
        EXPECT_TRUE(c.exact);
        for (const auto &m : c.witness->sites) {
            EXPECT_TRUE(m.kind == SiteKind::Diagonal || m.kind == SiteKind::Permutation);
            for (int a = 0; a < 3; a++) EXPECT_EQ(m.perm[a], a);
        }
    }
}

TEST(LmMatch, HexacodeFamilySeparatedByCondition) {
    auto c = lm_match(ame64_phi(0.3), ame64_phi(1.1));
    EXPECT_EQ(c.verdict, Verdict::Inequivalent);
    EXPECT_EQ(c.reason, Reason::NecessaryConditionViolated);
    EXPECT_FALSE(c.exact);
    ASSERT_TRUE(c.violation.has_value());
    EXPECT_EQ(c.stats.solved, 0u);
}

TEST(LmMatch, RandomRoundTrips) {
    std::mt19937_64 rng(2024);
    std::vector<MinimalSupportState> pool = {construct_ghz(3, 2), construct_ghz(4, 3), construct_ame43(),
                                             construct_ame44(), construct_ame5_prime(5), construct_ame64(),
                                             construct_linear(2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}})};
    for (int trial = 0; trial < 500; trial++) {
        const auto &base = pool[trial % pool.size()];
        auto psi = decorate(base, rng, 1 + (int64_t)(rng() % 12));
        auto m = random_lm(psi.n(), psi.d(), rng, 1 + (int64_t)(rng() % 8));
        auto c = lm_match(psi, m.apply(psi));
        ASSERT_EQ(c.verdict, Verdict::Equivalent) << "trial " << trial;
        EXPECT_TRUE(certify_witness(SparseState::from_minimal(psi), SparseState::from_minimal(m.apply(psi)),
                                    *c.witness)
                        .verdict == Verdict::Equivalent);
        EXPECT_TRUE(witness_structure(*c.witness).ok);
    }
}

TEST(LmMatch, BudgetGivesInconclusive) {
    MatchOptions opt;
    opt.max_nodes = 10;
    std::mt19937_64 rng(3);
    auto a = decorate(construct_ame5_prime(5), rng, 7);
    auto b = decorate(construct_ame5_prime(5), rng, 11);
    auto c = lm_match(a, b, opt);
    EXPECT_EQ(c.verdict, Verdict::Inconclusive);
    EXPECT_FALSE(c.stats.complete);
}

TEST(Automorphisms, MatchBruteForceOracle) {
    std::mt19937_64 rng(99);
    for (const auto &base : {construct_ghz(3, 2), construct_ame43()}) {
        auto auts = automorphisms(base);
        EXPECT_EQ(witness_maps(auts), brute_lm_maps(base, base));
        for (int trial = 0; trial < 3; trial++) {
            auto src = decorate(base, rng, 6);
            auto dst = random_lm(base.n(), base.d(), rng, 4).apply(src);
            auto found = detail::lm_search(src, dst, {}, true);
            EXPECT_EQ(witness_maps(found.witnesses), brute_lm_maps(src, dst));
            auto other = decorate(base, rng, 6);
            EXPECT_EQ(witness_maps(detail::lm_search(src, other, {}, true).witnesses), brute_lm_maps(src, other));
        }
    }
}

TEST(Automorphisms, GhzContainsGlobalFlip) {
    auto auts = automorphisms(construct_ghz(3, 2));
    auto flip = LocalOperator::uniform(3, SiteMatrix::permutation({1, 0}));
    EXPECT_TRUE(std::any_of(auts.begin(), auts.end(),
                            [&](const LocalOperator &o) { return operators_equal_up_to_phase(o, flip); }));
    EXPECT_TRUE(std::any_of(auts.begin(), auts.end(), [&](const LocalOperator &o) {
        return operators_equal_up_to_phase(o, LocalOperator::identity(3, 2));
    }));
}

TEST(NecessaryCondition, Examples) {
    auto u = construct_ame64();
    SymbolMaps id(6, {0, 1, 2, 3});
    EXPECT_TRUE(necessary_condition(u, u, id).holds);
    SymbolMaps shuffled = id;
    shuffled[2] = {3, 1, 0, 2};
    EXPECT_TRUE(necessary_condition(u, u, shuffled).holds);
    auto r = necessary_condition(ame64_phi(0.3), ame64_phi(1.1), id);
    EXPECT_FALSE(r.holds);
    EXPECT_EQ(r.violation->site, 0);
    EXPECT_EQ(r.violation->subset, std::vector<int>{1});
    EXPECT_THROW(necessary_condition(construct_ame43(), construct_ame43(), SymbolMaps(4, {0, 1, 2})), DomainError);
}

TEST(NecessaryCondition, HoldsForEveryTrueWitness) {
    // A genuine LM equivalence must satisfy the identity for its own symbol map.
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; trial++) {
        auto src = decorate(construct_ame64(), rng, 8);
        auto m = random_lm(6, 4, rng, 8);
        SymbolMaps sigma;
        for (const auto &s : m.sites) sigma.push_back(s.perm);
        EXPECT_TRUE(necessary_condition(src, m.apply(src), sigma).holds);
    }
}

TEST(NecessaryCondition, TwoTermIdentityAtMarkedRow) {
    auto a = ame64_phi(0.7), b = ame64_phi(-0.7), c = ame64_phi(1.3);
    SymbolMaps sigma(6, {0, 1, 2, 3});
    sigma[1] = {1, 0, 2, 3};
    EXPECT_TRUE(two_term_condition(a, b, sigma, 0, {1}, 0, {0}, {1}));
    EXPECT_FALSE(two_term_condition(a, c, sigma, 0, {1}, 0, {0}, {1}));
    SymbolMaps id(6, {0, 1, 2, 3});
    EXPECT_TRUE(two_term_condition(a, a, id, 0, {1}, 0, {0}, {1}));
}

TEST(NecessaryCondition, PruningIsSoundAgainstExhaustiveSearch) {
    std::mt19937_64 rng(4242);
    std::vector<MinimalSupportState> bases = {
        construct_linear(2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}}),
        construct_linear(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}}),
    };
    MatchOptions off;
    off.prune = false;
    int equivalent = 0, inequivalent = 0;
    for (const auto &base : bases) {
        for (int trial = 0; trial < 30; trial++) {
            auto src = decorate(base, rng, trial % 2 ? 2 : 6);
            auto dst = trial % 3 == 0 ? random_lm(base.n(), base.d(), rng, 6).apply(src)
                                      : decorate(base, rng, trial % 2 ? 2 : 6);
            auto pruned = detail::lm_search(src, dst, {}, true);
            auto full = detail::lm_search(src, dst, off, true);
            EXPECT_EQ(witness_maps(pruned.witnesses), witness_maps(full.witnesses));
            (pruned.witnesses.empty() ? inequivalent : equivalent)++;
        }
    }
    EXPECT_GT(equivalent, 0);
    EXPECT_GT(inequivalent, 0);
}

TEST(ButsonMatch, FourierLayerOnAme43) {
    auto s = construct_ame43();
    auto f = LocalOperator::uniform(4, SiteMatrix::butson(fourier(3)));
    auto img = to_minimal_support(f.apply(SparseState::from_minimal(s)), 2);
    ASSERT_TRUE(img.has_value());
    auto lm = butson_match(s, *img);
    EXPECT_EQ(lm.verdict, Verdict::Equivalent);
    EXPECT_EQ(lm.branch, "lm");
    MatchOptions opt;
    opt.branch = SearchBranch::ButsonOnly;
    auto c = butson_match(s, *img, opt);
    ASSERT_EQ(c.verdict, Verdict::Equivalent);
    EXPECT_EQ(c.branch, "butson");
    auto ws = witness_structure(*c.witness);
    EXPECT_TRUE(ws.ok);
    EXPECT_EQ(ws.block_sizes, std::vector<int>(4, 3));
    EXPECT_TRUE(operators_equal_up_to_phase(*c.witness, f));
}

TEST(ButsonMatch, PhaseDecoratedSourceNeedsDiagonalSeed) {
    std::mt19937_64 rng(17);
    auto s = decorate(construct_ame43(), rng, 9);
    auto f = LocalOperator::uniform(4, SiteMatrix::butson(fourier(3)));
    MatchOptions opt;
    opt.branch = SearchBranch::ButsonOnly;
    auto c = butson_match(s, construct_ame43(), opt);
    ASSERT_EQ(c.verdict, Verdict::Equivalent);
    EXPECT_TRUE(certify_witness(SparseState::from_minimal(s), SparseState::from_minimal(construct_ame43()), *c.witness)
                    .verdict == Verdict::Equivalent);
}

TEST(ButsonMatch, Ame44UnderFourierSquared) {
    auto s = construct_ame44();
    auto f2 = fourier(2);
    auto layer = LocalOperator::uniform(4, SiteMatrix::butson(tensor_butson(f2, f2)));
    auto img = to_minimal_support(layer.apply(SparseState::from_minimal(s)), 2);
    ASSERT_TRUE(img.has_value());
    auto c = butson_match(s, *img);
    ASSERT_EQ(c.verdict, Verdict::Equivalent);
    MatchOptions opt;
    opt.branch = SearchBranch::ButsonOnly;
    auto b = butson_match(s, *img, opt);
    ASSERT_EQ(b.verdict, Verdict::Equivalent);
    EXPECT_TRUE(witness_structure(*b.witness).ok);
}

TEST(ButsonMatch, HexacodeFamilyExcludedFromButsonForm) {
    auto c = butson_match(ame64_phi(0.1), ame64_phi(0.7));
    EXPECT_EQ(c.verdict, Verdict::Inequivalent);
    EXPECT_EQ(c.reason, Reason::NecessaryConditionViolated);
    EXPECT_FALSE(within_state_condition(ame64_phi(0.1)).holds);
    EXPECT_TRUE(within_state_condition(construct_ame64()).holds);
}

TEST(Automorphisms, Ame43ContainsFourierLayer) {
    auto auts = automorphisms(construct_ame43(), AutBranch::LMButson);
    auto f = LocalOperator::uniform(4, SiteMatrix::butson(fourier(3)));
    EXPECT_TRUE(std::any_of(auts.begin(), auts.end(),
                            [&](const LocalOperator &o) { return operators_equal_up_to_phase(o, f); }));
    auto s = SparseState::from_minimal(construct_ame43());
    for (const auto &o : auts) EXPECT_TRUE(states_equal_up_to_global_phase(o.apply(s), s).has_value());
}

TEST(FamilyClasses, HexacodeSamples) {
    auto rep = family_classes(construct_ame64(), 0, {0.1, 0.7, 1.3, 2.9});
    int pairs = 0;
    for (const auto &p : rep.pairs) {
        if (p.kind == "pair") {
            pairs++;
            EXPECT_TRUE(p.two_term_separated);
            EXPECT_EQ(p.certificate.verdict, Verdict::Inequivalent);
            EXPECT_EQ(p.certificate.reason, Reason::NecessaryConditionViolated);
        } else if (p.kind == "self") {
            EXPECT_FALSE(p.two_term_separated);
            EXPECT_EQ(p.certificate.verdict, Verdict::Equivalent);
        } else {
            EXPECT_FALSE(p.two_term_separated);
            EXPECT_NE(std::find(p.satisfiable_cases.begin(), p.satisfiable_cases.end(), "conjugate"),
                      p.satisfiable_cases.end());
        }
    }
    EXPECT_EQ(pairs, 6);
    EXPECT_THROW(family_classes(construct_ame43(), 0, {0.1}), DomainError);
}
