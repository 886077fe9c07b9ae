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


#ifndef AME_REDUCTIONS_HPP
#define AME_REDUCTIONS_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ame/butson.hpp"
#include "ame/common.hpp"
#include "ame/cyclotomic.hpp"
#include "ame/equivalence.hpp"
#include "ame/local_operator.hpp"
#include "ame/state.hpp"

namespace ame {

// ---------------------------------------------------------------------------
// LM filter on (k+1)-party reductions

enum class FilterVerdict { Passed, Failed };

struct ReductionFilterReport {
    FilterVerdict verdict = FilterVerdict::Passed;
    std::vector<int> subset;  // failing subset when Failed
    std::string reason;
    bool exact = true;
    size_t subsets_examined = 0;
};

/// Support rows of s restricted to `keep`, as a unit-phase state of strength k.
inline MinimalSupportState projected_support(const MinimalSupportState &s, const std::vector<int> &keep) {
    std::vector<MultiIndex> rows;
    for (const auto &r : s.support()) rows.push_back(project(r, keep));
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return MinimalSupportState::create((int)keep.size(), s.d(), s.k(), rows);
}

/// For 2k < N every (k+1)-party reduction of a minimal-support state is the
/// uniform mixture over the projected support (rows agree on >= k outside
/// positions only when equal), so LM-equivalence of the reductions is
/// isomorphism of the projected supports under local symbol permutations.
inline ReductionFilterReport reduced_lm_filter(const MinimalSupportState &a, const MinimalSupportState &b,
                                               int subset_size = 0, const MatchOptions &opt = {}) {
    if (a.n() != b.n() || a.d() != b.d() || a.k() != b.k()) throw DomainError("reduced_lm_filter: shapes differ");
    int k = a.k(), n = a.n();
    if (2 * k >= n) throw DomainError("reduced_lm_filter: requires 2k < N; the filter is not valid at 2k = N");
    if (subset_size == 0) subset_size = k + 1;
    if (subset_size <= k || subset_size > n - k) throw DomainError("reduced_lm_filter: subset size must lie in (k, N-k]");
    auto subs = subsets(n, subset_size);
    std::vector<signed char> ok(subs.size(), -1);
    parallel_for(subs.size(), [&](size_t i) {
        auto pa = projected_support(a, subs[i]);
        auto pb = projected_support(b, subs[i]);
        auto c = detail::lm_search(pa, pb, opt, false);
        if (c.aborted) throw UnsupportedError("reduced_lm_filter: node budget exhausted");
        ok[i] = c.witnesses.empty() ? 0 : 1;
    });
    ReductionFilterReport r;
    for (size_t i = 0; i < subs.size(); i++) {
        r.subsets_examined++;
        if (!ok[i]) {
            r.verdict = FilterVerdict::Failed;
            r.subset = subs[i];
            r.reason = "projected supports are not related by local symbol permutations";
            break;
        }
    }
    return r;
}

/// Sorted spectra of all m-party reductions differ somewhere (an LU invariant).
struct SpectrumComparison {
    bool differ = false;
    std::vector<int> subset;
};

inline SpectrumComparison compare_reduced_spectra(const SparseState &a, const SparseState &b, int m) {
    SpectrumComparison out;
    auto subs = subsets(a.n(), m);
    std::vector<char> diff(subs.size(), 0);
    parallel_for(subs.size(), [&](size_t i) {
        auto ea = reduced_density(a, subs[i]).eigenvalues();
        auto eb = reduced_density(b, subs[i]).eigenvalues();
        for (size_t t = 0; t < ea.size(); t++) {
            if (std::fabs(ea[t] - eb[t]) > 1e-8) {
                diff[i] = 1;
                break;
            }
        }
    });
    for (size_t i = 0; i < subs.size(); i++) {
        if (diff[i]) {
            out.differ = true;
            out.subset = subs[i];
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// The triangular matrices W, V and the layers U4 = (w^{w_ij}), U5 = (w^{v_ij})

using IntMatrix = std::vector<std::vector<int>>;

struct TriangularMatrixPair {
    int d = 0;
    IntMatrix w, v;          // exponents mod d
    ButsonMatrix u4, u5;     // entries exp(2 pi i w_ij / d); unitary after 1/sqrt(d)
};

namespace detail {

inline void require_odd(int d, const char *what) {
    if (d < 3 || d % 2 == 0) throw DomainError(std::string(what) + ": requires odd d >= 3");
}

inline ButsonMatrix exponent_matrix(const IntMatrix &e, int d) {
    ButsonMatrix m;
    m.d = d;
    m.q = d;
    for (const auto &row : e)
        for (int x : row) m.e.push_back(Phase::rational(x, d));
    return m;
}

}  // namespace detail

/// Rules: w_00 = v_00 = 0; w_0(j+1) = w_0j + 2j, v_0(j+1) = v_0j - 2j;
/// w_ij = w_(i-1)(j-1), v_ij = v_(i-2)(j-1), all indices mod d.
inline IntMatrix triangular_w_recursive(int d) {
    detail::require_odd(d, "triangular_w_recursive");
    IntMatrix w(d, std::vector<int>(d, 0));
    for (int j = 0; j + 1 < d; j++) w[0][j + 1] = (int)mod(w[0][j] + 2 * j, d);
    for (int i = 1; i < d; i++)
        for (int j = 0; j < d; j++) w[i][j] = w[i - 1][(int)mod(j - 1, d)];
    return w;
}

inline IntMatrix triangular_v_recursive(int d) {
    detail::require_odd(d, "triangular_v_recursive");
    IntMatrix v(d, std::vector<int>(d, 0));
    for (int j = 0; j + 1 < d; j++) v[0][j + 1] = (int)mod(v[0][j] - 2 * j, d);
    // Rows 2, 4, ..., d-1, 1, 3, ... each follow from the row two before.
    int prev = 0;
    for (int step = 1; step < d; step++) {
        int i = (int)mod(prev + 2, d);
        for (int j = 0; j < d; j++) v[i][j] = v[prev][(int)mod(j - 1, d)];
        prev = i;
    }
    return v;
}

/// t_k = k(k+1)/2; 2 t_k is taken mod d, so negative k is fine.
inline int twice_triangular(int64_t k, int d) { return (int)mod(k * (k + 1), d); }

/// w_ij = 2 t_{j-i-1}; v_ij = -2 t_{j-i/2-1} (i even), -2 t_{j-(i+d)/2-1} (i odd).
inline IntMatrix triangular_w_closed(int d) {
    detail::require_odd(d, "triangular_w_closed");
    IntMatrix w(d, std::vector<int>(d));
    for (int i = 0; i < d; i++)
        for (int j = 0; j < d; j++) w[i][j] = twice_triangular(j - i - 1, d);
    return w;
}

inline IntMatrix triangular_v_closed(int d) {
    detail::require_odd(d, "triangular_v_closed");
    IntMatrix v(d, std::vector<int>(d));
    for (int i = 0; i < d; i++) {
        int h = i % 2 == 0 ? i / 2 : (i + d) / 2;
        for (int j = 0; j < d; j++) v[i][j] = (int)mod(-twice_triangular(j - h - 1, d), d);
    }
    return v;
}

inline TriangularMatrixPair build_u4_u5(int d) {
    detail::require_odd(d, "build_u4_u5");
    TriangularMatrixPair p;
    p.d = d;
    p.w = triangular_w_recursive(d);
    p.v = triangular_v_recursive(d);
    if (p.w != triangular_w_closed(d) || p.v != triangular_v_closed(d)) {
        throw std::logic_error("build_u4_u5: recursive and closed forms disagree for d = " + std::to_string(d));
    }
    p.u4 = detail::exponent_matrix(p.w, d);
    p.u5 = detail::exponent_matrix(p.v, d);
    return p;
}

/// Exponent tables of the displayed layers for d = 3 and d = 5.
inline const IntMatrix &printed_u4(int d) {
    static const IntMatrix d3 = {{0, 0, 2}, {2, 0, 0}, {0, 2, 0}};
    static const IntMatrix d5 = {{0, 0, 4, 2, 4}, {4, 0, 0, 4, 2}, {2, 4, 0, 0, 4}, {4, 2, 4, 0, 0}, {0, 4, 2, 4, 0}};
    if (d == 3) return d3;
    if (d == 5) return d5;
    throw DomainError("printed layers exist for d = 3 and d = 5 only");
}
inline const IntMatrix &printed_u5(int d) {
    static const IntMatrix d3 = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
    static const IntMatrix d5 = {{0, 0, 1, 3, 1}, {1, 3, 1, 0, 0}, {1, 0, 0, 1, 3}, {0, 1, 3, 1, 0}, {3, 1, 0, 0, 1}};
    if (d == 3) return d3;
    if (d == 5) return d5;
    throw DomainError("printed layers exist for d = 3 and d = 5 only");
}

struct PrintedComparison {
    bool literal = false;   // equal for omega = exp(2 pi i / d)
    int root_power = 0;     // g with recursion(omega^g) == printed(omega); 0 if none
};

inline PrintedComparison compare_with_printed(const TriangularMatrixPair &p) {
    const auto &a = printed_u4(p.d);
    const auto &b = printed_u5(p.d);
    PrintedComparison c;
    c.literal = p.w == a && p.v == b;
    for (int g = 1; g < p.d && !c.root_power; g++) {
        if (std::gcd(g, p.d) != 1) continue;
        bool ok = true;
        for (int i = 0; i < p.d && ok; i++) {
            for (int j = 0; j < p.d && ok; j++) {
                ok = mod((int64_t)g * p.w[i][j], p.d) == a[i][j] && mod((int64_t)g * p.v[i][j], p.d) == b[i][j];
            }
        }
        if (ok) c.root_power = g;
    }
    return c;
}

// ---------------------------------------------------------------------------
// rho_345 lemma

/// rho_345 of the minimal-support AME(5,d)': uniform over |s, s+j, s+2j>.
inline DensityMatrix rho345_minimal(int d) {
    DensityMatrix r;
    r.keep = {2, 3, 4};
    r.d = d;
    r.dim = ipow(d, 3);
    for (int s = 0; s < d; s++) {
        for (int j = 0; j < d; j++) {
            uint64_t c = encode({s, (s + j) % d, (s + 2 * j) % d}, d);
            r.entries.emplace(std::make_pair(c, c), ComplexAmp::integer(1));
        }
    }
    r.trace = ComplexAmp::integer((int64_t)d * d);
    return r;
}

struct LemmaCheck {
    bool holds = false;
    bool exact = true;
    uint64_t entries_checked = 0;
    std::string detail;
};

/// rho_345(AME(5,d)') == X rho_345(AME(5,d)) X^dagger with X = Id (x) conj(U4) (x) conj(U5),
/// each layer scaled by 1/sqrt(d). AME(5,d) is the phased d^3-term state.
inline LemmaCheck rho345_lemma_check(int d) {
    detail::require_odd(d, "verify_rho345_lemma");
    auto p = build_u4_u5(d);
    auto rho = reduced_density(construct_ame5_phased(d), {2, 3, 4});
    DensityMatrix target = rho345_minimal(d);
    LemmaCheck out;
    if (is_prime(d) && d >= 5) {
        auto from_state = reduced_density(construct_ame5_prime(d), {2, 3, 4});
        for (const auto &[rc, v] : from_state.entries) {
            if (!v.is_zero() && !(v * target.trace == target.raw(rc.first, rc.second) * from_state.trace)) {
                out.detail = "minimal-support reduction differs from |s,s+j,s+2j> mixture";
                return out;
            }
        }
    }
    const uint64_t dim = ipow(d, 3), d2 = (uint64_t)d * d;
    if (d > 9) {
        // Float check through dense matrices.
        out.exact = false;
        Eigen::MatrixXcd r = rho.dense(), t = target.dense();
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero((Eigen::Index)dim, (Eigen::Index)dim);
        double f = 1.0 / d;
        for (uint64_t a = 0; a < dim; a++) {
            for (uint64_t b = 0; b < dim; b++) {
                if (a / d2 != b / d2) continue;
                int a1 = (int)(a / d % d), a2 = (int)(a % d), b1 = (int)(b / d % d), b2 = (int)(b % d);
                x((Eigen::Index)a, (Eigen::Index)b) =
                    std::conj(p.u4.at(a1, b1).value() * p.u5.at(a2, b2).value()) * f;
            }
        }
        double err = (x * r * x.adjoint() - t).cwiseAbs().maxCoeff();
        out.holds = err <= 1e-10;
        out.entries_checked = dim * dim;
        out.detail = "max entry deviation " + std::to_string(err);
        return out;
    }
    // Accumulate X rho X^dagger * d^2 as coefficient vectors over Z[omega_d].
    std::vector<int64_t> acc(dim * dim * (uint64_t)d, 0);
    for (const auto &[rc, val] : rho.entries) {
        if (val.is_zero()) continue;
        std::vector<int64_t> c = val.exact().lift(std::lcm(val.exact().order(), d)).coeffs();
        if ((int)c.size() != d) throw std::logic_error("rho345 entries outside Q(omega_d)");
        uint64_t u = rc.first, v = rc.second;
        uint64_t u0 = u / d2, v0 = v / d2;
        int u1 = (int)(u / d % d), u2 = (int)(u % d), v1 = (int)(v / d % d), v2 = (int)(v % d);
        for (int x1 = 0; x1 < d; x1++) {
            for (int x2 = 0; x2 < d; x2++) {
                uint64_t x = u0 * d2 + (uint64_t)x1 * d + x2;
                int ex = p.w[x1][u1] + p.v[x2][u2];
                for (int y1 = 0; y1 < d; y1++) {
                    for (int y2 = 0; y2 < d; y2++) {
                        uint64_t y = v0 * d2 + (uint64_t)y1 * d + y2;
                        int e = (int)mod(p.w[y1][v1] + p.v[y2][v2] - ex, d);
                        int64_t *dst = &acc[(x * dim + y) * d];
                        for (int t = 0; t < d; t++) dst[(t + e) % d] += c[t];
                    }
                }
            }
        }
    }
    // acc / (d^2 trace) == target / target.trace
    Cyclotomic lhs_scale = target.trace.exact();
    Cyclotomic rhs_scale = rho.trace.exact() * (int64_t)(d * d);
    for (uint64_t x = 0; x < dim; x++) {
        for (uint64_t y = 0; y < dim; y++) {
            Cyclotomic a(d);
            for (int t = 0; t < d; t++) a.add_term(t, acc[(x * dim + y) * d + t]);
            ComplexAmp tv = target.raw(x, y);
            Cyclotomic b = tv.is_zero() ? Cyclotomic::integer(0) : tv.exact();
            out.entries_checked++;
            if (a * lhs_scale != b * rhs_scale) {
                out.detail = "entry (" + std::to_string(x) + "," + std::to_string(y) + ") differs";
                return out;
            }
        }
    }
    out.holds = true;
    out.detail = "all " + std::to_string(out.entries_checked) + " entries agree exactly";
    return out;
}

inline bool verify_rho345_lemma(int d) { return rho345_lemma_check(d).holds; }

// ---------------------------------------------------------------------------
// AME(5,d) (d^3 terms) versus AME(5,d)' (minimal support)

struct CertificateStep {
    std::string name;
    std::string claim;
    bool passed = false;
    std::string detail;
};

struct Ame5Certificate {
    int d = 0;
    std::vector<CertificateStep> steps;
    std::vector<std::string> assumptions;
    Verdict verdict = Verdict::Inconclusive;
    bool exact = true;

    bool passed() const {
        return !steps.empty() && std::all_of(steps.begin(), steps.end(), [](const CertificateStep &s) { return s.passed; });
    }
};

inline Ame5Certificate verify_ame5_nonequivalence(int d, uint64_t seed = 12345) {
    if (d < 5 || !is_prime(d)) throw DomainError("verify_ame5_nonequivalence: requires prime d >= 5");
    Ame5Certificate cert;
    cert.d = d;
    auto pair = build_u4_u5(d);

    // (1)
    auto lemma = rho345_lemma_check(d);
    cert.exact = lemma.exact;
    cert.steps.push_back({"rho345-lemma",
                          "rho_345(AME(5,d)') = (Id x conj U4 x conj U5) rho_345(AME(5,d)) (...)^dagger",
                          lemma.holds, lemma.detail});

    // (2)
    CertificateStep layer{"layer-support", "U4, U5 unitary and supp((U4 x U5)|a,b>) = d^2 for all a, b", true, ""};
    bool unitary = is_butson(pair.u4, d) && is_butson(pair.u5, d);
    uint64_t min_support = std::numeric_limits<uint64_t>::max();
    for (int a = 0; a < d; a++) {
        for (int b = 0; b < d; b++) {
            uint64_t cnt = 0;
            for (int x = 0; x < d; x++)
                for (int y = 0; y < d; y++)
                    cnt += !ComplexAmp::from_phase(pair.u4.at(x, a) * pair.u5.at(y, b)).is_zero();
            min_support = std::min(min_support, cnt);
            layer.passed = layer.passed && cnt == (uint64_t)d * d;
        }
    }
    layer.passed = layer.passed && unitary;
    layer.detail = std::string(unitary ? "exact Gram identity holds" : "not unitary") +
                   "; minimum column support " + std::to_string(min_support);
    cert.steps.push_back(layer);

    // (3)
    CertificateStep count{"support-count",
                          "supp(AME(5,d)) = d^3 while every U1 x U2 x M3 x M4 U4 x M5 U5 with monomial U1, U2 maps "
                          "AME(5,d)' to d^4 terms",
                          false, ""};
    auto ex3 = construct_ame5_phased(d);
    auto ex5 = SparseState::from_minimal(construct_ame5_prime(d));
    LocalOperator layer_op = LocalOperator::identity(5, d);
    layer_op.sites[3] = SiteMatrix::butson(pair.u4);
    layer_op.sites[4] = SiteMatrix::butson(pair.u5);
    uint64_t base = layer_op.apply(ex5).support_count();
    bool ok = ex3.support_count() == ipow(d, 3) && base == ipow(d, 4);
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 4 && ok; trial++) {
        LocalOperator m;
        for (int j = 0; j < 5; j++) {
            std::vector<int> p(d);
            std::iota(p.begin(), p.end(), 0);
            std::shuffle(p.begin(), p.end(), rng);
            std::vector<Phase> ph;
            for (int a = 0; a < d; a++) ph.push_back(Phase::rational((int64_t)(rng() % d), d));
            m.sites.push_back(SiteMatrix::monomial(p, ph));
        }
        LocalOperator full = m;
        full.sites[3] = m.sites[3] * layer_op.sites[3];
        full.sites[4] = m.sites[4] * layer_op.sites[4];
        ok = full.apply(ex5).support_count() == ipow(d, 4);
    }
    count.passed = ok;
    count.detail = "supp(AME(5,d)) = " + std::to_string(ex3.support_count()) + ", supp(layer * AME(5,d)') = " +
                   std::to_string(base) + ", 4 random monomial decorations agree";
    cert.steps.push_back(count);

    cert.assumptions = {
        "any LU map restricts on sites 3,4,5 to M3 x M4 U4 x M5 U5 (automorphisms of the reduction are local monomials)",
        "U1, U2 are monomial (linear independence of the d^2 vectors B_ij, established by the unitarity in step 2)",
    };
    cert.verdict = cert.passed() ? Verdict::Inequivalent : Verdict::Inconclusive;
    return cert;
}

}  // namespace ame

#endif  // AME_REDUCTIONS_HPP
