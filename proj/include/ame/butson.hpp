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


#ifndef AME_BUTSON_HPP
#define AME_BUTSON_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "ame/common.hpp"
#include "ame/cyclotomic.hpp"
#include "ame/phase.hpp"

namespace ame {

/// d x d matrix of q-th roots of unity, stored unscaled (unitary after 1/sqrt(d)).
struct ButsonMatrix {
    int d = 0;
    int q = 1;
    std::vector<Phase> e;  // row-major

    const Phase &at(int r, int c) const { return e[(size_t)r * d + c]; }
    Phase &at(int r, int c) { return e[(size_t)r * d + c]; }
    bool operator==(const ButsonMatrix &o) const { return d == o.d && e == o.e; }

    /// Least common denominator of all entry turns.
    int64_t common_order() const {
        int64_t l = 1;
        for (const auto &p : e) l = std::lcm(l, p.den());
        return l;
    }
    std::string str() const {
        std::string s;
        for (int r = 0; r < d; r++) {
            for (int c = 0; c < d; c++) s += (c ? " " : "") + at(r, c).str();
            s += "\n";
        }
        return s;
    }
};

inline ButsonMatrix fourier(int d) {
    if (d < 1) throw DomainError("fourier: d must be positive");
    ButsonMatrix m;
    m.d = d;
    m.q = d;
    for (int j = 0; j < d; j++) {
        for (int k = 0; k < d; k++) m.e.push_back(root_of_unity(d, (int64_t)j * k));
    }
    return m;
}

/// sum_j a_j conj(b_j) == 0 for rows given as turn numerators over order n.
inline bool orthogonal_rows(const std::vector<int64_t> &a, const std::vector<int64_t> &b, int n) {
    Cyclotomic s(n);
    for (size_t j = 0; j < a.size(); j++) s.add_term(a[j] - b[j], 1);
    return s.is_zero();
}

inline bool is_butson(const ButsonMatrix &m, int q) {
    if (m.d < 1 || m.e.size() != (size_t)m.d * m.d) return false;
    for (const auto &p : m.e) {
        if (!p.is_exact() || q % p.den() != 0) return false;
    }
    if (q <= kMaxCyclotomicOrder) {
        std::vector<std::vector<int64_t>> rows(m.d, std::vector<int64_t>(m.d));
        for (int r = 0; r < m.d; r++) {
            for (int c = 0; c < m.d; c++) rows[r][c] = m.at(r, c).num() * (q / m.at(r, c).den());
        }
        for (int a = 0; a < m.d; a++) {
            for (int b = a + 1; b < m.d; b++) {
                if (!orthogonal_rows(rows[a], rows[b], q)) return false;
            }
        }
        return true;
    }
    for (int a = 0; a < m.d; a++) {
        for (int b = a + 1; b < m.d; b++) {
            std::complex<double> s = 0;
            for (int c = 0; c < m.d; c++) s += (m.at(a, c) / m.at(b, c)).value();
            if (std::abs(s) > tolerance() * m.d) return false;
        }
    }
    return true;
}

inline ButsonMatrix tensor_butson(const ButsonMatrix &a, const ButsonMatrix &b) {
    ButsonMatrix m;
    m.d = a.d * b.d;
    m.q = (int)std::lcm((int64_t)a.q, (int64_t)b.q);
    m.e.resize((size_t)m.d * m.d);
    for (int r = 0; r < m.d; r++) {
        for (int c = 0; c < m.d; c++) m.at(r, c) = a.at(r / b.d, c / b.d) * b.at(r % b.d, c % b.d);
    }
    return m;
}

/// First row and first column made all ones by diagonal multiplications.
inline ButsonMatrix dephase(const ButsonMatrix &m) {
    ButsonMatrix r = m;
    for (int i = 0; i < m.d; i++) {
        Phase x = m.at(i, 0).conj();
        for (int j = 0; j < m.d; j++) r.at(i, j) = m.at(i, j) * x;
    }
    for (int j = 0; j < m.d; j++) {
        Phase y = r.at(0, j).conj();
        for (int i = 0; i < m.d; i++) r.at(i, j) = r.at(i, j) * y;
    }
    return r;
}

/// Monomial matrix: entry [x][col[x]] = val[x], zero elsewhere.
struct MonomialMatrix {
    std::vector<int> col;
    std::vector<Phase> val;
};

struct MonomialWitness {
    MonomialMatrix left, right;  // b = left * a * right
};

namespace detail {

/// A matrix of turns over a common order, and how it was obtained from a
/// source matrix: out[i][j] = src[row_src[i]][col_src[j]] + row_add[i] + col_add[j].
struct TurnForm {
    std::vector<int64_t> t;
    std::vector<int> row_src, col_src;
    std::vector<int64_t> row_add, col_add;
};

inline std::vector<int64_t> turns_over(const ButsonMatrix &m, int64_t order) {
    std::vector<int64_t> t(m.e.size());
    for (size_t i = 0; i < t.size(); i++) t[i] = m.e[i].num() * (order / m.e[i].den());
    return t;
}

/// Calls emit(form) for every dephased, row-sorted form of the matrix,
/// i.e. every choice of pivot row r, pivot column c and order of the other columns.
template <typename Emit>
void for_each_dephased_form(const std::vector<int64_t> &src, int d, int64_t order, Emit emit) {
    std::vector<int> others(d - 1);
    for (int r = 0; r < d; r++) {
        for (int c = 0; c < d; c++) {
            std::vector<int64_t> y(d), x(d);
            for (int j = 0; j < d; j++) y[j] = mod(-src[r * d + j], order);
            for (int i = 0; i < d; i++) x[i] = mod(-src[i * d + c] - y[c], order);
            int o = 0;
            for (int j = 0; j < d; j++) {
                if (j != c) others[o++] = j;
            }
            std::sort(others.begin(), others.end());
            do {
                std::vector<int> cols(d);
                cols[0] = c;
                for (int j = 1; j < d; j++) cols[j] = others[j - 1];
                std::vector<std::vector<int64_t>> rows(d, std::vector<int64_t>(d));
                for (int i = 0; i < d; i++) {
                    for (int j = 0; j < d; j++) rows[i][j] = mod(src[i * d + cols[j]] + x[i] + y[cols[j]], order);
                }
                std::vector<int> perm(d);
                std::iota(perm.begin(), perm.end(), 0);
                std::sort(perm.begin(), perm.end(), [&](int a, int b) { return rows[a] < rows[b]; });
                TurnForm f;
                f.t.reserve((size_t)d * d);
                for (int i = 0; i < d; i++) f.t.insert(f.t.end(), rows[perm[i]].begin(), rows[perm[i]].end());
                f.row_src = perm;
                f.col_src = cols;
                for (int i = 0; i < d; i++) f.row_add.push_back(x[perm[i]]);
                for (int j = 0; j < d; j++) f.col_add.push_back(y[cols[j]]);
                emit(f);
            } while (std::next_permutation(others.begin(), others.end()));
        }
    }
}

inline TurnForm canonical_form(const std::vector<int64_t> &src, int d, int64_t order) {
    TurnForm best;
    bool have = false;
    for_each_dephased_form(src, d, order, [&](const TurnForm &f) {
        if (!have || f.t < best.t) {
            best = f;
            have = true;
        }
    });
    return best;
}

struct VecHash {
    size_t operator()(const std::vector<int64_t> &v) const {
        size_t h = 1469598103934665603ull;
        for (auto x : v) h = (h ^ (size_t)x) * 1099511628211ull;
        return h;
    }
};

}  // namespace detail

/// Lexicographically least dephased, row-sorted form under monomial equivalence.
inline ButsonMatrix canonical_butson(const ButsonMatrix &m) {
    int64_t order = m.common_order();
    auto f = detail::canonical_form(detail::turns_over(m, order), m.d, order);
    ButsonMatrix r;
    r.d = m.d;
    r.q = m.q;
    for (auto t : f.t) r.e.push_back(Phase::rational(t, order));
    return r;
}

/// Checks b == left * a * right exactly.
inline bool verify_monomial_witness(const ButsonMatrix &a, const ButsonMatrix &b, const MonomialWitness &w) {
    int d = a.d;
    for (int x = 0; x < d; x++) {
        for (int y = 0; y < d; y++) {
            // (L a R)[x][y] = L[x][col_L[x]] * a[col_L[x]][z] * R[z][y] with col_R[z] = y.
            int z = -1;
            for (int t = 0; t < d; t++) {
                if (w.right.col[t] == y) z = t;
            }
            if (z < 0) return false;
            Phase v = w.left.val[x] * a.at(w.left.col[x], z) * w.right.val[z];
            if (v != b.at(x, y)) return false;
        }
    }
    return true;
}

/// Complete for exact entries; cost grows as d^2 (d-1)!, capped at d <= 8.
inline std::optional<MonomialWitness> monomially_equivalent(const ButsonMatrix &a, const ButsonMatrix &b) {
    if (a.d != b.d) return std::nullopt;
    if (a.d > 8) throw UnsupportedError("monomially_equivalent: complete search is capped at d <= 8");
    int d = a.d;
    int64_t order = std::lcm(a.common_order(), b.common_order());
    auto fa = detail::canonical_form(detail::turns_over(a, order), d, order);
    auto fb = detail::canonical_form(detail::turns_over(b, order), d, order);
    if (fa.t != fb.t) return std::nullopt;
    // C[i][j] = a[ra_i][ca_j] + xa_i + ya_j = b[rb_i][cb_j] + xb_i + yb_j.
    // => b[rb_i][cb_j] = a[ra_i][ca_j] + (xa_i - xb_i) + (ya_j - yb_j).
    MonomialWitness w;
    w.left.col.assign(d, 0);
    w.left.val.assign(d, Phase::one());
    w.right.col.assign(d, 0);
    w.right.val.assign(d, Phase::one());
    for (int i = 0; i < d; i++) {
        w.left.col[fb.row_src[i]] = fa.row_src[i];
        w.left.val[fb.row_src[i]] = Phase::rational(fa.row_add[i] - fb.row_add[i], order);
    }
    for (int j = 0; j < d; j++) {
        w.right.col[fa.col_src[j]] = fb.col_src[j];
        w.right.val[fa.col_src[j]] = Phase::rational(fa.col_add[j] - fb.col_add[j], order);
    }
    if (!verify_monomial_witness(a, b, w)) {
        throw std::logic_error("monomial witness failed replay");
    }
    return w;
}

/// Representatives of BH(d,d) up to monomial equivalence: lexicographically
/// least dephased forms, in sorted order.
inline std::vector<ButsonMatrix> enumerate_bh(int d) {
    if (d > 6) throw UnsupportedError("enumerate_bh: enumeration is capped at d <= 6");
    if (d < 1) throw DomainError("enumerate_bh: d must be positive");
    if (d == 1) return {fourier(1)};
    // Candidate rows: leading 0, orthogonal to the all-zero row.
    std::vector<std::vector<int64_t>> cand;
    std::vector<int64_t> zero(d, 0);
    for (uint64_t c = 0; c < ipow(d, d - 1); c++) {
        std::vector<int64_t> v(d, 0);
        uint64_t x = c;
        for (int j = d - 1; j >= 1; j--) {
            v[j] = (int64_t)(x % d);
            x /= d;
        }
        if (orthogonal_rows(v, zero, d)) cand.push_back(v);
    }
    size_t m = cand.size();
    std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
    parallel_for(m, [&](size_t i) {
        for (size_t j = i + 1; j < m; j++) adj[i][j] = orthogonal_rows(cand[i], cand[j], d);
    });
    std::unordered_set<std::vector<int64_t>, detail::VecHash> seen;
    std::vector<std::vector<int64_t>> reps;
    std::vector<size_t> chosen;
    std::function<void(size_t)> rec = [&](size_t start) {
        if ((int)chosen.size() == d - 1) {
            std::vector<int64_t> t(zero);
            for (size_t i : chosen) t.insert(t.end(), cand[i].begin(), cand[i].end());
            if (seen.count(t)) return;
            auto canon = detail::canonical_form(t, d, d);
            reps.push_back(canon.t);
            detail::for_each_dephased_form(canon.t, d, d, [&](const detail::TurnForm &f) { seen.insert(f.t); });
            return;
        }
        for (size_t i = start; i < m; i++) {
            bool ok = true;
            for (size_t j : chosen) {
                if (!adj[j][i]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            chosen.push_back(i);
            rec(i + 1);
            chosen.pop_back();
        }
    };
    rec(0);
    std::sort(reps.begin(), reps.end());
    std::vector<ButsonMatrix> out;
    for (const auto &t : reps) {
        ButsonMatrix b;
        b.d = d;
        b.q = d;
        for (auto x : t) b.e.push_back(Phase::rational(x, d));
        out.push_back(b);
    }
    return out;
}

}  // namespace ame

#endif  // AME_BUTSON_HPP
