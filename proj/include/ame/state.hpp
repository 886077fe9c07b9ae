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


#ifndef AME_STATE_HPP
#define AME_STATE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ame/common.hpp"
#include "ame/cyclotomic.hpp"
#include "ame/phase.hpp"

namespace ame {

using MultiIndex = std::vector<int>;

/// Big-endian mixed-radix code; lexicographic order on indices = order on codes.
inline uint64_t encode(const MultiIndex &idx, int d) {
    uint64_t c = 0;
    for (int s : idx) {
        c = c * (uint64_t)d + (uint64_t)s;
    }
    return c;
}

inline MultiIndex decode(uint64_t code, int n, int d) {
    MultiIndex idx(n);
    for (int i = n - 1; i >= 0; i--) {
        idx[i] = (int)(code % (uint64_t)d);
        code /= (uint64_t)d;
    }
    return idx;
}

inline MultiIndex project(const MultiIndex &idx, const std::vector<int> &positions) {
    MultiIndex r;
    r.reserve(positions.size());
    for (int p : positions) {
        r.push_back(idx[p]);
    }
    return r;
}

inline std::string index_str(const MultiIndex &idx) {
    std::string s;
    for (size_t i = 0; i < idx.size(); i++) {
        if (i) s += ",";
        s += std::to_string(idx[i]);
    }
    return s;
}

/// True iff every `k`-column projection of `rows` is a bijection onto [d]^k
/// (which presumes rows.size() == d^k).
inline bool has_index_unity(const std::vector<MultiIndex> &rows, int n, int d, int k) {
    if (rows.size() != ipow(d, k)) {
        return false;
    }
    if (k == 0) {
        return true;
    }
    std::vector<char> seen(rows.size());
    for (const auto &cols : subsets(n, k)) {
        std::fill(seen.begin(), seen.end(), 0);
        for (const auto &r : rows) {
            uint64_t c = encode(project(r, cols), d);
            if (seen[c]) return false;
            seen[c] = 1;
        }
    }
    return true;
}

/// k-uniform state with exactly d^k unit-modulus terms.
class MinimalSupportState {
   public:
    MinimalSupportState() = default;

    /// Validates the index-unity property; rows are sorted lexicographically.
    static MinimalSupportState create(int n, int d, int k, std::vector<MultiIndex> rows,
                                      std::vector<Phase> phases = {}) {
        if (n < 1 || d < 1 || k < 0 || k > n) {
            throw DomainError("invalid state parameters");
        }
        if (phases.empty()) {
            phases.assign(rows.size(), Phase::one());
        }
        if (phases.size() != rows.size()) {
            throw DomainError("phase list length differs from support size");
        }
        for (const auto &r : rows) {
            if ((int)r.size() != n) {
                throw DomainError("multi-index length differs from party count");
            }
            for (int s : r) {
                if (s < 0 || s >= d) {
                    throw DomainError("symbol out of range in multi-index " + index_str(r));
                }
            }
        }
        if (rows.size() != ipow(d, k)) {
            throw ConstructionError("support size " + std::to_string(rows.size()) + " differs from d^k = " +
                                    std::to_string(ipow(d, k)));
        }
        if (!has_index_unity(rows, n, d, k)) {
            throw ConstructionError("support is not an orthogonal array of strength " + std::to_string(k) +
                                    " and index one");
        }
        std::vector<size_t> order(rows.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return rows[a] < rows[b]; });
        MinimalSupportState s;
        s.n_ = n;
        s.d_ = d;
        s.k_ = k;
        for (size_t i : order) {
            s.rows_.push_back(rows[i]);
            s.phases_.push_back(phases[i]);
        }
        return s;
    }

    int n() const { return n_; }
    int d() const { return d_; }
    int k() const { return k_; }
    size_t size() const { return rows_.size(); }
    const std::vector<MultiIndex> &support() const { return rows_; }
    const std::vector<Phase> &phases() const { return phases_; }
    const MultiIndex &row(size_t i) const { return rows_[i]; }
    const Phase &phase(size_t i) const { return phases_[i]; }

    std::optional<size_t> find(const MultiIndex &idx) const {
        auto it = std::lower_bound(rows_.begin(), rows_.end(), idx);
        if (it == rows_.end() || *it != idx) {
            return std::nullopt;
        }
        return (size_t)(it - rows_.begin());
    }

    bool all_exact() const {
        return std::all_of(phases_.begin(), phases_.end(), [](const Phase &p) { return p.is_exact(); });
    }

    bool operator==(const MinimalSupportState &o) const {
        return n_ == o.n_ && d_ == o.d_ && k_ == o.k_ && rows_ == o.rows_ && phases_ == o.phases_;
    }

   private:
    int n_ = 0, d_ = 0, k_ = 0;
    std::vector<MultiIndex> rows_;
    std::vector<Phase> phases_;
};

/// General state: map from basis code to (unnormalized) amplitude.
class SparseState {
   public:
    SparseState() = default;
    SparseState(int n, int d) : n_(n), d_(d) {
        if (n < 1 || d < 1) {
            throw DomainError("invalid state parameters");
        }
        ipow(d, n);  // overflow guard for the code space
    }

    static SparseState from_minimal(const MinimalSupportState &s) {
        SparseState r(s.n(), s.d());
        for (size_t i = 0; i < s.size(); i++) {
            r.terms_[encode(s.row(i), s.d())] = ComplexAmp::from_phase(s.phase(i));
        }
        return r;
    }

    int n() const { return n_; }
    int d() const { return d_; }
    const std::map<uint64_t, ComplexAmp> &terms() const { return terms_; }
    size_t support_count() const { return terms_.size(); }

    void add(const MultiIndex &idx, const ComplexAmp &a) {
        for (int s : idx) {
            if (s < 0 || s >= d_) throw DomainError("symbol out of range");
        }
        if ((int)idx.size() != n_) throw DomainError("multi-index length differs from party count");
        add_code(encode(idx, d_), a);
    }
    void add_code(uint64_t code, const ComplexAmp &a) {
        auto it = terms_.find(code);
        if (it == terms_.end()) {
            terms_.emplace(code, a);
        } else {
            it->second += a;
        }
    }
    /// Removes amplitudes that vanish (exactly, or within tolerance).
    void drop_zeros() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->second.is_zero()) {
                it = terms_.erase(it);
            } else {
                ++it;
            }
        }
    }
    bool is_exact() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const auto &kv) { return kv.second.is_exact(); });
    }
    double norm_sq() const {
        double s = 0;
        for (const auto &kv : terms_) s += std::norm(kv.second.value());
        return s;
    }

   private:
    int n_ = 0, d_ = 0;
    std::map<uint64_t, ComplexAmp> terms_;
};

/// Reduced density matrix over `keep`, stored sparse and unnormalized:
/// rho = entries / trace.
class DensityMatrix {
   public:
    std::vector<int> keep;
    int d = 0;
    uint64_t dim = 0;
    std::map<std::pair<uint64_t, uint64_t>, ComplexAmp> entries;
    ComplexAmp trace;

    ComplexAmp raw(uint64_t r, uint64_t c) const {
        auto it = entries.find({r, c});
        return it == entries.end() ? ComplexAmp::integer(0) : it->second;
    }
    std::complex<double> at(uint64_t r, uint64_t c) const {
        return raw(r, c).value() / trace.value();
    }

    /// rho == Id/dim, exactly when all amplitudes are exact.
    bool is_maximally_mixed() const {
        std::optional<ComplexAmp> diag;
        uint64_t diag_count = 0;
        for (const auto &[rc, v] : entries) {
            if (rc.first != rc.second) {
                if (!v.is_zero()) return false;
                continue;
            }
            diag_count++;
            if (!diag) {
                diag = v;
            } else if (!(v == *diag)) {
                return false;
            }
        }
        return diag_count == dim && diag && !diag->is_zero();
    }

    Eigen::MatrixXcd dense() const {
        if (dim > 4096) {
            throw DomainError("dense density matrix too large");
        }
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero((Eigen::Index)dim, (Eigen::Index)dim);
        std::complex<double> t = trace.value();
        for (const auto &[rc, v] : entries) {
            m((Eigen::Index)rc.first, (Eigen::Index)rc.second) = v.value() / t;
        }
        return m;
    }
    bool is_hermitian(double tol = tolerance()) const {
        for (const auto &[rc, v] : entries) {
            ComplexAmp w = raw(rc.second, rc.first);
            if (v.is_exact() && w.is_exact()) {
                if (!(v == w.conj())) return false;
            } else if (std::abs(v.value() - std::conj(w.value())) > tol * std::abs(trace.value())) {
                return false;
            }
        }
        return true;
    }
    /// Ascending eigenvalues (float).
    std::vector<double> eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense(), Eigen::EigenvaluesOnly);
        auto ev = es.eigenvalues();
        return std::vector<double>(ev.data(), ev.data() + ev.size());
    }
};

inline DensityMatrix reduced_density(const SparseState &s, const std::vector<int> &keep_in) {
    std::vector<int> keep = keep_in;
    std::sort(keep.begin(), keep.end());
    if (keep.empty() || (int)keep.size() >= s.n() ||
        std::adjacent_find(keep.begin(), keep.end()) != keep.end() || keep.front() < 0 || keep.back() >= s.n()) {
        throw DomainError("reduced_density: keep must be a nonempty strict subset of positions");
    }
    uint64_t dim = ipow(s.d(), (int)keep.size());
    if (dim > (1u << 20)) {
        throw DomainError("reduced_density: kept dimension exceeds 2^20");
    }
    std::vector<int> rest;
    for (int i = 0; i < s.n(); i++) {
        if (!std::binary_search(keep.begin(), keep.end(), i)) rest.push_back(i);
    }
    std::map<uint64_t, std::vector<std::pair<uint64_t, const ComplexAmp *>>> groups;
    for (const auto &[code, amp] : s.terms()) {
        MultiIndex idx = decode(code, s.n(), s.d());
        groups[encode(project(idx, rest), s.d())].push_back({encode(project(idx, keep), s.d()), &amp});
    }
    DensityMatrix rho;
    rho.keep = keep;
    rho.d = s.d();
    rho.dim = dim;
    rho.trace = ComplexAmp::integer(0);
    for (const auto &[_, g] : groups) {
        for (const auto &[a, va] : g) {
            for (const auto &[b, vb] : g) {
                ComplexAmp v = (*va) * vb->conj();
                auto it = rho.entries.find({a, b});
                if (it == rho.entries.end()) {
                    rho.entries.emplace(std::make_pair(a, b), v);
                } else {
                    it->second += v;
                }
                if (a == b) rho.trace += v;
            }
        }
    }
    return rho;
}

inline DensityMatrix reduced_density(const MinimalSupportState &s, const std::vector<int> &keep) {
    return reduced_density(SparseState::from_minimal(s), keep);
}

/// True iff every m-party reduction is maximally mixed.
inline bool is_m_uniform(const SparseState &s, int m) {
    if (m <= 0) return true;
    auto subs = subsets(s.n(), m);
    std::vector<char> ok(subs.size(), 0);
    parallel_for(subs.size(), [&](size_t i) { ok[i] = reduced_density(s, subs[i]).is_maximally_mixed(); });
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

/// Largest k such that all k-party reductions are maximally mixed.
inline int uniformity(const SparseState &s) {
    int k = 0;
    while (k + 1 <= s.n() / 2 && is_m_uniform(s, k + 1)) {
        k++;
    }
    return k;
}
inline int uniformity(const MinimalSupportState &s) {
    return uniformity(SparseState::from_minimal(s));
}

inline size_t support_count(const SparseState &s) {
    return s.support_count();
}
inline size_t support_count(const MinimalSupportState &s) {
    return s.size();
}

/// Minimal support means exactly d^k terms on a k-uniform state.
inline bool is_minimal_support(const SparseState &s, int k) {
    return s.support_count() == ipow(s.d(), k) && is_m_uniform(s, k);
}
inline bool is_minimal_support(const MinimalSupportState &s, int k) {
    return k == s.k() || (s.size() == ipow(s.d(), k) && is_m_uniform(SparseState::from_minimal(s), k));
}

/// Converts a sparse state with d^k equal-modulus terms whose support is an
/// index-unity array into phase form. The phases are relative to the first term.
inline std::optional<MinimalSupportState> to_minimal_support(const SparseState &s, int k) {
    if (s.support_count() != ipow(s.d(), k)) return std::nullopt;
    std::vector<MultiIndex> rows;
    std::vector<Phase> phases;
    const ComplexAmp &ref = s.terms().begin()->second;
    if (s.is_exact()) {
        Cyclotomic ref_sq = ref.exact() * ref.exact().conj();
        for (const auto &[code, amp] : s.terms()) {
            Cyclotomic g = amp.exact() * ref.exact().conj();
            // |amp| == |ref| and the ratio is a root of unity.
            if (amp.exact() * amp.exact().conj() != ref_sq) return std::nullopt;
            Phase ph;
            if (!g.phase_of(&ph)) return std::nullopt;
            if (g != ref_sq * Cyclotomic::from_phase(ph)) return std::nullopt;
            rows.push_back(decode(code, s.n(), s.d()));
            phases.push_back(ph);
        }
    } else {
        double r0 = std::abs(ref.value());
        for (const auto &[code, amp] : s.terms()) {
            std::complex<double> z = amp.value() / ref.value();
            if (std::abs(std::abs(amp.value()) - r0) > tolerance() * std::max(1.0, r0)) return std::nullopt;
            rows.push_back(decode(code, s.n(), s.d()));
            phases.push_back(Phase::from_angle(std::arg(z)));
        }
    }
    if (!has_index_unity(rows, s.n(), s.d(), k)) return std::nullopt;
    return MinimalSupportState::create(s.n(), s.d(), k, rows, phases);
}

/// Returns g with a = g*b for the normalized states, if it exists.
inline std::optional<Phase> states_equal_up_to_global_phase(const SparseState &a, const SparseState &b) {
    if (a.n() != b.n() || a.d() != b.d() || a.support_count() != b.support_count()) return std::nullopt;
    if (a.support_count() == 0) return Phase::one();
    auto ia = a.terms().begin();
    auto ib = b.terms().begin();
    for (; ia != a.terms().end(); ++ia, ++ib) {
        if (ia->first != ib->first) return std::nullopt;
    }
    const ComplexAmp &ar = a.terms().begin()->second;
    const ComplexAmp &br = b.terms().begin()->second;
    bool exact = a.is_exact() && b.is_exact();
    if (exact) {
        // a_I b_r == a_r b_I for every I, and ||a|| |b_r| == ||b|| |a_r| (compared squared).
        try {
            for (auto ja = a.terms().begin(), jb = b.terms().begin(); ja != a.terms().end(); ++ja, ++jb) {
                if (ja->second.exact() * br.exact() != ar.exact() * jb->second.exact()) return std::nullopt;
            }
            Phase g;
            Cyclotomic x = ar.exact() * br.exact().conj();
            if (!x.phase_of(&g)) return std::nullopt;
            return g;
        } catch (const std::overflow_error &) {
        }
    }
    double na = std::sqrt(a.norm_sq()), nb = std::sqrt(b.norm_sq());
    std::complex<double> g = (ar.value() / na) / (br.value() / nb);
    if (std::abs(std::abs(g) - 1.0) > 1e-8) return std::nullopt;
    for (auto ja = a.terms().begin(), jb = b.terms().begin(); ja != a.terms().end(); ++ja, ++jb) {
        if (std::abs(ja->second.value() / na - g * jb->second.value() / nb) > 1e-8) return std::nullopt;
    }
    return Phase::from_angle(std::arg(g));
}

inline std::optional<Phase> states_equal_up_to_global_phase(const MinimalSupportState &a,
                                                            const MinimalSupportState &b) {
    if (a.n() != b.n() || a.d() != b.d() || a.support() != b.support()) return std::nullopt;
    Phase g = a.phase(0) / b.phase(0);
    for (size_t i = 1; i < a.size(); i++) {
        if (a.phase(i) / b.phase(i) != g) return std::nullopt;
    }
    return g;
}

// ----------------------------------------------------------------------------
// Constructors.

inline MinimalSupportState construct_ghz(int n, int d) {
    if (n < 2 || d < 2) {
        throw DomainError("construct_ghz requires n >= 2 and d >= 2");
    }
    std::vector<MultiIndex> rows;
    for (int i = 0; i < d; i++) rows.push_back(MultiIndex(n, i));
    return MinimalSupportState::create(n, d, 1, rows);
}

/// Position j carries sum_t coeffs[j][t] * i_t mod d over the k free indices.
inline MinimalSupportState construct_linear(int d, const std::vector<std::vector<int>> &coeffs) {
    if (!is_prime(d)) {
        throw DomainError("construct_linear requires a prime local dimension");
    }
    if (coeffs.empty() || coeffs.front().empty()) {
        throw DomainError("construct_linear requires a nonempty generator table");
    }
    int n = (int)coeffs.size(), k = (int)coeffs.front().size();
    for (const auto &c : coeffs) {
        if ((int)c.size() != k) throw DomainError("ragged generator table");
    }
    std::vector<MultiIndex> rows;
    uint64_t total = ipow(d, k);
    for (uint64_t code = 0; code < total; code++) {
        MultiIndex free = decode(code, k, d);
        MultiIndex r(n);
        for (int j = 0; j < n; j++) {
            int64_t v = 0;
            for (int t = 0; t < k; t++) v += (int64_t)coeffs[j][t] * free[t];
            r[j] = (int)mod(v, d);
        }
        rows.push_back(r);
    }
    return MinimalSupportState::create(n, d, k, rows);
}

/// |i, j, i+j, 2i+j> over Z_3.
inline MinimalSupportState construct_ame43() {
    return construct_linear(3, {{1, 0}, {0, 1}, {1, 1}, {2, 1}});
}

/// |i, j, i+j, 2i+j, 3i+j> over Z_d (d prime >= 5).
inline MinimalSupportState construct_ame5_prime(int d) {
    return construct_linear(d, {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 1}});
}

namespace gf4 {
// Elements 0, 1, w = 2, w^2 = 3; addition is XOR.
inline int add(int a, int b) { return a ^ b; }
inline int mul(int a, int b) {
    static const int t[4][4] = {{0, 0, 0, 0}, {0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
    return t[a][b];
}
}  // namespace gf4

/// GF(4)-linear design: position j carries sum_t g[j][t] * i_t.
inline MinimalSupportState construct_gf4_linear(const std::vector<std::vector<int>> &g) {
    int n = (int)g.size(), k = (int)g.front().size();
    std::vector<MultiIndex> rows;
    for (uint64_t code = 0; code < ipow(4, k); code++) {
        MultiIndex free = decode(code, k, 4);
        MultiIndex r(n, 0);
        for (int j = 0; j < n; j++) {
            for (int t = 0; t < k; t++) r[j] = gf4::add(r[j], gf4::mul(g[j][t], free[t]));
        }
        rows.push_back(r);
    }
    return MinimalSupportState::create(n, 4, k, rows);
}

inline const int kAme44M1[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
inline const int kAme44M2[4][4] = {{0, 2, 3, 1}, {1, 3, 2, 0}, {2, 0, 1, 3}, {3, 1, 0, 2}};

/// |i, j, M1[i][j], M2[i][j]> from the GF(4) multiplication tables.
inline MinimalSupportState construct_ame44() {
    std::vector<MultiIndex> rows;
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) rows.push_back({i, j, kAme44M1[i][j], kAme44M2[i][j]});
    }
    return MinimalSupportState::create(4, 4, 2, rows);
}

/// AME(6,4) of minimal support from the hexacode [I | A].
inline MinimalSupportState construct_ame64() {
    return construct_gf4_linear({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}, {1, 2, 3}, {1, 3, 2}});
}

/// sum_{i,j,k} w^{(3i+j)k} |i, j, i+j, 2i+j+k, k>.
inline SparseState construct_ame5_phased(int d) {
    if (d < 2) {
        throw DomainError("construct_ame5_phased requires d >= 2");
    }
    SparseState s(5, d);
    for (int i = 0; i < d; i++) {
        for (int j = 0; j < d; j++) {
            for (int k = 0; k < d; k++) {
                s.add({i, j, (i + j) % d, (2 * i + j + k) % d, k},
                      ComplexAmp::from_phase(root_of_unity(d, (int64_t)(3 * i + j) * k)));
            }
        }
    }
    return s;
}

inline MinimalSupportState with_phases(const MinimalSupportState &s, const std::map<MultiIndex, Phase> &assignment) {
    std::vector<MultiIndex> rows = s.support();
    std::vector<Phase> phases = s.phases();
    for (const auto &[idx, ph] : assignment) {
        auto pos = s.find(idx);
        if (!pos) {
            throw DomainError("with_phases: index " + index_str(idx) + " is not in the support");
        }
        phases[*pos] = ph;
    }
    return MinimalSupportState::create(s.n(), s.d(), s.k(), rows, phases);
}

/// Level pairing (x, y) -> d_b * x + y.
inline SparseState tensor_compose(const SparseState &a, const SparseState &b) {
    if (a.n() != b.n()) {
        throw DomainError("tensor_compose: party counts differ");
    }
    int d = a.d() * b.d();
    SparseState r(a.n(), d);
    for (const auto &[ca, va] : a.terms()) {
        MultiIndex ia = decode(ca, a.n(), a.d());
        for (const auto &[cb, vb] : b.terms()) {
            MultiIndex ib = decode(cb, b.n(), b.d());
            MultiIndex ic(a.n());
            for (int j = 0; j < a.n(); j++) ic[j] = b.d() * ia[j] + ib[j];
            r.add(ic, va * vb);
        }
    }
    return r;
}

inline MinimalSupportState tensor_compose(const MinimalSupportState &a, const MinimalSupportState &b) {
    if (a.n() != b.n()) {
        throw DomainError("tensor_compose: party counts differ");
    }
    if (a.k() != b.k()) {
        throw DomainError("tensor_compose: minimal-support composition needs equal k");
    }
    std::vector<MultiIndex> rows;
    std::vector<Phase> phases;
    for (size_t x = 0; x < a.size(); x++) {
        for (size_t y = 0; y < b.size(); y++) {
            MultiIndex ic(a.n());
            for (int j = 0; j < a.n(); j++) ic[j] = b.d() * a.row(x)[j] + b.row(y)[j];
            rows.push_back(ic);
            phases.push_back(a.phase(x) * b.phase(y));
        }
    }
    return MinimalSupportState::create(a.n(), a.d() * b.d(), a.k(), rows, phases);
}

/// AME(4,9) as the composition of two AME(4,3) states.
inline MinimalSupportState construct_ame49() {
    return tensor_compose(construct_ame43(), construct_ame43());
}

}  // namespace ame

#endif  // AME_STATE_HPP
