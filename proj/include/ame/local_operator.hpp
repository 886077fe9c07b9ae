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


#ifndef AME_LOCAL_OPERATOR_HPP
#define AME_LOCAL_OPERATOR_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ame/butson.hpp"
#include "ame/common.hpp"
#include "ame/cyclotomic.hpp"
#include "ame/phase.hpp"
#include "ame/state.hpp"

namespace ame {

enum class SiteKind { Permutation, Diagonal, Monomial, Butson, General };

inline const char *site_kind_name(SiteKind k) {
    switch (k) {
        case SiteKind::Permutation: return "permutation";
        case SiteKind::Diagonal: return "diagonal";
        case SiteKind::Monomial: return "monomial";
        case SiteKind::Butson: return "butson";
        case SiteKind::General: return "general";
    }
    return "?";
}

/// One local factor: entries / sqrt(scale), row-major, entries[r*dim+c] = <r|M|c>.
/// Monomial kinds also keep (perm, phases) with M|a> = phases[a] |perm[a]>.
struct SiteMatrix {
    int dim = 0;
    SiteKind kind = SiteKind::General;
    int64_t scale = 1;
    std::vector<ComplexAmp> entries;
    std::vector<int> perm;
    std::vector<Phase> phases;

    const ComplexAmp &at(int r, int c) const { return entries[(size_t)r * dim + c]; }

    bool is_monomial() const {
        return kind == SiteKind::Permutation || kind == SiteKind::Diagonal || kind == SiteKind::Monomial;
    }

    static SiteMatrix monomial(std::vector<int> p, std::vector<Phase> ph) {
        SiteMatrix m;
        m.dim = (int)p.size();
        bool ident_perm = true, unit = true;
        for (int a = 0; a < m.dim; a++) {
            ident_perm &= p[a] == a;
            unit &= ph[a].is_one() && ph[a].is_exact();
        }
        m.kind = unit ? SiteKind::Permutation : ident_perm ? SiteKind::Diagonal : SiteKind::Monomial;
        m.entries.assign((size_t)m.dim * m.dim, ComplexAmp::integer(0));
        for (int a = 0; a < m.dim; a++) m.entries[(size_t)p[a] * m.dim + a] = ComplexAmp::from_phase(ph[a]);
        m.perm = std::move(p);
        m.phases = std::move(ph);
        return m;
    }
    static SiteMatrix permutation(std::vector<int> p) {
        std::vector<Phase> ph(p.size(), Phase::one());
        return monomial(std::move(p), std::move(ph));
    }
    static SiteMatrix diagonal(std::vector<Phase> ph) {
        std::vector<int> p(ph.size());
        std::iota(p.begin(), p.end(), 0);
        return monomial(std::move(p), std::move(ph));
    }
    static SiteMatrix identity(int d) {
        return diagonal(std::vector<Phase>(d, Phase::one()));
    }
    static SiteMatrix butson(const ButsonMatrix &b) {
        SiteMatrix m;
        m.dim = b.d;
        m.kind = SiteKind::Butson;
        m.scale = b.d;
        for (const auto &p : b.e) m.entries.push_back(ComplexAmp::from_phase(p));
        return m;
    }
    /// Dense matrix with explicit scale; kind is inferred from the nonzero pattern.
    static SiteMatrix dense(int dim, std::vector<ComplexAmp> entries, int64_t scale, SiteKind kind) {
        SiteMatrix m;
        m.dim = dim;
        m.entries = std::move(entries);
        m.scale = scale;
        m.kind = kind;
        return m;
    }

    /// this * o (apply o first).
    SiteMatrix operator*(const SiteMatrix &o) const {
        if (dim != o.dim) throw DomainError("site matrix dimensions differ");
        if (is_monomial() && o.is_monomial()) {
            std::vector<int> p(dim);
            std::vector<Phase> ph(dim);
            for (int a = 0; a < dim; a++) {
                p[a] = perm[o.perm[a]];
                ph[a] = phases[o.perm[a]] * o.phases[a];
            }
            return monomial(p, ph);
        }
        SiteMatrix m;
        m.dim = dim;
        m.scale = checked_mul(scale, o.scale);
        m.kind = (kind == SiteKind::General || o.kind == SiteKind::General) ? SiteKind::General : SiteKind::Butson;
        m.entries.assign((size_t)dim * dim, ComplexAmp::integer(0));
        for (int r = 0; r < dim; r++) {
            for (int c = 0; c < dim; c++) {
                ComplexAmp s = ComplexAmp::integer(0);
                for (int z = 0; z < dim; z++) {
                    const auto &x = at(r, z);
                    const auto &y = o.at(z, c);
                    if (x.is_zero()) continue;
                    s += x * y;
                }
                m.entries[(size_t)r * dim + c] = s;
            }
        }
        return m;
    }

    /// Exact when entries are exact: E E^dagger == scale * Id.
    bool is_unitary() const {
        for (int r = 0; r < dim; r++) {
            for (int c = 0; c < dim; c++) {
                ComplexAmp s = ComplexAmp::integer(0);
                for (int z = 0; z < dim; z++) s += at(r, z) * at(c, z).conj();
                ComplexAmp target = ComplexAmp::integer(r == c ? scale : 0);
                if (!(s == target)) {
                    if (s.is_exact() && target.is_exact()) return false;
                    if (std::abs(s.value() - target.value()) > 1e-9 * (double)scale) return false;
                }
            }
        }
        return true;
    }

    struct Structure {
        bool ok = false;
        int s = 0;  // nonzeros per row and column
    };
    /// Constant nonzero count s per row and column, all nonzero moduli 1/sqrt(s).
    Structure block_structure() const {
        Structure st;
        std::vector<int> rows(dim, 0), cols(dim, 0);
        for (int r = 0; r < dim; r++) {
            for (int c = 0; c < dim; c++) {
                if (!at(r, c).is_zero()) {
                    rows[r]++;
                    cols[c]++;
                }
            }
        }
        int s = rows[0];
        for (int i = 0; i < dim; i++) {
            if (rows[i] != s || cols[i] != s) return st;
        }
        for (int r = 0; r < dim; r++) {
            for (int c = 0; c < dim; c++) {
                const auto &v = at(r, c);
                if (v.is_zero()) continue;
                // |v|^2 / scale == 1/s  <=>  |v|^2 * s == scale.
                ComplexAmp m2 = v * v.conj() * ComplexAmp::integer(s);
                ComplexAmp target = ComplexAmp::integer(scale);
                if (m2.is_exact()) {
                    if (!(m2 == target)) return st;
                } else if (std::abs(m2.value() - (double)scale) > 1e-9 * (double)scale) {
                    return st;
                }
            }
        }
        st.ok = true;
        st.s = s;
        return st;
    }

    std::vector<std::vector<std::complex<double>>> to_complex() const {
        std::vector<std::vector<std::complex<double>>> m(dim, std::vector<std::complex<double>>(dim));
        double f = 1.0 / std::sqrt((double)scale);
        for (int r = 0; r < dim; r++) {
            for (int c = 0; c < dim; c++) m[r][c] = at(r, c).value() * f;
        }
        return m;
    }
};

/// a (x) b on the composed site, a's index major: |x, y> -> code x * b.dim + y.
inline SiteMatrix kron(const SiteMatrix &a, const SiteMatrix &b) {
    int n = a.dim * b.dim;
    if (a.is_monomial() && b.is_monomial()) {
        std::vector<int> p(n);
        std::vector<Phase> ph(n);
        for (int x = 0; x < a.dim; x++) {
            for (int y = 0; y < b.dim; y++) {
                p[x * b.dim + y] = a.perm[x] * b.dim + b.perm[y];
                ph[x * b.dim + y] = a.phases[x] * b.phases[y];
            }
        }
        return SiteMatrix::monomial(std::move(p), std::move(ph));
    }
    std::vector<ComplexAmp> e((size_t)n * n, ComplexAmp::integer(0));
    for (int r = 0; r < n; r++) {
        for (int c = 0; c < n; c++) {
            const auto &u = a.at(r / b.dim, c / b.dim);
            if (u.is_zero()) continue;
            e[(size_t)r * n + c] = u * b.at(r % b.dim, c % b.dim);
        }
    }
    SiteKind kind = (a.kind == SiteKind::Butson && b.kind == SiteKind::Butson) ? SiteKind::Butson : SiteKind::General;
    return SiteMatrix::dense(n, std::move(e), checked_mul(a.scale, b.scale), kind);
}

/// omega * (M_1 x ... x M_n).
struct LocalOperator {
    std::vector<SiteMatrix> sites;
    Phase global;

    static LocalOperator identity(int n, int d) {
        LocalOperator op;
        op.sites.assign(n, SiteMatrix::identity(d));
        return op;
    }
    static LocalOperator uniform(int n, const SiteMatrix &m) {
        LocalOperator op;
        op.sites.assign(n, m);
        return op;
    }

    bool all_monomial() const {
        return std::all_of(sites.begin(), sites.end(), [](const SiteMatrix &m) { return m.is_monomial(); });
    }

    /// this after o.
    LocalOperator compose(const LocalOperator &o) const {
        if (sites.size() != o.sites.size()) throw DomainError("operator site counts differ");
        LocalOperator r;
        r.global = global * o.global;
        for (size_t i = 0; i < sites.size(); i++) r.sites.push_back(sites[i] * o.sites[i]);
        return r;
    }

    SparseState apply(const SparseState &s) const {
        if ((int)sites.size() != s.n()) throw DomainError("operator site count differs from party count");
        SparseState cur = s;
        for (int j = 0; j < s.n(); j++) {
            const SiteMatrix &m = sites[j];
            if (m.dim != s.d()) throw DomainError("site dimension differs from local dimension");
            std::vector<std::vector<std::pair<int, ComplexAmp>>> col(m.dim);
            for (int c = 0; c < m.dim; c++) {
                for (int r = 0; r < m.dim; r++) {
                    if (!m.at(r, c).is_zero()) col[c].push_back({r, m.at(r, c)});
                }
            }
            uint64_t stride = ipow(s.d(), s.n() - 1 - j);
            SparseState next(s.n(), s.d());
            for (const auto &[code, amp] : cur.terms()) {
                int a = (int)((code / stride) % (uint64_t)s.d());
                uint64_t base = code - (uint64_t)a * stride;
                for (const auto &[r, v] : col[a]) next.add_code(base + (uint64_t)r * stride, v * amp);
            }
            next.drop_zeros();
            cur = std::move(next);
        }
        if (!global.is_one()) {
            SparseState g(s.n(), s.d());
            ComplexAmp w = ComplexAmp::from_phase(global);
            for (const auto &[code, amp] : cur.terms()) g.add_code(code, w * amp);
            cur = std::move(g);
        }
        return cur;
    }

    /// Fast path for local monomials; support maps to support.
    MinimalSupportState apply(const MinimalSupportState &s) const {
        if (!all_monomial()) throw DomainError("minimal-support application needs monomial sites");
        std::vector<MultiIndex> rows;
        std::vector<Phase> phases;
        for (size_t t = 0; t < s.size(); t++) {
            MultiIndex r(s.n());
            Phase p = s.phase(t) * global;
            for (int j = 0; j < s.n(); j++) {
                int a = s.row(t)[j];
                r[j] = sites[j].perm[a];
                p *= sites[j].phases[a];
            }
            rows.push_back(r);
            phases.push_back(p);
        }
        return MinimalSupportState::create(s.n(), s.d(), s.k(), rows, phases);
    }
};

/// Sites proportional pairwise (the product of factors then is a global phase).
inline bool operators_equal_up_to_phase(const LocalOperator &a, const LocalOperator &b) {
    if (a.sites.size() != b.sites.size()) return false;
    for (size_t i = 0; i < a.sites.size(); i++) {
        const auto &x = a.sites[i], &y = b.sites[i];
        if (x.dim != y.dim) return false;
        int ref = -1;
        for (int t = 0; t < x.dim * x.dim; t++) {
            if (!x.entries[t].is_zero()) {
                ref = t;
                break;
            }
        }
        if (ref < 0) return false;
        if (y.entries[ref].is_zero()) return false;
        // x_t * y_ref == x_ref * y_t for all t, and equal moduli after scaling.
        for (int t = 0; t < x.dim * x.dim; t++) {
            ComplexAmp l = x.entries[t] * y.entries[ref], r = x.entries[ref] * y.entries[t];
            if (!(l == r)) {
                if (l.is_exact() && r.is_exact()) return false;
                if (std::abs(l.value() - r.value()) > 1e-9) return false;
            }
        }
        double mx = std::norm(x.entries[ref].value()) / (double)x.scale;
        double my = std::norm(y.entries[ref].value()) / (double)y.scale;
        if (std::fabs(mx - my) > 1e-9) return false;
    }
    return true;
}

}  // namespace ame

#endif  // AME_LOCAL_OPERATOR_HPP
