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


#ifndef AME_DESIGN_HPP
#define AME_DESIGN_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ame/common.hpp"
#include "ame/state.hpp"

namespace ame {

/// r x N table over [d] where every k columns contain each k-tuple lambda times.
struct OrthogonalArray {
    int n = 0;  // columns
    int d = 0;
    int k = 0;
    std::vector<MultiIndex> rows;

    int64_t index() const {
        return (int64_t)rows.size() / (int64_t)ipow(d, k);
    }
    /// Lexicographic row order; used before serialization.
    void canonicalize() {
        std::sort(rows.begin(), rows.end());
    }
};

struct OaCheck {
    bool is_oa = false;
    std::optional<int64_t> index;
};

/// Verifies strength k; alphabet is inferred as max symbol + 1 when d <= 0.
inline OaCheck check_oa(const std::vector<MultiIndex> &rows, int k, int d = 0) {
    if (rows.empty()) {
        return {};
    }
    size_t n = rows.front().size();
    int maxsym = 0;
    for (const auto &r : rows) {
        if (r.size() != n) {
            throw FormatError(FormatError::Code::Ragged, "check_oa: ragged rows");
        }
        for (int s : r) {
            if (s < 0 || (d > 0 && s >= d)) {
                throw FormatError(FormatError::Code::SymbolRange, "check_oa: symbol out of range");
            }
            maxsym = std::max(maxsym, s);
        }
    }
    if (d <= 0) d = maxsym + 1;
    if (k < 0 || k > (int)n) return {};
    uint64_t dk = ipow(d, k);
    if (rows.size() % dk != 0) return {};
    int64_t lambda = (int64_t)(rows.size() / dk);
    std::vector<int64_t> count(dk);
    for (const auto &cols : subsets((int)n, k)) {
        std::fill(count.begin(), count.end(), 0);
        for (const auto &r : rows) count[encode(project(r, cols), d)]++;
        for (auto c : count) {
            if (c != lambda) return {};
        }
    }
    return {true, lambda};
}

inline MinimalSupportState oa_to_state(const OrthogonalArray &oa, const std::vector<Phase> &phases = {}) {
    auto chk = check_oa(oa.rows, oa.k, oa.d);
    if (!chk.is_oa) {
        throw DomainError("oa_to_state: table is not an orthogonal array of the declared strength");
    }
    if (*chk.index != 1) {
        throw DomainError("oa_to_state: index must be one, got " + std::to_string(*chk.index));
    }
    return MinimalSupportState::create(oa.n, oa.d, oa.k, oa.rows, phases);
}

inline OrthogonalArray state_to_oa(const MinimalSupportState &s) {
    OrthogonalArray oa;
    oa.n = s.n();
    oa.d = s.d();
    oa.k = s.k();
    oa.rows = s.support();
    oa.canonicalize();
    return oa;
}

/// Map [d]^k -> [d]^k stored as a full table indexed by the input code.
struct LatinHypercube {
    int k = 0;
    int d = 0;
    std::vector<MultiIndex> table;

    const MultiIndex &at(const MultiIndex &in) const {
        return table[encode(in, d)];
    }
    bool operator==(const LatinHypercube &o) const {
        return k == o.k && d == o.d && table == o.table;
    }
};

struct MolhCheck {
    bool ok = false;
    std::string diagnostic;
};

/// Every restriction fixing k-s input axes, read on any s output coordinates,
/// must be a bijection [d]^s -> [d]^s (s = 1..k).
inline MolhCheck check_molh(const LatinHypercube &L) {
    int k = L.k, d = L.d;
    uint64_t total = ipow(d, k);
    if (L.table.size() != total) {
        return {false, "table is not total"};
    }
    for (const auto &out : L.table) {
        if ((int)out.size() != k) return {false, "output arity differs from k"};
        for (int s : out) {
            if (s < 0 || s >= d) return {false, "output symbol out of range"};
        }
    }
    for (int s = 1; s <= k; s++) {
        for (const auto &free_axes : subsets(k, s)) {
            std::vector<int> fixed_axes;
            for (int a = 0; a < k; a++) {
                if (!std::binary_search(free_axes.begin(), free_axes.end(), a)) fixed_axes.push_back(a);
            }
            for (uint64_t fv = 0; fv < ipow(d, k - s); fv++) {
                MultiIndex fixed = decode(fv, k - s, d);
                for (const auto &outs : subsets(k, s)) {
                    std::vector<char> seen(ipow(d, s), 0);
                    for (uint64_t v = 0; v < ipow(d, s); v++) {
                        MultiIndex in(k), var = decode(v, s, d);
                        for (int t = 0; t < k - s; t++) in[fixed_axes[t]] = fixed[t];
                        for (int t = 0; t < s; t++) in[free_axes[t]] = var[t];
                        uint64_t c = encode(project(L.at(in), outs), d);
                        if (seen[c]) {
                            std::string msg = "restriction to free axes {" + index_str(free_axes) +
                                              "} with fixed values (" + index_str(fixed) +
                                              ") is not bijective on outputs {" + index_str(outs) + "}";
                            return {false, msg};
                        }
                        seen[c] = 1;
                    }
                }
            }
        }
    }
    return {true, ""};
}

inline LatinHypercube state_to_molh(const MinimalSupportState &s) {
    if (s.n() != 2 * s.k()) {
        throw DomainError("state_to_molh requires N = 2k");
    }
    LatinHypercube L;
    L.k = s.k();
    L.d = s.d();
    L.table.assign(ipow(s.d(), s.k()), {});
    for (const auto &r : s.support()) {
        MultiIndex in(r.begin(), r.begin() + s.k()), out(r.begin() + s.k(), r.end());
        L.table[encode(in, s.d())] = out;
    }
    return L;
}

inline MinimalSupportState molh_to_state(const LatinHypercube &L) {
    std::vector<MultiIndex> rows;
    for (uint64_t c = 0; c < L.table.size(); c++) {
        MultiIndex r = decode(c, L.k, L.d);
        r.insert(r.end(), L.table[c].begin(), L.table[c].end());
        rows.push_back(r);
    }
    return MinimalSupportState::create(2 * L.k, L.d, L.k, rows);
}

/// Necessary condition for a k-MOLH of size d.
inline bool molh_existence_bound(int k, int d) {
    return k <= d - 1;
}

using BigInt = boost::multiprecision::cpp_int;

inline BigInt big_pow(int64_t b, int e) {
    BigInt r = 1;
    for (int i = 0; i < e; i++) r *= b;
    return r;
}

/// s <= d / (1 + k^{1/(k-1)}), evaluated exactly as k s^{k-1} <= (d-s)^{k-1}.
inline bool extension_bound(int s, int d, int k) {
    if (k <= 1 || s <= 0 || s >= d) {
        throw DomainError("extension_bound requires k > 1 and 0 < s < d");
    }
    return BigInt(k) * big_pow(s, k - 1) <= big_pow(d - s, k - 1);
}

/// d < (k+1)(1 + k^{1/(k-1)}) for k > 1, d < 3 for k = 1 (strict; thresholds 3/9/11/13).
inline bool small_regime(int k, int d) {
    if (k < 1) {
        throw DomainError("small_regime requires k >= 1");
    }
    if (k == 1) {
        return d < 3;
    }
    // d - (k+1) < (k+1) k^{1/(k-1)}  <=>  (d-k-1)^{k-1} < (k+1)^{k-1} k  when d-k-1 >= 0.
    int64_t x = (int64_t)d - k - 1;
    if (x < 0) return true;
    return big_pow(x, k - 1) < big_pow(k + 1, k - 1) * k;
}

struct SubMolh {
    std::vector<std::vector<int>> inputs;   // S_1..S_k
    std::vector<std::vector<int>> outputs;  // S'_1..S'_k
};

struct SubMolhResult {
    std::vector<SubMolh> blocks;
    bool truncated = false;
    uint64_t examined = 0;
};

/// Axis-aligned blocks S_1 x ... x S_k (|S_i| = s) mapped onto a block.
inline SubMolhResult find_sub_molh(const LatinHypercube &L, int s, uint64_t budget = 10000000) {
    if (s < 1 || s > L.d) {
        throw DomainError("find_sub_molh requires 1 <= s <= d");
    }
    auto choices = subsets(L.d, s);
    uint64_t per = choices.size();
    uint64_t total = 1;
    bool overflow = false;
    for (int i = 0; i < L.k; i++) {
        if (total > UINT64_MAX / per) {
            overflow = true;
            break;
        }
        total *= per;
    }
    SubMolhResult res;
    uint64_t limit = total;
    if (overflow || total > budget) {
        res.truncated = true;
        limit = budget;
    }
    // Blocks are examined in mixed-radix order; chunks are evaluated in
    // parallel and merged in order.
    std::vector<std::optional<SubMolh>> found(limit);
    parallel_for(limit, [&](size_t code) {
        std::vector<std::vector<int>> in(L.k);
        uint64_t c = code;
        for (int i = L.k - 1; i >= 0; i--) {
            in[i] = choices[c % per];
            c /= per;
        }
        std::vector<std::vector<char>> hit(L.k, std::vector<char>(L.d, 0));
        std::vector<int> distinct(L.k, 0);
        uint64_t cells = ipow(s, L.k);
        for (uint64_t v = 0; v < cells; v++) {
            MultiIndex pos = decode(v, L.k, s), x(L.k);
            for (int i = 0; i < L.k; i++) x[i] = in[i][pos[i]];
            const auto &y = L.at(x);
            for (int i = 0; i < L.k; i++) {
                if (!hit[i][y[i]]) {
                    hit[i][y[i]] = 1;
                    if (++distinct[i] > s) return;
                }
            }
        }
        SubMolh b;
        b.inputs = in;
        for (int i = 0; i < L.k; i++) {
            std::vector<int> o;
            for (int a = 0; a < L.d; a++) {
                if (hit[i][a]) o.push_back(a);
            }
            b.outputs.push_back(o);
        }
        found[code] = b;
    });
    for (auto &f : found) {
        if (f) res.blocks.push_back(*f);
    }
    res.examined = limit;
    return res;
}

/// Level pairing (x, y) -> d_b * x + y with a on the outer level.
inline LatinHypercube tensor_molh(const LatinHypercube &a, const LatinHypercube &b) {
    if (a.k != b.k) {
        throw DomainError("tensor_molh: dimensions differ");
    }
    LatinHypercube r;
    r.k = a.k;
    r.d = a.d * b.d;
    r.table.assign(ipow(r.d, r.k), {});
    for (uint64_t c = 0; c < r.table.size(); c++) {
        MultiIndex in = decode(c, r.k, r.d), ia(r.k), ib(r.k);
        for (int i = 0; i < r.k; i++) {
            ia[i] = in[i] / b.d;
            ib[i] = in[i] % b.d;
        }
        const auto &oa = a.at(ia), &ob = b.at(ib);
        MultiIndex out(r.k);
        for (int i = 0; i < r.k; i++) out[i] = b.d * oa[i] + ob[i];
        r.table[c] = out;
    }
    return r;
}

struct MolhSearchResult {
    std::optional<LatinHypercube> found;
    bool complete = false;
    uint64_t nodes = 0;
};

/// Exhaustive backtracking for a k-MOLH of size d, cells filled in code order.
/// Output symbols are normalised per coordinate (first cell maps to 0...0, and
/// along the first axis values appear in increasing order of first use), which
/// is a relabelling symmetry of the definition.
inline MolhSearchResult search_molh(int k, int d, uint64_t max_nodes = 100000000) {
    uint64_t cells = ipow(d, k);
    // Constraint families: (free axes F, output subset O); for a cell x the key
    // is (family, fixed values of x outside F) and the used set holds O-projections.
    struct Family {
        std::vector<int> free_axes, fixed_axes, outs;
    };
    std::vector<Family> fams;
    for (int s = 1; s <= k; s++) {
        for (const auto &fr : subsets(k, s)) {
            std::vector<int> fx;
            for (int a = 0; a < k; a++) {
                if (!std::binary_search(fr.begin(), fr.end(), a)) fx.push_back(a);
            }
            for (const auto &o : subsets(k, s)) fams.push_back({fr, fx, o});
        }
    }
    // used[f][fixed code][projection code]
    std::vector<std::vector<std::vector<char>>> used(fams.size());
    for (size_t f = 0; f < fams.size(); f++) {
        int s = (int)fams[f].free_axes.size();
        used[f].assign(ipow(d, k - s), std::vector<char>(ipow(d, s), 0));
    }
    std::vector<MultiIndex> inputs(cells);
    for (uint64_t c = 0; c < cells; c++) inputs[c] = decode(c, k, d);
    std::vector<MultiIndex> outputs(ipow(d, k));
    for (uint64_t c = 0; c < outputs.size(); c++) outputs[c] = decode(c, k, d);

    LatinHypercube L;
    L.k = k;
    L.d = d;
    L.table.assign(cells, {});
    MolhSearchResult res;
    // Per output coordinate, the largest symbol used so far (symmetry breaking).
    std::vector<int> max_used(k, -1);

    std::function<bool(uint64_t)> rec = [&](uint64_t c) -> bool {
        if (c == cells) return true;
        if (res.nodes >= max_nodes) return false;
        const MultiIndex &x = inputs[c];
        for (uint64_t oc = 0; oc < outputs.size(); oc++) {
            const MultiIndex &y = outputs[oc];
            bool sym_ok = true;
            for (int i = 0; i < k; i++) {
                if (y[i] > max_used[i] + 1) sym_ok = false;
            }
            if (!sym_ok) continue;
            res.nodes++;
            bool ok = true;
            size_t f = 0;
            std::vector<std::pair<size_t, std::pair<uint64_t, uint64_t>>> marks;
            for (; f < fams.size() && ok; f++) {
                uint64_t key = encode(project(x, fams[f].fixed_axes), d);
                uint64_t val = encode(project(y, fams[f].outs), d);
                char &u = used[f][key][val];
                if (u) {
                    ok = false;
                } else {
                    u = 1;
                    marks.push_back({f, {key, val}});
                }
            }
            if (ok) {
                std::vector<int> saved = max_used;
                for (int i = 0; i < k; i++) max_used[i] = std::max(max_used[i], y[i]);
                L.table[c] = y;
                if (rec(c + 1)) return true;
                max_used = saved;
            }
            for (auto &[ff, kv] : marks) used[ff][kv.first][kv.second] = 0;
            if (res.nodes >= max_nodes) return false;
        }
        return false;
    };
    bool found = rec(0);
    if (found) {
        res.found = L;
        res.complete = true;
    } else {
        res.complete = res.nodes < max_nodes;
    }
    return res;
}

}  // namespace ame

#endif  // AME_DESIGN_HPP
