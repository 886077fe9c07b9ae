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


#ifndef AME_EQUIVALENCE_HPP
#define AME_EQUIVALENCE_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ame/butson.hpp"
#include "ame/common.hpp"
#include "ame/design.hpp"
#include "ame/linear_mod1.hpp"
#include "ame/local_operator.hpp"
#include "ame/phase.hpp"
#include "ame/state.hpp"

namespace ame {

enum class Verdict { Equivalent, Inequivalent, Inconclusive };
enum class Reason { None, SearchExhausted, NecessaryConditionViolated };

inline const char *verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Equivalent: return "Equivalent";
        case Verdict::Inequivalent: return "Inequivalent";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}
inline const char *reason_name(Reason r) {
    switch (r) {
        case Reason::None: return "None";
        case Reason::SearchExhausted: return "SearchExhausted";
        case Reason::NecessaryConditionViolated: return "NecessaryConditionViolated";
    }
    return "?";
}

struct SearchStats {
    uint64_t nodes = 0;              // symbol assignments tried
    uint64_t leaves = 0;             // complete symbol maps
    uint64_t support_conflicts = 0;  // partial maps leaving dst's support
    uint64_t w_pruned = 0;           // maps rejected by the W-ratio condition
    uint64_t solved = 0;             // phase systems handed to the solver
    uint64_t solve_failures = 0;
    uint64_t butson_keys = 0;
    uint64_t butson_matches = 0;
    bool complete = true;

    void merge(const SearchStats &o) {
        nodes += o.nodes;
        leaves += o.leaves;
        support_conflicts += o.support_conflicts;
        w_pruned += o.w_pruned;
        solved += o.solved;
        solve_failures += o.solve_failures;
        butson_keys += o.butson_keys;
        butson_matches += o.butson_matches;
        complete = complete && o.complete;
    }
};

/// Location of a failed W-ratio identity: site i, subset S, symbol l, index I on S.
struct ConditionViolation {
    int site = -1;
    std::vector<int> subset;
    int symbol = -1;
    MultiIndex index;
    std::string what;

    std::string str() const {
        std::ostringstream ss;
        ss << what << " at i=" << site << " S={";
        for (size_t q = 0; q < subset.size(); q++) ss << (q ? "," : "") << subset[q];
        ss << "} l=" << symbol << " I=" << index_str(index);
        return ss.str();
    }
};

struct EquivalenceCertificate {
    Verdict verdict = Verdict::Inconclusive;
    Reason reason = Reason::None;
    std::optional<LocalOperator> witness;
    bool exact = true;
    std::string branch;
    std::string detail;
    std::optional<ConditionViolation> violation;
    SearchStats stats;
};

enum class SearchBranch { Auto, LmOnly, ButsonOnly };

struct MatchOptions {
    uint64_t max_nodes = 200000000;
    bool prune = true;
    SearchBranch branch = SearchBranch::Auto;
};

// ---------------------------------------------------------------------------
// W-statistics

struct WStatistic {
    std::vector<int> positions;
    std::vector<int> symbols;
    Phase value;
};

/// Product of the phases of all support rows carrying `symbols` at `positions`.
inline Phase compute_w(const MinimalSupportState &s, const std::vector<int> &positions, const std::vector<int> &symbols) {
    if (positions.size() != symbols.size()) throw DomainError("compute_w: positions and symbols differ in length");
    if ((int)positions.size() > s.k()) throw DomainError("compute_w: more fixed positions than the strength k");
    std::vector<int> sorted = positions;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw DomainError("compute_w: repeated position");
    for (size_t q = 0; q < positions.size(); q++) {
        if (positions[q] < 0 || positions[q] >= s.n()) throw DomainError("compute_w: position out of range");
        if (symbols[q] < 0 || symbols[q] >= s.d()) throw DomainError("compute_w: symbol out of range");
    }
    Phase w;
    for (size_t t = 0; t < s.size(); t++) {
        bool match = true;
        for (size_t q = 0; q < positions.size() && match; q++) match = s.row(t)[positions[q]] == symbols[q];
        if (match) w *= s.phase(t);
    }
    return w;
}

inline WStatistic w_statistic(const MinimalSupportState &s, std::vector<int> positions, std::vector<int> symbols) {
    Phase v = compute_w(s, positions, symbols);
    return {std::move(positions), std::move(symbols), v};
}

/// Symbol maps per site, src symbol -> dst symbol.
using SymbolMaps = std::vector<std::vector<int>>;

namespace detail {

/// W^{i,S}_{l,I} for all l and all I on S, |S| = k-2; v[l * d^|S| + code(I)].
struct WTable {
    int site = 0;
    std::vector<int> subset;
    int width = 1;  // d^|S|
    std::vector<Phase> v;

    const Phase &at(int l, int code) const { return v[(size_t)l * width + code]; }
};

inline std::vector<WTable> w_tables(const MinimalSupportState &s) {
    int n = s.n(), d = s.d(), k = s.k();
    std::vector<WTable> out;
    if (k < 2) return out;
    for (int i = 0; i < n; i++) {
        std::vector<int> rest;
        for (int j = 0; j < n; j++) {
            if (j != i) rest.push_back(j);
        }
        for (const auto &pick : subsets(n - 1, k - 2)) {
            WTable t;
            t.site = i;
            for (int q : pick) t.subset.push_back(rest[q]);
            t.width = (int)ipow(d, k - 2);
            t.v.assign((size_t)d * t.width, Phase::one());
            for (size_t r = 0; r < s.size(); r++) {
                const auto &row = s.row(r);
                int code = 0;
                for (int x : t.subset) code = code * d + row[x];
                t.v[(size_t)row[i] * t.width + code] *= s.phase(r);
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

inline int mapped_code(const WTable &t, int code, const SymbolMaps &sigma, int d) {
    int out = 0, mul = 1;
    for (int q = (int)t.subset.size() - 1; q >= 0; q--) {
        int a = code % d;
        code /= d;
        out += sigma[t.subset[q]][a] * mul;
        mul *= d;
    }
    return out;
}

inline MultiIndex decode_small(int code, int len, int d) {
    MultiIndex r(len);
    for (int q = len - 1; q >= 0; q--) {
        r[q] = code % d;
        code /= d;
    }
    return r;
}

/// R(l,I) = W'(sigma l, sigma I) / W(l,I) must factor as f(l) g(I):
/// R(l,I) R(0,0) == R(l,0) R(0,I).
inline std::optional<ConditionViolation> product_form_violation(const WTable &a, const WTable &b,
                                                                const SymbolMaps &sigma, int d) {
    auto ratio = [&](int l, int code) {
        return b.at(sigma[a.site][l], mapped_code(a, code, sigma, d)) / a.at(l, code);
    };
    Phase r00 = ratio(0, 0);
    std::vector<Phase> r0(a.width);
    for (int c = 0; c < a.width; c++) r0[c] = ratio(0, c);
    for (int l = 1; l < d; l++) {
        Phase rl0 = ratio(l, 0);
        for (int c = 1; c < a.width; c++) {
            if (ratio(l, c) * r00 != rl0 * r0[c]) {
                return ConditionViolation{a.site, a.subset, l, decode_small(c, (int)a.subset.size(), d),
                                          "W-ratio table not of product form"};
            }
        }
    }
    return std::nullopt;
}

/// Same identity inside one state: W(l,I) W(0,0) == W(l,0) W(0,I).
inline std::optional<ConditionViolation> within_state_violation(const WTable &a, int d) {
    for (int l = 1; l < d; l++) {
        for (int c = 1; c < a.width; c++) {
            if (a.at(l, c) * a.at(0, 0) != a.at(l, 0) * a.at(0, c)) {
                return ConditionViolation{a.site, a.subset, l, decode_small(c, (int)a.subset.size(), d),
                                          "W table not of product form"};
            }
        }
    }
    return std::nullopt;
}

inline void require_same_shape(const MinimalSupportState &a, const MinimalSupportState &b) {
    if (a.n() != b.n() || a.d() != b.d() || a.k() != b.k()) {
        throw DomainError("states differ in (n, d, k)");
    }
}

}  // namespace detail

/// The W-ratio identities for a complete symbol map (k > 2). Holds for every
/// symbol map underlying an LM equivalence src -> dst.
struct ConditionResult {
    bool holds = true;
    std::optional<ConditionViolation> violation;
};

inline ConditionResult necessary_condition(const MinimalSupportState &src, const MinimalSupportState &dst,
                                           const SymbolMaps &sigma) {
    detail::require_same_shape(src, dst);
    if (src.k() <= 2) throw DomainError("necessary_condition: requires k > 2");
    auto ta = detail::w_tables(src), tb = detail::w_tables(dst);
    for (size_t t = 0; t < ta.size(); t++) {
        if (auto v = detail::product_form_violation(ta[t], tb[t], sigma, src.d())) return {false, v};
    }
    return {};
}

/// Butson-form prerequisite: every W table of s is of product form.
inline ConditionResult within_state_condition(const MinimalSupportState &s) {
    for (const auto &t : detail::w_tables(s)) {
        if (t.subset.empty()) continue;
        if (auto v = detail::within_state_violation(t, s.d())) return {false, v};
    }
    return {};
}

/// The two-term identity
///   W'^{i,S}_{l,I} / W^{i,S}_{sigma l, sigma I} == W'^{i,S}_{l,I2} / W^{i,S}_{sigma l, sigma I2}
/// for a single (i, S, l, I, I2).
inline bool two_term_condition(const MinimalSupportState &src, const MinimalSupportState &dst,
                               const SymbolMaps &sigma, int i, const std::vector<int> &S, int l,
                               const MultiIndex &I, const MultiIndex &I2) {
    detail::require_same_shape(src, dst);
    auto mapped = [&](const MultiIndex &x) {
        MultiIndex y(x.size());
        for (size_t q = 0; q < x.size(); q++) y[q] = sigma[S[q]][x[q]];
        return y;
    };
    std::vector<int> pos = {i};
    pos.insert(pos.end(), S.begin(), S.end());
    auto sym = [&](int a, const MultiIndex &x) {
        std::vector<int> v = {a};
        v.insert(v.end(), x.begin(), x.end());
        return v;
    };
    Phase r1 = compute_w(dst, pos, sym(l, I)) / compute_w(src, pos, sym(sigma[i][l], mapped(I)));
    Phase r2 = compute_w(dst, pos, sym(l, I2)) / compute_w(src, pos, sym(sigma[i][l], mapped(I2)));
    return r1 == r2;
}

// ---------------------------------------------------------------------------
// LM search

namespace detail {

struct LmResult {
    std::vector<LocalOperator> witnesses;
    std::vector<SymbolMaps> maps;
    SearchStats stats;
    bool aborted = false;
    std::optional<ConditionViolation> violation;
    bool exact = true;
};

class LmSearch {
  public:
    LmSearch(const MinimalSupportState &src, const MinimalSupportState &dst, const MatchOptions &opt, bool all)
        : src_(src), dst_(dst), opt_(opt), all_(all), n_(src.n()), d_(src.d()), k_(src.k()) {
        require_same_shape(src, dst);
        exact_ = src.all_exact() && dst.all_exact();
        dst_prefix_.assign(ipow(d_, k_), -1);
        for (size_t t = 0; t < dst.size(); t++) dst_prefix_[prefix_code(dst.row(t))] = (int)t;
        by_last_.assign(d_, {});
        for (size_t t = 0; t < src.size(); t++) by_last_[src.row(t)[k_ - 1]].push_back((int)t);
        if (opt.prune && k_ > 2) {
            ta_ = w_tables(src);
            tb_ = w_tables(dst);
            at_site_.assign(k_, {});
            for (size_t t = 0; t < ta_.size(); t++) {
                int hi = ta_[t].site;
                for (int x : ta_[t].subset) hi = std::max(hi, x);
                if (hi < k_ - 1) {
                    at_site_[hi].push_back((int)t);
                } else {
                    at_leaf_.push_back((int)t);
                }
            }
        }
        ModOneSolver::Matrix a(src.size(), std::vector<int64_t>((size_t)n_ * d_, 0));
        for (size_t t = 0; t < src.size(); t++) {
            for (int j = 0; j < n_; j++) a[t][(size_t)j * d_ + src.row(t)[j]] = 1;
        }
        solver_.emplace(std::move(a));
    }

    LmResult run() {
        std::vector<std::vector<int>> tops;
        if (k_ >= 2) {
            std::vector<int> p(d_);
            std::iota(p.begin(), p.end(), 0);
            do tops.push_back(p);
            while (std::next_permutation(p.begin(), p.end()));
        } else {
            tops.push_back({});
        }
        std::vector<Worker> workers(tops.size());
        parallel_for(tops.size(), [&](size_t idx) {
            Worker &w = workers[idx];
            w.index = idx;
            if (stop_before(idx)) {
                w.skipped = true;
                return;
            }
            w.sigma.assign(n_, std::vector<int>(d_, -1));
            w.inv.assign(n_, std::vector<int>(d_, -1));
            if (k_ >= 2) {
                for (int a = 0; a < d_; a++) {
                    w.sigma[0][a] = tops[idx][a];
                    w.inv[0][tops[idx][a]] = a;
                }
                w.stats.nodes++;
                dfs(w, 1, 0);
            } else {
                dfs(w, 0, 0);
            }
            flush(w);
        });
        LmResult r;
        r.exact = exact_;
        r.aborted = aborted_.load();
        for (auto &w : workers) {
            r.stats.merge(w.stats);
            if (!r.violation && w.violation) r.violation = w.violation;
            for (size_t q = 0; q < w.found.size(); q++) {
                if (!all_ && !r.witnesses.empty()) break;
                r.witnesses.push_back(std::move(w.found[q]));
                r.maps.push_back(std::move(w.found_maps[q]));
            }
        }
        r.stats.complete = !r.aborted;
        return r;
    }

  private:
    struct Worker {
        size_t index = 0;
        bool skipped = false;
        SymbolMaps sigma, inv;
        std::vector<std::pair<int, int>> trail;
        SearchStats stats;
        uint64_t unflushed = 0;
        std::optional<ConditionViolation> violation;
        std::vector<LocalOperator> found;
        std::vector<SymbolMaps> found_maps;
    };

    int prefix_code(const MultiIndex &r) const {
        int c = 0;
        for (int j = 0; j < k_; j++) c = c * d_ + r[j];
        return c;
    }

    bool stop_before(size_t idx) const {
        return aborted_.load(std::memory_order_relaxed) || (!all_ && best_.load(std::memory_order_relaxed) < idx);
    }
    bool stop(const Worker &w) const {
        return stop_before(w.index) || (!all_ && !w.found.empty());
    }
    void flush(Worker &w) {
        uint64_t total = used_.fetch_add(w.unflushed) + w.unflushed;
        w.unflushed = 0;
        if (total > opt_.max_nodes) aborted_.store(true);
    }
    void count_node(Worker &w) {
        w.stats.nodes++;
        if (++w.unflushed >= 4096) flush(w);
    }

    bool assign_forced(Worker &w, int j, int a, int b) {
        int cur = w.sigma[j][a];
        if (cur >= 0) return cur == b;
        if (w.inv[j][b] >= 0) return false;
        w.sigma[j][a] = b;
        w.inv[j][b] = a;
        w.trail.push_back({j, a});
        return true;
    }
    void undo_to(Worker &w, size_t mark) {
        while (w.trail.size() > mark) {
            auto [j, a] = w.trail.back();
            w.trail.pop_back();
            w.inv[j][w.sigma[j][a]] = -1;
            w.sigma[j][a] = -1;
        }
    }

    // Completing symbol a at site k-1 completes every row with that symbol there.
    bool propagate(Worker &w, int a) {
        for (int t : by_last_[a]) {
            const auto &row = src_.row(t);
            int c = 0;
            for (int j = 0; j < k_; j++) c = c * d_ + w.sigma[j][row[j]];
            const auto &img = dst_.row(dst_prefix_[c]);
            for (int j = k_; j < n_; j++) {
                if (!assign_forced(w, j, row[j], img[j])) return false;
            }
        }
        return true;
    }

    bool check_tables(Worker &w, const std::vector<int> &ids) {
        for (int t : ids) {
            if (auto v = product_form_violation(ta_[t], tb_[t], w.sigma, d_)) {
                w.stats.w_pruned++;
                if (!w.violation) w.violation = v;
                return false;
            }
        }
        return true;
    }

    void dfs(Worker &w, int j, int a) {
        if (stop(w)) return;
        if (a == d_) {
            if (j < k_ - 1) {
                if (!at_site_.empty() && !check_tables(w, at_site_[j])) return;
                dfs(w, j + 1, 0);
            } else {
                leaf(w);
            }
            return;
        }
        for (int b = 0; b < d_; b++) {
            if (w.inv[j][b] >= 0) continue;
            count_node(w);
            w.sigma[j][a] = b;
            w.inv[j][b] = a;
            size_t mark = w.trail.size();
            bool ok = j < k_ - 1 || propagate(w, a);
            if (ok) {
                dfs(w, j, a + 1);
            } else {
                w.stats.support_conflicts++;
            }
            undo_to(w, mark);
            w.sigma[j][a] = -1;
            w.inv[j][b] = -1;
            if (stop(w)) return;
        }
    }

    void leaf(Worker &w) {
        w.stats.leaves++;
        if (!at_leaf_.empty() && !check_tables(w, at_leaf_)) return;
        w.stats.solved++;
        size_t m = src_.size();
        std::vector<int> image(m);
        for (size_t t = 0; t < m; t++) {
            int c = 0;
            for (int j = 0; j < k_; j++) c = c * d_ + w.sigma[j][src_.row(t)[j]];
            image[t] = dst_prefix_[c];
        }
        std::vector<Phase> theta((size_t)n_ * d_);
        if (exact_) {
            std::vector<Turn> tau(m);
            for (size_t t = 0; t < m; t++) tau[t] = (dst_.phase(image[t]) / src_.phase(t)).rational_turn();
            auto x = solver_->solve(tau);
            if (!x) {
                w.stats.solve_failures++;
                return;
            }
            for (size_t q = 0; q < x->size(); q++) theta[q] = Phase::rational((*x)[q]);
        } else {
            std::vector<double> tau(m);
            for (size_t t = 0; t < m; t++) tau[t] = (dst_.phase(image[t]) / src_.phase(t)).turn();
            auto x = solver_->solve_real(tau, std::max(tolerance(), 1e-9) * (double)m);
            if (!x) {
                w.stats.solve_failures++;
                return;
            }
            for (size_t q = 0; q < x->size(); q++) theta[q] = Phase::real((*x)[q]);
        }
        LocalOperator op;
        for (int j = 0; j < n_; j++) {
            std::vector<Phase> ph(theta.begin() + (size_t)j * d_, theta.begin() + (size_t)(j + 1) * d_);
            op.sites.push_back(SiteMatrix::monomial(w.sigma[j], ph));
        }
        auto g = states_equal_up_to_global_phase(op.apply(src_), dst_);
        if (!g) throw std::logic_error("lm_match: solved phases failed replay");
        op.global = g->conj();
        w.found.push_back(std::move(op));
        w.found_maps.push_back(w.sigma);
        if (!all_) {
            size_t cur = best_.load();
            while (w.index < cur && !best_.compare_exchange_weak(cur, w.index)) {
            }
        }
    }

    const MinimalSupportState &src_, &dst_;
    MatchOptions opt_;
    bool all_;
    int n_, d_, k_;
    bool exact_ = true;
    std::vector<int> dst_prefix_;
    std::vector<std::vector<int>> by_last_;
    std::vector<WTable> ta_, tb_;
    std::vector<std::vector<int>> at_site_;
    std::vector<int> at_leaf_;
    std::optional<ModOneSolver> solver_;
    std::atomic<uint64_t> used_{0};
    std::atomic<bool> aborted_{false};
    std::atomic<size_t> best_{std::numeric_limits<size_t>::max()};
};

inline LmResult lm_search(const MinimalSupportState &src, const MinimalSupportState &dst, const MatchOptions &opt,
                          bool all) {
    LmSearch s(src, dst, opt, all);
    return s.run();
}

inline EquivalenceCertificate lm_certificate(LmResult r) {
    EquivalenceCertificate c;
    c.branch = "lm";
    c.exact = r.exact;
    c.stats = r.stats;
    if (!r.witnesses.empty()) {
        c.verdict = Verdict::Equivalent;
        c.witness = std::move(r.witnesses.front());
        c.detail = "local monomial witness";
    } else if (r.aborted) {
        c.verdict = Verdict::Inconclusive;
        c.detail = "node budget exhausted after " + std::to_string(r.stats.nodes) + " symbol assignments";
    } else {
        c.verdict = Verdict::Inequivalent;
        if (r.stats.solved == 0 && r.stats.w_pruned > 0) {
            c.reason = Reason::NecessaryConditionViolated;
            c.violation = r.violation;
            c.detail = "every support-compatible symbol map violates the W-ratio condition";
        } else {
            c.reason = Reason::SearchExhausted;
            c.detail = "all symbol maps examined; no solvable phase system";
        }
        if (!r.exact) c.detail += " (tolerance-qualified: real phases)";
    }
    return c;
}

}  // namespace detail

/// Complete decision of LM-equivalence between minimal-support states.
inline EquivalenceCertificate lm_match(const MinimalSupportState &src, const MinimalSupportState &dst,
                                       const MatchOptions &opt = {}) {
    return detail::lm_certificate(detail::lm_search(src, dst, opt, false));
}

// ---------------------------------------------------------------------------
// Butson branch (N = 2k)

namespace detail {

/// Turns mod d of one d x d matrix, row-major.
using TurnMatrix = std::vector<int64_t>;

/// Row-normalise by the first column, then sort rows. Equal keys <=> equal up
/// to a left monomial factor (all entries nonzero).
inline std::vector<int64_t> left_canon(const std::vector<int64_t> &m, int rows, int cols, int64_t order) {
    std::vector<std::vector<int64_t>> r(rows, std::vector<int64_t>(cols));
    for (int x = 0; x < rows; x++) {
        int64_t f = m[(size_t)x * cols];
        for (int y = 0; y < cols; y++) r[x][y] = mod(m[(size_t)x * cols + y] - f, order);
    }
    std::sort(r.begin(), r.end());
    std::vector<int64_t> out;
    out.reserve((size_t)rows * cols);
    for (auto &row : r) out.insert(out.end(), row.begin(), row.end());
    return out;
}

/// Right cosets rep * D * P of the BH(d,d) representatives, one per class of
/// left-monomial equivalence. D ranges over diagonal d-th roots with D_0 = 1.
inline const std::vector<TurnMatrix> &butson_site_candidates(int d) {
    static std::mutex mu;
    static std::unordered_map<int, std::vector<TurnMatrix>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    std::vector<TurnMatrix> out;
    std::unordered_set<std::vector<int64_t>, VecHash> seen;
    for (const auto &rep : enumerate_bh(d)) {
        auto base = turns_over(rep, d);
        for (uint64_t dc = 0; dc < ipow(d, d - 1); dc++) {
            std::vector<int64_t> diag(d, 0);
            uint64_t x = dc;
            for (int j = d - 1; j >= 1; j--) {
                diag[j] = (int64_t)(x % d);
                x /= d;
            }
            std::vector<int> p(d);
            std::iota(p.begin(), p.end(), 0);
            do {
                TurnMatrix c((size_t)d * d);
                for (int r = 0; r < d; r++) {
                    for (int a = 0; a < d; a++) c[(size_t)r * d + a] = mod(base[(size_t)r * d + p[a]] + diag[p[a]], d);
                }
                if (seen.insert(left_canon(c, d, d, d)).second) out.push_back(std::move(c));
            } while (std::next_permutation(p.begin(), p.end()));
        }
    }
    return cache.emplace(d, std::move(out)).first->second;
}

struct ButsonResult {
    std::vector<LocalOperator> witnesses;
    SearchStats stats;
    bool available = true;    // branch could be searched
    bool excluded = false;    // within-state condition rules out the form
    bool aborted = false;
    std::string note;
    std::optional<ConditionViolation> violation;
};

inline ButsonResult butson_search(const MinimalSupportState &src, const MinimalSupportState &dst,
                                  const MatchOptions &opt, bool all) {
    ButsonResult res;
    int n = src.n(), d = src.d(), k = src.k();
    if (k > 2) {
        for (const auto *s : {&src, &dst}) {
            auto c = within_state_condition(*s);
            if (!c.holds) {
                res.excluded = true;
                res.violation = c.violation;
                res.note = std::string("Butson form excluded: ") + (s == &src ? "source " : "target ") +
                           c.violation->str();
                return res;
            }
        }
    }
    if (!small_regime(k, d)) {
        res.available = false;
        res.note = "outside the small regime (d - k - 1)^(k-1) < (k+1)^(k-1) k; Butson form not known to be complete";
        return res;
    }
    if (d > 6) {
        res.available = false;
        res.note = "BH(d,d) enumeration is capped at d <= 6";
        return res;
    }
    if (!src.all_exact() || !dst.all_exact()) {
        res.available = false;
        res.note = "Butson branch needs exact phases";
        return res;
    }
    const auto &cand = butson_site_candidates(d);
    const size_t c = cand.size();
    uint64_t combos = ipow(c, k);
    if (combos > opt.max_nodes / 2) {
        res.aborted = true;
        res.stats.complete = false;
        res.note = "Butson candidate space " + std::to_string(combos) + "^2 exceeds the node budget";
        return res;
    }

    // Diagonal normalisation: D<-_i(l) = principal d-th root of W^{i,S0}_{l,0}.
    std::vector<std::vector<Phase>> dleft(n, std::vector<Phase>(d));
    for (int i = 0; i < n; i++) {
        std::vector<int> pos = {i};
        for (int j = 0; pos.size() < (size_t)(k - 1); j++) {
            if (j != i) pos.push_back(j);
        }
        for (int l = 0; l < d; l++) {
            std::vector<int> sym(pos.size(), 0);
            sym[0] = l;
            dleft[i][l] = principal_root(compute_w(src, pos, sym), d);
        }
    }
    // Phases of D<-^{-1} src over a common order.
    int64_t order = d;
    std::vector<Phase> tilde(src.size());
    for (size_t t = 0; t < src.size(); t++) {
        Phase p = src.phase(t);
        for (int j = 0; j < n; j++) p = p / dleft[j][src.row(t)[j]];
        tilde[t] = p;
        order = std::lcm(order, p.den());
    }
    const int64_t up = order / d;
    const int half = (int)ipow(d, k);
    // Row of src with given second-half code.
    std::vector<int> by_second(half, -1);
    std::vector<int> first_code(src.size());
    for (size_t t = 0; t < src.size(); t++) {
        int a = 0, b = 0;
        for (int j = 0; j < k; j++) a = a * d + src.row(t)[j];
        for (int j = k; j < n; j++) b = b * d + src.row(t)[j];
        by_second[b] = (int)t;
        first_code[t] = a;
    }
    std::vector<std::vector<int>> digits(half);
    for (int x = 0; x < half; x++) digits[x] = decode_small(x, k, d);

    auto combo = [&](uint64_t idx) {
        std::vector<int> out(k);
        for (int q = k - 1; q >= 0; q--) {
            out[q] = (int)(idx % c);
            idx /= c;
        }
        return out;
    };
    auto tensor_entry = [&](const std::vector<int> &cs, int x, int y) {
        int64_t s = 0;
        for (int q = 0; q < k; q++) s += cand[cs[q]][(size_t)digits[x][q] * d + digits[y][q]];
        return s * up;
    };

    // Keys of conj(C_B) for the second half.
    std::vector<std::vector<int64_t>> keys_b(combos);
    parallel_for(combos, [&](size_t idx) {
        auto cs = combo(idx);
        std::vector<int64_t> m((size_t)half * half);
        for (int x = 0; x < half; x++) {
            for (int y = 0; y < half; y++) m[(size_t)x * half + y] = mod(-tensor_entry(cs, x, y), order);
        }
        keys_b[idx] = left_canon(m, half, half, order);
    });
    std::unordered_map<std::vector<int64_t>, std::vector<uint64_t>, VecHash> index_b;
    for (uint64_t idx = 0; idx < combos; idx++) index_b[keys_b[idx]].push_back(idx);
    keys_b.clear();
    res.stats.butson_keys += combos;

    // Keys of C_A Psi for the first half, in order.
    std::vector<std::vector<uint64_t>> matches(combos);
    parallel_for(combos, [&](size_t idx) {
        auto cs = combo(idx);
        std::vector<int64_t> m((size_t)half * half);
        for (int x = 0; x < half; x++) {
            for (int b = 0; b < half; b++) {
                int t = by_second[b];
                int64_t om = tilde[t].num() * (order / tilde[t].den());
                m[(size_t)x * half + b] = mod(tensor_entry(cs, x, first_code[t]) + om, order);
            }
        }
        auto it = index_b.find(left_canon(m, half, half, order));
        if (it != index_b.end()) matches[idx] = it->second;
    });
    res.stats.butson_keys += combos;

    SparseState sparse_src = SparseState::from_minimal(src);
    SparseState sparse_dst = SparseState::from_minimal(dst);
    MatchOptions inner = opt;
    for (uint64_t ia = 0; ia < combos; ia++) {
        for (uint64_t ib : matches[ia]) {
            res.stats.butson_matches++;
            auto ca = combo(ia), cb = combo(ib);
            LocalOperator layer;
            for (int i = 0; i < n; i++) {
                const auto &m = cand[i < k ? ca[i] : cb[i - k]];
                std::vector<ComplexAmp> e((size_t)d * d);
                for (int r = 0; r < d; r++) {
                    for (int col = 0; col < d; col++) {
                        e[(size_t)r * d + col] =
                            ComplexAmp::from_phase(Phase::rational(m[(size_t)r * d + col], d) / dleft[i][col]);
                    }
                }
                layer.sites.push_back(SiteMatrix::dense(d, std::move(e), d, SiteKind::Butson));
            }
            auto mid = to_minimal_support(layer.apply(sparse_src), k);
            if (!mid) throw std::logic_error("butson_match: matched layer did not yield minimal support");
            auto lm = lm_search(*mid, dst, inner, false);
            res.stats.merge(lm.stats);
            if (lm.aborted) {
                res.aborted = true;
                res.stats.complete = false;
                return res;
            }
            if (lm.witnesses.empty()) continue;
            LocalOperator wop = lm.witnesses.front().compose(layer);
            auto g = states_equal_up_to_global_phase(wop.apply(sparse_src), sparse_dst);
            if (!g) throw std::logic_error("butson_match: composed witness failed replay");
            wop.global = wop.global * g->conj();
            res.witnesses.push_back(std::move(wop));
            if (!all) return res;
        }
    }
    return res;
}

}  // namespace detail

/// LM branch, then the Butson branch (tensor products of BH(d,d) matrices
/// between local monomials) for N = 2k.
inline EquivalenceCertificate butson_match(const MinimalSupportState &src, const MinimalSupportState &dst,
                                           const MatchOptions &opt = {}) {
    detail::require_same_shape(src, dst);
    if (src.n() != 2 * src.k()) throw DomainError("butson_match: requires N = 2k");
    EquivalenceCertificate lm;
    if (opt.branch != SearchBranch::ButsonOnly) {
        lm = lm_match(src, dst, opt);
        if (lm.verdict == Verdict::Equivalent || opt.branch == SearchBranch::LmOnly) return lm;
    }
    auto b = detail::butson_search(src, dst, opt, false);
    EquivalenceCertificate c;
    c.exact = src.all_exact() && dst.all_exact();
    c.stats = lm.stats;
    c.stats.merge(b.stats);
    if (!b.witnesses.empty()) {
        c.verdict = Verdict::Equivalent;
        c.branch = "butson";
        c.witness = b.witnesses.front();
        c.detail = "Butson layer followed by a local monomial";
        return c;
    }
    c.branch = opt.branch == SearchBranch::ButsonOnly ? "butson" : "lm+butson";
    bool lm_decided = opt.branch == SearchBranch::ButsonOnly || lm.verdict == Verdict::Inequivalent;
    if (!b.available || b.aborted || !lm_decided) {
        c.verdict = Verdict::Inconclusive;
        c.detail = lm_decided ? b.note : ("LM branch: " + lm.detail + "; Butson branch: " + b.note);
        return c;
    }
    c.verdict = Verdict::Inequivalent;
    bool lm_ncv = opt.branch == SearchBranch::ButsonOnly || lm.reason == Reason::NecessaryConditionViolated;
    if (b.excluded && lm_ncv) {
        c.reason = Reason::NecessaryConditionViolated;
        c.violation = lm.violation ? lm.violation : b.violation;
        c.detail = "LM branch: " + (lm.detail.empty() ? std::string("skipped") : lm.detail) + "; " + b.note;
    } else {
        c.reason = Reason::SearchExhausted;
        c.violation = lm.violation;
        c.detail = "LM branch: " + (lm.detail.empty() ? std::string("skipped") : lm.detail) + "; Butson branch: " +
                   (b.excluded ? b.note : std::to_string(b.stats.butson_matches) + " layer matches, none completed");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Automorphisms

enum class AutBranch { LM, LMButson };

inline std::vector<LocalOperator> automorphisms(const MinimalSupportState &s, AutBranch branch = AutBranch::LM,
                                                const MatchOptions &opt = {}) {
    auto lm = detail::lm_search(s, s, opt, true);
    if (lm.aborted) throw UnsupportedError("automorphisms: node budget exhausted");
    std::vector<LocalOperator> out = std::move(lm.witnesses);
    if (branch == AutBranch::LMButson) {
        if (s.n() != 2 * s.k()) throw DomainError("automorphisms: Butson branch requires N = 2k");
        auto b = detail::butson_search(s, s, opt, true);
        if (b.aborted) throw UnsupportedError("automorphisms: node budget exhausted");
        for (auto &w : b.witnesses) {
            bool dup = std::any_of(out.begin(), out.end(),
                                   [&](const LocalOperator &o) { return operators_equal_up_to_phase(o, w); });
            if (!dup) out.push_back(std::move(w));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Witness replay and structure

/// Replays an arbitrary local operator: Equivalent iff op * src == dst up to global phase.
inline EquivalenceCertificate certify_witness(const SparseState &src, const SparseState &dst, const LocalOperator &op) {
    EquivalenceCertificate c;
    c.branch = "replay";
    c.exact = src.is_exact() && dst.is_exact();
    auto img = op.apply(src);
    c.exact = c.exact && img.is_exact();
    if (auto g = states_equal_up_to_global_phase(img, dst)) {
        c.verdict = Verdict::Equivalent;
        c.witness = op;
        c.witness->global = op.global * g->conj();
        c.detail = "supplied operator replays";
    } else {
        c.verdict = Verdict::Inconclusive;
        c.detail = "supplied operator does not map source to target";
    }
    return c;
}

struct WitnessStructure {
    bool ok = true;
    std::vector<int> block_sizes;  // s per site, 0 where the structure fails
};

/// Constant nonzero count s per row and column, nonzero moduli 1/sqrt(s), per site.
inline WitnessStructure witness_structure(const LocalOperator &op) {
    WitnessStructure w;
    for (const auto &m : op.sites) {
        auto st = m.block_structure();
        w.ok = w.ok && st.ok;
        w.block_sizes.push_back(st.ok ? st.s : 0);
    }
    return w;
}

// ---------------------------------------------------------------------------
// One-parameter families with a single marked phase

struct FamilyPair {
    double phi1 = 0, phi2 = 0;  // radians
    std::string kind;           // "pair", "self", "conjugate"
    bool two_term_separated = true;
    std::vector<std::string> satisfiable_cases;  // "identity", "conjugate", "trivial"
    EquivalenceCertificate certificate;
};

struct FamilyReport {
    int marked_row = 0;
    int site = 0;
    int partner = 1;
    std::vector<FamilyPair> pairs;
};

/// base with exp(i phi) on support row `marked`.
inline MinimalSupportState with_marked_phase(const MinimalSupportState &base, size_t marked, double phi) {
    std::vector<Phase> ph = base.phases();
    ph.at(marked) = ph[marked] * Phase::from_angle(phi);
    return MinimalSupportState::create(base.n(), base.d(), base.k(), base.support(), ph);
}

/// For every pair of sampled angles: the two-term W identity on sites (0, {1})
/// at the marked row, over all symbol maps of those sites, and the engine verdict.
/// Each angle is also compared with itself and with its negative.
inline FamilyReport family_classes(const MinimalSupportState &base, size_t marked, const std::vector<double> &phis,
                                   const MatchOptions &opt = {}) {
    if (base.k() <= 2) throw DomainError("family_classes: requires k > 2");
    if (marked >= base.size()) throw DomainError("family_classes: marked row out of range");
    int d = base.d();
    FamilyReport rep;
    rep.marked_row = (int)marked;
    const auto &m = base.row(marked);
    int i = 0, s = 1;
    MultiIndex I = {m[s]}, I2 = {(m[s] + 1) % d};
    auto evaluate = [&](double p1, double p2, const std::string &kind) {
        FamilyPair fp;
        fp.phi1 = p1;
        fp.phi2 = p2;
        fp.kind = kind;
        auto a = with_marked_phase(base, marked, p1);
        auto b = with_marked_phase(base, marked, p2);
        SymbolMaps sigma(base.n());
        std::vector<int> pi(d), ps(d);
        std::iota(pi.begin(), pi.end(), 0);
        std::set<std::string> cases;
        do {
            std::iota(ps.begin(), ps.end(), 0);
            do {
                sigma[i] = pi;
                sigma[s] = ps;
                if (two_term_condition(a, b, sigma, i, {s}, m[i], I, I2)) {
                    fp.two_term_separated = false;
                    if (pi[m[i]] == m[i] && ps[I[0]] == m[s]) {
                        cases.insert("identity");
                    } else if (pi[m[i]] == m[i] && ps[I2[0]] == m[s]) {
                        cases.insert("conjugate");
                    } else {
                        cases.insert("trivial");
                    }
                }
            } while (std::next_permutation(ps.begin(), ps.end()));
        } while (std::next_permutation(pi.begin(), pi.end()));
        fp.satisfiable_cases.assign(cases.begin(), cases.end());
        fp.certificate = base.n() == 2 * base.k() ? butson_match(a, b, opt) : lm_match(a, b, opt);
        rep.pairs.push_back(std::move(fp));
    };
    for (size_t x = 0; x < phis.size(); x++) {
        for (size_t y = x + 1; y < phis.size(); y++) evaluate(phis[x], phis[y], "pair");
    }
    for (double p : phis) {
        evaluate(p, p, "self");
        evaluate(p, -p, "conjugate");
    }
    return rep;
}

}  // namespace ame

#endif  // AME_EQUIVALENCE_HPP
