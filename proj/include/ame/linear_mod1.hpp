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


#ifndef AME_LINEAR_MOD1_HPP
#define AME_LINEAR_MOD1_HPP

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

#include "ame/common.hpp"
#include "ame/phase.hpp"

namespace ame {

/// Solves A x == b (mod 1) for an integer matrix A and rational or real b.
/// A is brought to diagonal form once, U A V = diag(s_0..s_{r-1}, 0, ...),
/// with U, V unimodular.
class ModOneSolver {
  public:
    using Matrix = std::vector<std::vector<int64_t>>;

    explicit ModOneSolver(Matrix a) : m_((int)a.size()), v_(a.empty() ? 0 : (int)a[0].size()) {
        u_ = unit(m_);
        vm_ = unit(v_);
        diagonalize(a);
    }

    int rank() const { return rank_; }
    int equations() const { return m_; }
    int unknowns() const { return v_; }
    const std::vector<int64_t> &invariants() const { return s_; }

    /// Exact solution with all components reduced into [0,1), or nullopt.
    std::optional<std::vector<Turn>> solve(const std::vector<Turn> &b) const {
        if ((int)b.size() != m_) throw DomainError("right-hand side length mismatch");
        int64_t q = 1;
        for (const auto &t : b) q = std::lcm(q, t.denominator());
        std::vector<__int128> c(m_, 0);
        for (int i = 0; i < m_; i++) {
            __int128 acc = 0;
            for (int j = 0; j < m_; j++) {
                if (u_[i][j] == 0) continue;
                __int128 bj = (__int128)b[j].numerator() * (q / b[j].denominator());
                acc += (__int128)u_[i][j] * bj;
            }
            c[i] = acc % q;
        }
        for (int i = rank_; i < m_; i++) {
            if (c[i] != 0) return std::nullopt;
        }
        // y_i = c_i / (q s_i); x = V y.
        std::vector<Turn> x(v_, Turn(0));
        for (int i = 0; i < rank_; i++) {
            if (c[i] == 0) continue;
            int64_t den = checked_mul(q, std::llabs(s_[i]));
            int64_t num = (int64_t)(s_[i] < 0 ? -c[i] : c[i]);
            for (int j = 0; j < v_; j++) {
                if (vm_[j][i] == 0) continue;
                __int128 p = (__int128)vm_[j][i] * num;
                int64_t pr = (int64_t)(p % den);
                x[j] += Turn(pr, den);
            }
        }
        for (auto &t : x) t = reduce(t);
        return x;
    }

    /// Real right-hand side; consistency is tested against tol (in turns).
    std::optional<std::vector<double>> solve_real(const std::vector<double> &b, double tol) const {
        if ((int)b.size() != m_) throw DomainError("right-hand side length mismatch");
        std::vector<double> c(m_, 0.0);
        for (int i = 0; i < m_; i++) {
            long double acc = 0;
            for (int j = 0; j < m_; j++) acc += (long double)u_[i][j] * b[j];
            c[i] = (double)(acc - std::floor(acc));
        }
        for (int i = rank_; i < m_; i++) {
            double f = std::min(c[i], 1.0 - c[i]);
            if (f > tol) return std::nullopt;
        }
        std::vector<double> x(v_, 0.0);
        for (int i = 0; i < rank_; i++) {
            double y = c[i] / (double)s_[i];
            for (int j = 0; j < v_; j++) x[j] += (double)vm_[j][i] * y;
        }
        for (auto &t : x) t -= std::floor(t);
        return x;
    }

  private:
    static Matrix unit(int n) {
        Matrix m(n, std::vector<int64_t>(n, 0));
        for (int i = 0; i < n; i++) m[i][i] = 1;
        return m;
    }
    static Turn reduce(Turn t) {
        Turn f = t - Turn(boost::rational_cast<int64_t>(t));
        if (f < 0) f += 1;
        return f;
    }
    static int64_t sub_mul(int64_t a, int64_t q, int64_t b) {
        __int128 r = (__int128)a - (__int128)q * b;
        if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("diagonal form overflow");
        return (int64_t)r;
    }
    void row_op(Matrix &a, int dst, int src, int64_t q) {
        // row_dst -= q * row_src, mirrored in U.
        for (int j = 0; j < v_; j++) a[dst][j] = sub_mul(a[dst][j], q, a[src][j]);
        for (int j = 0; j < m_; j++) u_[dst][j] = sub_mul(u_[dst][j], q, u_[src][j]);
    }
    void col_op(Matrix &a, int dst, int src, int64_t q) {
        for (int i = 0; i < m_; i++) a[i][dst] = sub_mul(a[i][dst], q, a[i][src]);
        for (int i = 0; i < v_; i++) vm_[i][dst] = sub_mul(vm_[i][dst], q, vm_[i][src]);
    }
    void swap_rows(Matrix &a, int x, int y) {
        std::swap(a[x], a[y]);
        std::swap(u_[x], u_[y]);
    }
    void swap_cols(Matrix &a, int x, int y) {
        for (auto &r : a) std::swap(r[x], r[y]);
        for (auto &r : vm_) std::swap(r[x], r[y]);
    }

    void diagonalize(Matrix &a) {
        int t = 0;
        for (; t < std::min(m_, v_); t++) {
            for (;;) {
                // Smallest nonzero entry of the trailing block becomes the pivot.
                int pi = -1, pj = -1;
                int64_t best = 0;
                for (int i = t; i < m_; i++) {
                    for (int j = t; j < v_; j++) {
                        int64_t x = std::llabs(a[i][j]);
                        if (x != 0 && (pi < 0 || x < best)) {
                            best = x;
                            pi = i;
                            pj = j;
                            if (best == 1) break;
                        }
                    }
                    if (best == 1) break;
                }
                if (pi < 0) {
                    rank_ = t;
                    return;
                }
                if (pi != t) swap_rows(a, pi, t);
                if (pj != t) swap_cols(a, pj, t);
                bool clean = true;
                for (int i = t + 1; i < m_; i++) {
                    if (a[i][t] == 0) continue;
                    row_op(a, i, t, a[i][t] / a[t][t]);
                    if (a[i][t] != 0) clean = false;
                }
                for (int j = t + 1; j < v_; j++) {
                    if (a[t][j] == 0) continue;
                    col_op(a, j, t, a[t][j] / a[t][t]);
                    if (a[t][j] != 0) clean = false;
                }
                if (clean) break;
            }
            s_.push_back(a[t][t]);
        }
        rank_ = t;
    }

    int m_, v_;
    int rank_ = 0;
    Matrix u_, vm_;
    std::vector<int64_t> s_;
};

}  // namespace ame

#endif  // AME_LINEAR_MOD1_HPP
