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


#ifndef AME_CYCLOTOMIC_HPP
#define AME_CYCLOTOMIC_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

#include "ame/common.hpp"
#include "ame/phase.hpp"

namespace ame {

/// Largest root-of-unity order handled exactly; beyond it sums fall back to floats.
constexpr int kMaxCyclotomicOrder = 720;

/// Coefficients (low degree first) of the n-th cyclotomic polynomial.
inline const std::vector<int64_t> &cyclotomic_polynomial(int n) {
    static std::recursive_mutex mu;
    static std::map<int, std::vector<int64_t>> cache;
    std::lock_guard<std::recursive_mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) {
        return it->second;
    }
    // x^n - 1 divided by every Phi_m with m | n, m < n.
    std::vector<int64_t> num(n + 1, 0);
    num[0] = -1;
    num[n] = 1;
    for (int m = 1; m < n; m++) {
        if (n % m != 0) {
            continue;
        }
        const std::vector<int64_t> den = cyclotomic_polynomial(m);
        int dn = (int)den.size() - 1;
        int nn = (int)num.size() - 1;
        std::vector<int64_t> quo(nn - dn + 1, 0);
        for (int i = nn; i >= dn; i--) {
            int64_t c = num[i];  // den is monic
            quo[i - dn] = c;
            if (c != 0) {
                for (int j = 0; j <= dn; j++) {
                    num[i - dn + j] -= c * den[j];
                }
            }
        }
        num = quo;
    }
    return cache.emplace(n, num).first->second;
}

/// Element of Z[zeta_N], stored as dense integer coefficients of zeta_N^t.
class Cyclotomic {
   public:
    Cyclotomic() : order_(1), c_(1, 0) {}
    explicit Cyclotomic(int order) : order_(order), c_(order, 0) {
        if (order < 1) {
            throw DomainError("cyclotomic order must be positive");
        }
    }

    static Cyclotomic integer(int64_t v) {
        Cyclotomic r(1);
        r.c_[0] = v;
        return r;
    }
    /// zeta_N^t.
    static Cyclotomic root(int order, int64_t t) {
        Cyclotomic r(order);
        r.c_[mod(t, order)] = 1;
        return r;
    }
    static Cyclotomic from_phase(const Phase &p) {
        if (!p.is_exact()) {
            throw DomainError("cyclotomic value requires a rational phase");
        }
        if (p.den() > kMaxCyclotomicOrder) {
            throw std::overflow_error("root-of-unity order above exact cap");
        }
        return root((int)p.den(), p.num());
    }

    int order() const {
        return order_;
    }
    const std::vector<int64_t> &coeffs() const {
        return c_;
    }
    int64_t coeff(int t) const {
        return c_[mod(t, order_)];
    }
    void add_term(int64_t t, int64_t v) {
        auto &x = c_[mod(t, order_)];
        x = checked_add(x, v);
    }

    Cyclotomic lift(int order) const {
        if (order % order_ != 0) {
            throw DomainError("lift target must be a multiple of the order");
        }
        if (order == order_) {
            return *this;
        }
        Cyclotomic r(order);
        int f = order / order_;
        for (int t = 0; t < order_; t++) {
            r.c_[t * f] = c_[t];
        }
        return r;
    }

    static int joint_order(int a, int b) {
        int64_t l = std::lcm((int64_t)a, (int64_t)b);
        if (l > kMaxCyclotomicOrder) {
            throw std::overflow_error("cyclotomic order above exact cap");
        }
        return (int)l;
    }

    Cyclotomic operator+(const Cyclotomic &o) const {
        int n = joint_order(order_, o.order_);
        Cyclotomic r = lift(n);
        int f = n / o.order_;
        for (int t = 0; t < o.order_; t++) {
            if (o.c_[t]) {
                r.c_[t * f] = checked_add(r.c_[t * f], o.c_[t]);
            }
        }
        return r;
    }
    Cyclotomic operator-() const {
        Cyclotomic r = *this;
        for (auto &x : r.c_) {
            x = -x;
        }
        return r;
    }
    Cyclotomic operator-(const Cyclotomic &o) const {
        return *this + (-o);
    }
    Cyclotomic operator*(const Cyclotomic &o) const {
        int n = joint_order(order_, o.order_);
        Cyclotomic r(n);
        int fa = n / order_, fb = n / o.order_;
        for (int s = 0; s < order_; s++) {
            if (!c_[s]) continue;
            for (int t = 0; t < o.order_; t++) {
                if (!o.c_[t]) continue;
                auto &x = r.c_[(s * fa + t * fb) % n];
                x = checked_add(x, checked_mul(c_[s], o.c_[t]));
            }
        }
        return r;
    }
    Cyclotomic operator*(int64_t v) const {
        Cyclotomic r = *this;
        for (auto &x : r.c_) {
            x = checked_mul(x, v);
        }
        return r;
    }
    Cyclotomic &operator+=(const Cyclotomic &o) {
        if (o.order_ == order_) {
            for (int t = 0; t < order_; t++) {
                c_[t] = checked_add(c_[t], o.c_[t]);
            }
            return *this;
        }
        return *this = *this + o;
    }
    Cyclotomic conj() const {
        Cyclotomic r(order_);
        for (int t = 0; t < order_; t++) {
            r.c_[(order_ - t) % order_] = c_[t];
        }
        return r;
    }

    /// Smallest order representing the same element syntactically.
    Cyclotomic shrink() const {
        int g = order_;
        for (int t = 0; t < order_ && g > 1; t++) {
            if (c_[t]) {
                g = std::gcd(g, t);
            }
        }
        if (g <= 1) {
            return *this;
        }
        Cyclotomic r(order_ / g);
        for (int t = 0; t < order_; t += g) {
            r.c_[t / g] = c_[t];
        }
        return r;
    }

    /// Coefficients of the canonical representative modulo Phi_N.
    std::vector<int64_t> reduced() const {
        const auto &phi = cyclotomic_polynomial(order_);
        int dp = (int)phi.size() - 1;
        std::vector<int64_t> a = c_;
        for (int i = order_ - 1; i >= dp; i--) {
            int64_t v = a[i];
            if (!v) continue;
            for (int j = 0; j <= dp; j++) {
                a[i - dp + j] = checked_add(a[i - dp + j], -checked_mul(v, phi[j]));
            }
        }
        a.resize(std::max(dp, 1));
        return a;
    }

    bool is_zero() const {
        Cyclotomic s = shrink();
        bool any = false;
        for (auto x : s.c_) {
            any |= x != 0;
        }
        if (!any) {
            return true;
        }
        if (is_prime(s.order_)) {
            // sum_t c_t z^t = 0 iff all coefficients coincide.
            for (auto x : s.c_) {
                if (x != s.c_[0]) return false;
            }
            return true;
        }
        for (auto x : s.reduced()) {
            if (x) return false;
        }
        return true;
    }
    bool operator==(const Cyclotomic &o) const {
        return (*this - o).is_zero();
    }
    bool operator!=(const Cyclotomic &o) const {
        return !(*this == o);
    }

    std::complex<double> to_complex() const {
        std::complex<double> z = 0;
        for (int t = 0; t < order_; t++) {
            if (c_[t]) {
                z += (double)c_[t] * std::polar(1.0, 2 * M_PI * t / order_);
            }
        }
        return z;
    }

    /// If this == m * zeta for a root of unity zeta and real m > 0 given as
    /// `modulus_sq` = m^2 (an element of the same ring), returns zeta.
    /// Snaps the float argument to the lattice of 2N-th roots and then checks
    /// this * conj(zeta) squared against modulus_sq exactly.
    bool phase_of(Phase *out) const {
        Cyclotomic s = shrink();
        std::complex<double> z = s.to_complex();
        if (std::abs(z) < 1e-9) {
            return false;
        }
        int64_t n2 = 2 * (int64_t)s.order_;
        double t = std::arg(z) / (2 * M_PI);
        int64_t k = (int64_t)std::llround(t * n2);
        Phase cand = Phase::rational(k, n2);
        Cyclotomic rot = s * Cyclotomic::from_phase(cand.conj());
        // rot must be real and positive: equals its conjugate.
        if (rot != rot.conj()) {
            return false;
        }
        if (rot.to_complex().real() <= 0) {
            return false;
        }
        *out = cand;
        return true;
    }

    std::string str() const {
        std::string s;
        for (int t = 0; t < order_; t++) {
            if (!c_[t]) continue;
            if (!s.empty()) s += " + ";
            s += std::to_string(c_[t]) + "*z" + std::to_string(order_) + "^" + std::to_string(t);
        }
        return s.empty() ? "0" : s;
    }

   private:
    int order_;
    std::vector<int64_t> c_;
};

/// Amplitude: exact cyclotomic integer, or a complex double in float mode.
class ComplexAmp {
   public:
    ComplexAmp() : exact_(true) {}
    explicit ComplexAmp(Cyclotomic c) : exact_(true), cy_(std::move(c)) {}
    explicit ComplexAmp(std::complex<double> z) : exact_(false), z_(z) {}

    static ComplexAmp from_phase(const Phase &p) {
        if (p.is_exact() && p.den() <= kMaxCyclotomicOrder) {
            return ComplexAmp(Cyclotomic::from_phase(p));
        }
        return ComplexAmp(p.value());
    }
    static ComplexAmp integer(int64_t v) {
        return ComplexAmp(Cyclotomic::integer(v));
    }

    bool is_exact() const {
        return exact_;
    }
    const Cyclotomic &exact() const {
        return cy_;
    }
    std::complex<double> value() const {
        return exact_ ? cy_.to_complex() : z_;
    }

    ComplexAmp operator+(const ComplexAmp &o) const {
        return combine(o, [](auto a, auto b) { return a + b; });
    }
    ComplexAmp operator-(const ComplexAmp &o) const {
        return combine(o, [](auto a, auto b) { return a - b; });
    }
    ComplexAmp operator*(const ComplexAmp &o) const {
        return combine(o, [](auto a, auto b) { return a * b; });
    }
    ComplexAmp &operator+=(const ComplexAmp &o) {
        if (exact_ && o.exact_ && cy_.order() == o.cy_.order()) {
            cy_ += o.cy_;
            return *this;
        }
        return *this = *this + o;
    }
    ComplexAmp conj() const {
        return exact_ ? ComplexAmp(cy_.conj()) : ComplexAmp(std::conj(z_));
    }
    bool is_zero() const {
        return exact_ ? cy_.is_zero() : std::abs(z_) <= tolerance();
    }
    bool operator==(const ComplexAmp &o) const {
        return (*this - o).is_zero();
    }

   private:
    template <typename F>
    ComplexAmp combine(const ComplexAmp &o, F f) const {
        if (exact_ && o.exact_) {
            if ((int64_t)std::lcm((int64_t)cy_.order(), (int64_t)o.cy_.order()) <= kMaxCyclotomicOrder) {
                try {
                    return ComplexAmp(f(cy_, o.cy_));
                } catch (const std::overflow_error &) {
                }
            }
        }
        return ComplexAmp(f(value(), o.value()));
    }

    bool exact_;
    Cyclotomic cy_;
    std::complex<double> z_;
};

}  // namespace ame

#endif  // AME_CYCLOTOMIC_HPP
