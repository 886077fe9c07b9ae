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


#ifndef AME_PHASE_HPP
#define AME_PHASE_HPP

#include <boost/rational.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ame/common.hpp"

namespace ame {

using Turn = boost::rational<int64_t>;

/// A unit-modulus scalar exp(2*pi*i*turn).
///
/// Rational turns are kept reduced in [0,1) and never degrade to floats;
/// real turns carry an arbitrary angle and compare with the global tolerance.
class Phase {
   public:
    enum class Kind { Rational, Real };

    Phase() = default;

    static Phase rational(int64_t p, int64_t q) {
        if (q == 0) {
            throw DomainError("phase denominator must be nonzero");
        }
        if (q < 0) {
            p = -p;
            q = -q;
        }
        return Phase(Turn(mod(p, q), q));
    }
    static Phase rational(const Turn &t) {
        return rational(t.numerator(), t.denominator());
    }
    static Phase real(double t) {
        Phase r;
        r.kind_ = Kind::Real;
        r.real_ = t - std::floor(t);
        if (r.real_ >= 1.0) {
            r.real_ = 0.0;
        }
        return r;
    }
    /// exp(i*angle), angle in radians.
    static Phase from_angle(double radians) {
        return real(radians / (2 * M_PI));
    }
    static Phase one() {
        return Phase();
    }

    Kind kind() const {
        return kind_;
    }
    bool is_exact() const {
        return kind_ == Kind::Rational;
    }
    const Turn &rational_turn() const {
        if (!is_exact()) {
            throw DomainError("phase is not a rational turn");
        }
        return turn_;
    }
    int64_t num() const {
        return rational_turn().numerator();
    }
    int64_t den() const {
        return rational_turn().denominator();
    }
    double turn() const {
        return is_exact() ? (double)turn_.numerator() / (double)turn_.denominator() : real_;
    }
    std::complex<double> value() const {
        if (is_exact()) {
            // Exact special cases avoid spurious 1e-17 residue.
            int64_t p = turn_.numerator(), q = turn_.denominator();
            if (q == 1) return {1, 0};
            if (q == 2) return {-1, 0};
            if (q == 4) return p == 1 ? std::complex<double>(0, 1) : std::complex<double>(0, -1);
        }
        return std::polar(1.0, 2 * M_PI * turn());
    }
    bool is_one() const {
        return is_exact() ? turn_.numerator() == 0 : circ_dist(real_, 0.0) <= tolerance();
    }

    Phase operator*(const Phase &o) const {
        if (is_exact() && o.is_exact()) {
            return rational(turn_ + o.turn_);
        }
        return real(turn() + o.turn());
    }
    Phase operator/(const Phase &o) const {
        return *this * o.conj();
    }
    Phase &operator*=(const Phase &o) {
        return *this = *this * o;
    }
    Phase conj() const {
        if (is_exact()) {
            return rational(-turn_);
        }
        return real(-real_);
    }
    Phase pow(int64_t e) const {
        if (is_exact()) {
            __int128 p = (__int128)turn_.numerator() * e;
            int64_t q = turn_.denominator();
            return rational((int64_t)(((p % q) + q) % q), q);
        }
        return real(real_ * (double)e);
    }

    /// Exact equality for rational pairs, tolerance otherwise.
    bool operator==(const Phase &o) const {
        if (is_exact() && o.is_exact()) {
            return turn_ == o.turn_;
        }
        return circ_dist(turn(), o.turn()) <= tolerance();
    }
    bool operator!=(const Phase &o) const {
        return !(*this == o);
    }
    /// Strict weak order on exact phases (by turn); used for canonical sorting.
    bool operator<(const Phase &o) const {
        if (is_exact() && o.is_exact()) {
            return turn_ < o.turn_;
        }
        return turn() < o.turn();
    }

    std::string str() const {
        std::ostringstream ss;
        if (is_exact()) {
            ss << turn_.numerator() << "/" << turn_.denominator();
        } else {
            ss << "~" << real_;
        }
        return ss.str();
    }

    static double circ_dist(double a, double b) {
        double x = std::fabs(a - b);
        x -= std::floor(x);
        return std::min(x, 1.0 - x);
    }

   private:
    explicit Phase(Turn t) : turn_(t) {}

    Kind kind_ = Kind::Rational;
    Turn turn_{0, 1};
    double real_ = 0.0;
};

inline std::ostream &operator<<(std::ostream &out, const Phase &p) {
    return out << p.str();
}

/// exp(2*pi*i*p/q) as a reduced rational turn.
inline Phase root_of_unity(int64_t q, int64_t p) {
    if (q <= 0) {
        throw DomainError("root_of_unity: order must be positive");
    }
    return Phase::rational(p, q);
}

inline Phase phase_product(const std::vector<Phase> &factors) {
    Phase r;
    for (const auto &f : factors) {
        r *= f;
    }
    return r;
}

/// The d solutions of y^d = x, ascending by turn.
inline std::vector<Phase> nth_roots(const Phase &x, int64_t d) {
    if (d < 1) {
        throw DomainError("nth_roots: d must be positive");
    }
    std::vector<Phase> out;
    out.reserve(d);
    for (int64_t m = 0; m < d; m++) {
        if (x.is_exact()) {
            out.push_back(Phase::rational((x.rational_turn() + Turn(m)) / Turn(d)));
        } else {
            out.push_back(Phase::real((x.turn() + (double)m) / (double)d));
        }
    }
    return out;
}

/// The root with the smallest turn; used wherever a canonical choice is needed.
inline Phase principal_root(const Phase &x, int64_t d) {
    return nth_roots(x, d).front();
}

}  // namespace ame

#endif  // AME_PHASE_HPP
