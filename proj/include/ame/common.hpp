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

#ifndef AME_COMMON_HPP
#define AME_COMMON_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ame {

/// Invalid argument for an otherwise well-formed call (bad d, bad subset...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A constructor produced something violating its declared invariant.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A request outside the supported regime (enumeration caps and the like).
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input data; `code` distinguishes the failure class.
struct FormatError : std::runtime_error {
    enum class Code { MalformedHeader = 10, Ragged = 11, SymbolRange = 12, StrengthFailed = 13, Io = 14, Json = 15 };
    Code code;
    FormatError(Code c, const std::string &msg) : std::runtime_error(msg), code(c) {}
};

/// Global float tolerance, shared by every inexact comparison.
inline std::atomic<double> &tolerance_slot() {
    static std::atomic<double> tol{1e-10};
    return tol;
}
inline double tolerance() {
    return tolerance_slot().load(std::memory_order_relaxed);
}
inline void set_tolerance(double tol) {
    if (!(tol > 0)) {
        throw DomainError("tolerance must be positive");
    }
    tolerance_slot().store(tol, std::memory_order_relaxed);
}

inline int64_t checked_mul(int64_t a, int64_t b) {
    __int128 r = (__int128)a * b;
    if (r > INT64_MAX || r < INT64_MIN) {
        throw std::overflow_error("int64 overflow in multiplication");
    }
    return (int64_t)r;
}

inline int64_t checked_add(int64_t a, int64_t b) {
    __int128 r = (__int128)a + b;
    if (r > INT64_MAX || r < INT64_MIN) {
        throw std::overflow_error("int64 overflow in addition");
    }
    return (int64_t)r;
}

/// Non-negative remainder.
inline int64_t mod(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

/// d^e with overflow check.
inline uint64_t ipow(uint64_t d, int e) {
    uint64_t r = 1;
    for (int i = 0; i < e; i++) {
        if (d != 0 && r > UINT64_MAX / d) {
            throw std::overflow_error("integer power overflow");
        }
        r *= d;
    }
    return r;
}

inline bool is_prime(int64_t n) {
    if (n < 2) {
        return false;
    }
    for (int64_t p = 2; p * p <= n; p++) {
        if (n % p == 0) {
            return false;
        }
    }
    return true;
}

/// All size-m subsets of {0..n-1}, lexicographic.
inline std::vector<std::vector<int>> subsets(int n, int m) {
    std::vector<std::vector<int>> out;
    if (m < 0 || m > n) {
        return out;
    }
    std::vector<int> cur(m);
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
        out.push_back(cur);
        int i = m - 1;
        while (i >= 0 && cur[i] == n - m + i) {
            i--;
        }
        if (i < 0) {
            break;
        }
        cur[i]++;
        for (int j = i + 1; j < m; j++) {
            cur[j] = cur[j - 1] + 1;
        }
    }
    return out;
}

/// Thread cap from AME_SLOCC_THREADS (default: hardware concurrency).
inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("AME_SLOCC_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            return (unsigned)v;
        }
    }
    return hw;
}

/// Runs body(i) for i in [0,n). Results must be written to per-index slots so
/// that aggregation order stays deterministic.
inline void parallel_for(size_t n, const std::function<void(size_t)> &body) {
    unsigned t = std::min<size_t>(thread_count(), n);
    if (t <= 1) {
        for (size_t i = 0; i < n; i++) {
            body(i);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(t);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < t; w++) {
        pool.emplace_back([&, w] {
            try {
                for (size_t i; (i = next.fetch_add(1)) < n;) {
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace ame

#endif  // AME_COMMON_HPP
