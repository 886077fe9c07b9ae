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

#ifndef AME_IO_HPP
#define AME_IO_HPP

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ame/butson.hpp"
#include "ame/design.hpp"
#include "ame/equivalence.hpp"
#include "ame/local_operator.hpp"
#include "ame/reductions.hpp"
#include "ame/state.hpp"

namespace ame {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
    enum class Mode { Exact, Float };
    enum class Output { Text, Json };

    Mode mode = Mode::Exact;
    double tolerance = 1e-10;
    uint64_t max_nodes = 200000000;
    uint64_t seed = 12345;
    Output output = Output::Text;

    void validate() const {
        if (!(tolerance > 0)) throw DomainError("tolerance must be positive");
        if (max_nodes == 0) throw DomainError("max_nodes must be positive");
    }
    /// Installs the tolerance globally.
    void apply() const {
        validate();
        set_tolerance(tolerance);
    }
    MatchOptions match_options() const {
        MatchOptions o;
        o.max_nodes = max_nodes;
        return o;
    }

    void require_exact(const SparseState &s, const std::string &what) const {
        if (mode == Mode::Exact && !s.is_exact()) {
            throw DomainError(what + ": real-turn or float amplitudes are not allowed in exact mode (use --mode float)");
        }
    }
    void require_exact(const MinimalSupportState &s, const std::string &what) const {
        if (mode == Mode::Exact && !s.all_exact()) {
            throw DomainError(what + ": real-turn phases are not allowed in exact mode (use --mode float)");
        }
    }
};

inline json to_json(const RunConfig &c) {
    return {{"mode", c.mode == RunConfig::Mode::Exact ? "exact" : "float"},
            {"tolerance", c.tolerance},
            {"max_nodes", c.max_nodes},
            {"seed", c.seed},
            {"output", c.output == RunConfig::Output::Text ? "text" : "json"}};
}

inline RunConfig run_config_from_json(const json &j) {
    RunConfig c;
    std::string mode = j.value("mode", "exact");
    if (mode == "exact") {
        c.mode = RunConfig::Mode::Exact;
    } else if (mode == "float") {
        c.mode = RunConfig::Mode::Float;
    } else {
        throw FormatError(FormatError::Code::Json, "unknown mode '" + mode + "'");
    }
    c.tolerance = j.value("tolerance", c.tolerance);
    c.max_nodes = j.value("max_nodes", c.max_nodes);
    c.seed = j.value("seed", c.seed);
    std::string out = j.value("output", "text");
    if (out == "text") {
        c.output = RunConfig::Output::Text;
    } else if (out == "json") {
        c.output = RunConfig::Output::Json;
    } else {
        throw FormatError(FormatError::Code::Json, "unknown output '" + out + "'");
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Scalars

inline json to_json(const Phase &p) {
    if (p.is_exact()) return {{"turn", {{"num", p.num()}, {"den", p.den()}}}};
    return {{"turn_real", p.turn()}};
}

namespace detail {

[[noreturn]] inline void json_fail(const std::string &msg) {
    throw FormatError(FormatError::Code::Json, msg);
}

inline const json &field(const json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) json_fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

template <typename T>
T get(const json &j, const char *key) {
    try {
        return field(j, key).get<T>();
    } catch (const json::exception &e) {
        json_fail(std::string("field '") + key + "': " + e.what());
    }
}

inline void expect_type(const json &j, const std::string &type) {
    std::string t = get<std::string>(j, "type");
    if (t != type) json_fail("expected document type '" + type + "', found '" + t + "'");
}

}  // namespace detail

inline Phase phase_from_json(const json &j) {
    if (j.is_object() && j.contains("turn")) {
        const auto &t = j.at("turn");
        int64_t den = detail::get<int64_t>(t, "den");
        if (den == 0) detail::json_fail("phase denominator is zero");
        return Phase::rational(detail::get<int64_t>(t, "num"), den);
    }
    if (j.is_object() && j.contains("turn_real")) {
        return Phase::real(detail::get<double>(j, "turn_real"));
    }
    detail::json_fail("phase must carry 'turn' or 'turn_real'");
}

/// Exact amplitudes serialize as sparse coefficients of the shrunken form.
inline json to_json(const ComplexAmp &a) {
    if (!a.is_exact()) return {{"re", a.value().real()}, {"im", a.value().imag()}};
    Cyclotomic s = a.exact().shrink();
    json terms = json::array();
    for (int t = 0; t < s.order(); t++) {
        if (s.coeff(t)) terms.push_back({t, s.coeff(t)});
    }
    return {{"order", s.order()}, {"terms", terms}};
}

inline ComplexAmp amp_from_json(const json &j) {
    if (j.is_object() && j.contains("order")) {
        int order = detail::get<int>(j, "order");
        if (order < 1 || order > kMaxCyclotomicOrder) detail::json_fail("cyclotomic order out of range");
        Cyclotomic c(order);
        for (const auto &t : detail::field(j, "terms")) {
            if (!t.is_array() || t.size() != 2) detail::json_fail("cyclotomic term must be [power, coefficient]");
            c.add_term(t[0].get<int64_t>(), t[1].get<int64_t>());
        }
        return ComplexAmp(c);
    }
    if (j.is_object() && j.contains("re")) {
        return ComplexAmp(std::complex<double>(detail::get<double>(j, "re"), detail::get<double>(j, "im")));
    }
    if (j.is_object() && (j.contains("turn") || j.contains("turn_real"))) {
        return ComplexAmp::from_phase(phase_from_json(j));
    }
    detail::json_fail("amplitude must be cyclotomic {order, terms}, complex {re, im}, or a phase");
}

// ---------------------------------------------------------------------------
// States and designs

inline json to_json(const MinimalSupportState &s) {
    json phases = json::array();
    for (const auto &p : s.phases()) phases.push_back(to_json(p));
    return {{"type", "minimal_state"}, {"n", s.n()}, {"d", s.d()}, {"k", s.k()}, {"rows", s.support()}, {"phases", phases}};
}

inline MinimalSupportState minimal_state_from_json(const json &j) {
    detail::expect_type(j, "minimal_state");
    auto rows = detail::get<std::vector<MultiIndex>>(j, "rows");
    std::vector<Phase> phases;
    if (j.contains("phases")) {
        for (const auto &p : j.at("phases")) phases.push_back(phase_from_json(p));
    }
    return MinimalSupportState::create(detail::get<int>(j, "n"), detail::get<int>(j, "d"), detail::get<int>(j, "k"),
                                       std::move(rows), std::move(phases));
}

/// Terms are listed in basis-code order, zero amplitudes dropped.
inline json to_json(const SparseState &s) {
    json terms = json::array();
    for (const auto &[code, a] : s.terms()) {
        if (a.is_zero()) continue;
        terms.push_back({{"index", decode(code, s.n(), s.d())}, {"amp", to_json(a)}});
    }
    return {{"type", "sparse_state"}, {"n", s.n()}, {"d", s.d()}, {"terms", terms}};
}

inline SparseState sparse_state_from_json(const json &j) {
    detail::expect_type(j, "sparse_state");
    SparseState s(detail::get<int>(j, "n"), detail::get<int>(j, "d"));
    for (const auto &t : detail::field(j, "terms")) {
        auto idx = detail::get<MultiIndex>(t, "index");
        if (t.contains("amp")) {
            s.add(idx, amp_from_json(t.at("amp")));
        } else {
            s.add(idx, ComplexAmp::from_phase(phase_from_json(detail::field(t, "phase"))));
        }
    }
    s.drop_zeros();
    return s;
}

/// Either state document, widened to a sparse state.
inline SparseState any_state_from_json(const json &j) {
    std::string t = detail::get<std::string>(j, "type");
    if (t == "minimal_state") return SparseState::from_minimal(minimal_state_from_json(j));
    if (t == "sparse_state") return sparse_state_from_json(j);
    detail::json_fail("expected a state document, found '" + t + "'");
}

inline json to_json(const OrthogonalArray &oa) {
    OrthogonalArray c = oa;
    c.canonicalize();
    return {{"type", "oa"}, {"n", c.n}, {"d", c.d}, {"k", c.k}, {"rows", c.rows}};
}

inline void validate_oa_rows(const OrthogonalArray &oa) {
    for (const auto &r : oa.rows) {
        if ((int)r.size() != oa.n) {
            throw FormatError(FormatError::Code::Ragged, "row " + index_str(r) + " has " + std::to_string(r.size()) +
                                                             " symbols, expected " + std::to_string(oa.n));
        }
        for (int x : r) {
            if (x < 0 || x >= oa.d) {
                throw FormatError(FormatError::Code::SymbolRange,
                                  "symbol " + std::to_string(x) + " outside [0," + std::to_string(oa.d) + ") in row " +
                                      index_str(r));
            }
        }
    }
}

inline void validate_oa(const OrthogonalArray &oa) {
    validate_oa_rows(oa);
    if (oa.rows.empty() || !check_oa(oa.rows, oa.k, oa.d).is_oa) {
        throw FormatError(FormatError::Code::StrengthFailed,
                          "rows do not form an orthogonal array of strength " + std::to_string(oa.k));
    }
}

inline OrthogonalArray oa_from_json(const json &j) {
    detail::expect_type(j, "oa");
    OrthogonalArray oa;
    oa.n = detail::get<int>(j, "n");
    oa.d = detail::get<int>(j, "d");
    oa.k = detail::get<int>(j, "k");
    oa.rows = detail::get<std::vector<MultiIndex>>(j, "rows");
    validate_oa(oa);
    oa.canonicalize();
    return oa;
}

inline json to_json(const LatinHypercube &L) {
    return {{"type", "molh"}, {"k", L.k}, {"d", L.d}, {"table", L.table}};
}

inline LatinHypercube molh_from_json(const json &j) {
    detail::expect_type(j, "molh");
    LatinHypercube L;
    L.k = detail::get<int>(j, "k");
    L.d = detail::get<int>(j, "d");
    L.table = detail::get<std::vector<MultiIndex>>(j, "table");
    if (L.table.size() != ipow(L.d, L.k)) detail::json_fail("molh table must have d^k entries");
    auto chk = check_molh(L);
    if (!chk.ok) throw FormatError(FormatError::Code::StrengthFailed, "not a MOLH: " + chk.diagnostic);
    return L;
}

// ---------------------------------------------------------------------------
// Matrices and operators

inline json to_json(const ButsonMatrix &m) {
    json e = json::array();
    for (const auto &p : m.e) e.push_back(to_json(p));
    return {{"type", "butson"}, {"d", m.d}, {"q", m.q}, {"entries", e}};
}

inline ButsonMatrix butson_from_json(const json &j) {
    detail::expect_type(j, "butson");
    ButsonMatrix m;
    m.d = detail::get<int>(j, "d");
    m.q = detail::get<int>(j, "q");
    for (const auto &p : detail::field(j, "entries")) m.e.push_back(phase_from_json(p));
    if (m.e.size() != (size_t)m.d * m.d) detail::json_fail("butson matrix must have d*d entries");
    return m;
}

inline SiteKind site_kind_from_name(const std::string &s) {
    for (auto k : {SiteKind::Permutation, SiteKind::Diagonal, SiteKind::Monomial, SiteKind::Butson, SiteKind::General}) {
        if (s == site_kind_name(k)) return k;
    }
    detail::json_fail("unknown site kind '" + s + "'");
}

/// Monomial sites are stored by (perm, phases); others by dense entries.
inline json to_json(const SiteMatrix &m) {
    json j = {{"dim", m.dim}, {"kind", site_kind_name(m.kind)}};
    if (m.is_monomial()) {
        json ph = json::array();
        for (const auto &p : m.phases) ph.push_back(to_json(p));
        j["perm"] = m.perm;
        j["phases"] = ph;
        return j;
    }
    json e = json::array();
    for (const auto &a : m.entries) e.push_back(to_json(a));
    j["scale"] = m.scale;
    j["entries"] = e;
    return j;
}

inline SiteMatrix site_matrix_from_json(const json &j) {
    int dim = detail::get<int>(j, "dim");
    SiteKind kind = site_kind_from_name(detail::get<std::string>(j, "kind"));
    if (kind == SiteKind::Permutation || kind == SiteKind::Diagonal || kind == SiteKind::Monomial) {
        auto perm = detail::get<std::vector<int>>(j, "perm");
        std::vector<Phase> ph;
        for (const auto &p : detail::field(j, "phases")) ph.push_back(phase_from_json(p));
        if ((int)perm.size() != dim || (int)ph.size() != dim) detail::json_fail("monomial site has wrong length");
        std::vector<int> seen(dim, 0);
        for (int x : perm) {
            if (x < 0 || x >= dim || seen[x]++) detail::json_fail("monomial site perm is not a permutation");
        }
        return SiteMatrix::monomial(std::move(perm), std::move(ph));
    }
    std::vector<ComplexAmp> e;
    for (const auto &a : detail::field(j, "entries")) e.push_back(amp_from_json(a));
    if (e.size() != (size_t)dim * dim) detail::json_fail("site matrix must have dim*dim entries");
    int64_t scale = detail::get<int64_t>(j, "scale");
    if (scale < 1) detail::json_fail("site matrix scale must be positive");
    return SiteMatrix::dense(dim, std::move(e), scale, kind);
}

inline json to_json(const LocalOperator &op) {
    json sites = json::array();
    for (const auto &m : op.sites) sites.push_back(to_json(m));
    return {{"type", "local_operator"}, {"global", to_json(op.global)}, {"sites", sites}};
}

inline LocalOperator local_operator_from_json(const json &j) {
    detail::expect_type(j, "local_operator");
    LocalOperator op;
    op.global = phase_from_json(detail::field(j, "global"));
    for (const auto &m : detail::field(j, "sites")) op.sites.push_back(site_matrix_from_json(m));
    return op;
}

// ---------------------------------------------------------------------------
// Certificates

inline json to_json(const SearchStats &s) {
    return {{"nodes", s.nodes},
            {"leaves", s.leaves},
            {"support_conflicts", s.support_conflicts},
            {"w_pruned", s.w_pruned},
            {"solved", s.solved},
            {"solve_failures", s.solve_failures},
            {"butson_keys", s.butson_keys},
            {"butson_matches", s.butson_matches},
            {"complete", s.complete}};
}

inline SearchStats search_stats_from_json(const json &j) {
    SearchStats s;
    s.nodes = detail::get<uint64_t>(j, "nodes");
    s.leaves = detail::get<uint64_t>(j, "leaves");
    s.support_conflicts = detail::get<uint64_t>(j, "support_conflicts");
    s.w_pruned = detail::get<uint64_t>(j, "w_pruned");
    s.solved = detail::get<uint64_t>(j, "solved");
    s.solve_failures = detail::get<uint64_t>(j, "solve_failures");
    s.butson_keys = detail::get<uint64_t>(j, "butson_keys");
    s.butson_matches = detail::get<uint64_t>(j, "butson_matches");
    s.complete = detail::get<bool>(j, "complete");
    return s;
}

inline json to_json(const ConditionViolation &v) {
    return {{"site", v.site}, {"subset", v.subset}, {"symbol", v.symbol}, {"index", v.index}, {"what", v.what}};
}

inline ConditionViolation violation_from_json(const json &j) {
    ConditionViolation v;
    v.site = detail::get<int>(j, "site");
    v.subset = detail::get<std::vector<int>>(j, "subset");
    v.symbol = detail::get<int>(j, "symbol");
    v.index = detail::get<MultiIndex>(j, "index");
    v.what = detail::get<std::string>(j, "what");
    return v;
}

inline Verdict verdict_from_name(const std::string &s) {
    for (auto v : {Verdict::Equivalent, Verdict::Inequivalent, Verdict::Inconclusive}) {
        if (s == verdict_name(v)) return v;
    }
    detail::json_fail("unknown verdict '" + s + "'");
}

inline Reason reason_from_name(const std::string &s) {
    for (auto r : {Reason::None, Reason::SearchExhausted, Reason::NecessaryConditionViolated}) {
        if (s == reason_name(r)) return r;
    }
    detail::json_fail("unknown reason '" + s + "'");
}

inline json to_json(const EquivalenceCertificate &c) {
    json j = {{"type", "certificate"},
              {"verdict", verdict_name(c.verdict)},
              {"reason", reason_name(c.reason)},
              {"exact", c.exact},
              {"branch", c.branch},
              {"detail", c.detail},
              {"stats", to_json(c.stats)}};
    j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
    j["violation"] = c.violation ? to_json(*c.violation) : json(nullptr);
    return j;
}

inline EquivalenceCertificate certificate_from_json(const json &j) {
    detail::expect_type(j, "certificate");
    EquivalenceCertificate c;
    c.verdict = verdict_from_name(detail::get<std::string>(j, "verdict"));
    c.reason = reason_from_name(detail::get<std::string>(j, "reason"));
    c.exact = detail::get<bool>(j, "exact");
    c.branch = detail::get<std::string>(j, "branch");
    c.detail = detail::get<std::string>(j, "detail");
    c.stats = search_stats_from_json(detail::field(j, "stats"));
    if (j.contains("witness") && !j.at("witness").is_null()) c.witness = local_operator_from_json(j.at("witness"));
    if (j.contains("violation") && !j.at("violation").is_null()) c.violation = violation_from_json(j.at("violation"));
    return c;
}

inline json to_json(const Ame5Certificate &c) {
    json steps = json::array();
    for (const auto &s : c.steps) {
        steps.push_back({{"name", s.name}, {"claim", s.claim}, {"passed", s.passed}, {"detail", s.detail}});
    }
    return {{"type", "ame5_certificate"}, {"d", c.d},           {"steps", steps}, {"assumptions", c.assumptions},
            {"verdict", verdict_name(c.verdict)}, {"exact", c.exact}, {"passed", c.passed()}};
}

inline Ame5Certificate ame5_certificate_from_json(const json &j) {
    detail::expect_type(j, "ame5_certificate");
    Ame5Certificate c;
    c.d = detail::get<int>(j, "d");
    for (const auto &s : detail::field(j, "steps")) {
        c.steps.push_back({detail::get<std::string>(s, "name"), detail::get<std::string>(s, "claim"),
                           detail::get<bool>(s, "passed"), detail::get<std::string>(s, "detail")});
    }
    c.assumptions = detail::get<std::vector<std::string>>(j, "assumptions");
    c.verdict = verdict_from_name(detail::get<std::string>(j, "verdict"));
    c.exact = detail::get<bool>(j, "exact");
    return c;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatError::Code::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw FormatError(FormatError::Code::Io, "cannot write '" + path + "'");
}

inline json parse_json_text(const std::string &text, const std::string &origin = "<input>") {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw FormatError(FormatError::Code::Json, origin + ": " + e.what());
    }
}

inline json load_json(const std::string &path) {
    return parse_json_text(read_file(path), path);
}

/// OA text format: header "r N d k", then r rows of N symbols. Symbols are
/// whitespace separated; a row may also be a single run of N digits when
/// d <= 10. Blank lines and '#' comments are ignored.
inline OrthogonalArray parse_oa_text(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> lines;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (!tok.empty()) lines.push_back(std::move(tok));
    }
    auto as_int = [](const std::string &t, int64_t *out) {
        if (t.empty() || t.size() > 9) return false;
        for (char c : t) {
            if (c < '0' || c > '9') return false;
        }
        *out = std::stoll(t);
        return true;
    };
    if (lines.empty() || lines[0].size() != 4) {
        throw FormatError(FormatError::Code::MalformedHeader, "header must be 'r N d k'");
    }
    int64_t h[4];
    for (int i = 0; i < 4; i++) {
        if (!as_int(lines[0][i], &h[i])) {
            throw FormatError(FormatError::Code::MalformedHeader, "header field '" + lines[0][i] + "' is not a count");
        }
    }
    if (h[0] < 1 || h[1] < 1 || h[2] < 1 || h[3] < 0 || h[3] > h[1]) {
        throw FormatError(FormatError::Code::MalformedHeader, "header values out of range");
    }
    OrthogonalArray oa;
    oa.n = (int)h[1];
    oa.d = (int)h[2];
    oa.k = (int)h[3];
    for (size_t r = 1; r < lines.size(); r++) {
        auto tok = lines[r];
        if (tok.size() == 1 && oa.n > 1 && oa.d <= 10 && (int)tok[0].size() == oa.n) {
            std::vector<std::string> split;
            for (char c : tok[0]) split.emplace_back(1, c);
            tok = split;
        }
        MultiIndex row;
        for (const auto &t : tok) {
            int64_t v;
            if (!as_int(t, &v)) {
                throw FormatError(FormatError::Code::SymbolRange, "row " + std::to_string(r) + ": bad symbol '" + t + "'");
            }
            row.push_back((int)v);
        }
        oa.rows.push_back(std::move(row));
    }
    validate_oa_rows(oa);
    if ((int64_t)lines.size() - 1 != h[0]) {
        throw FormatError(FormatError::Code::Ragged, "header declares " + std::to_string(h[0]) + " rows, found " +
                                                         std::to_string(lines.size() - 1));
    }
    validate_oa(oa);
    oa.canonicalize();
    return oa;
}

inline OrthogonalArray parse_oa_file(const std::string &path) {
    return parse_oa_text(read_file(path));
}

inline std::string format_oa_text(const OrthogonalArray &oa) {
    OrthogonalArray c = oa;
    c.canonicalize();
    std::ostringstream ss;
    ss << c.rows.size() << " " << c.n << " " << c.d << " " << c.k << "\n";
    for (const auto &r : c.rows) {
        for (size_t i = 0; i < r.size(); i++) ss << (i ? " " : "") << r[i];
        ss << "\n";
    }
    return ss.str();
}

}  // namespace ame

#endif  // AME_IO_HPP
