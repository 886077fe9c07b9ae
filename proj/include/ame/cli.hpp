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

#ifndef AME_CLI_HPP
#define AME_CLI_HPP

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ame/decide.hpp"
#include "ame/io.hpp"
#include "ame/reproduce.hpp"

namespace ame {

/// Exit codes: a verdict was produced, a negative verdict (Inequivalent for
/// `equiv`, a failed scenario for `reproduce`), or an error.
enum ExitCode { kExitOk = 0, kExitNegative = 1, kExitError = 2 };

namespace cli {

/// Anything a subcommand can read: JSON documents or OA text.
struct Document {
    std::string type;
    json j;
    std::optional<OrthogonalArray> oa;
};

inline Document load_document(const std::string &path) {
    std::string text = read_file(path);
    auto first = text.find_first_not_of(" \t\r\n");
    Document doc;
    if (first != std::string::npos && text[first] == '{') {
        doc.j = parse_json_text(text, path);
        doc.type = doc.j.value("type", "");
        if (doc.type == "oa") doc.oa = oa_from_json(doc.j);
        return doc;
    }
    doc.type = "oa";
    doc.oa = parse_oa_text(text);
    return doc;
}

inline SparseState load_state(const std::string &path) {
    auto doc = load_document(path);
    if (doc.type == "oa") return SparseState::from_minimal(oa_to_state(*doc.oa));
    if (doc.type == "molh") return SparseState::from_minimal(molh_to_state(molh_from_json(doc.j)));
    return any_state_from_json(doc.j);
}

inline MinimalSupportState require_minimal(const SparseState &s, const std::string &what) {
    int k = uniformity(s);
    auto m = k > 0 ? detail::as_minimal(s, k) : std::nullopt;
    if (!m) throw DomainError(what + ": state is not k-uniform with minimal support (d^k terms)");
    return *m;
}

inline std::string summarize(const LocalOperator &op) {
    std::ostringstream ss;
    for (size_t i = 0; i < op.sites.size(); i++) {
        const auto &m = op.sites[i];
        ss << "  site " << i << ": " << site_kind_name(m.kind);
        if (m.is_monomial()) {
            ss << " perm [";
            for (int a = 0; a < m.dim; a++) ss << (a ? " " : "") << m.perm[a];
            ss << "] phases [";
            for (int a = 0; a < m.dim; a++) ss << (a ? " " : "") << m.phases[a].str();
            ss << "]";
        } else {
            auto st = m.block_structure();
            ss << " dim " << m.dim << " scale " << m.scale;
            if (st.ok) ss << " nonzeros/row " << st.s;
        }
        ss << "\n";
    }
    ss << "  global phase " << op.global.str() << "\n";
    return ss.str();
}

inline std::string render(const EquivalenceCertificate &c) {
    std::ostringstream ss;
    ss << "verdict: " << verdict_name(c.verdict) << "\n";
    if (c.reason != Reason::None) ss << "reason: " << reason_name(c.reason) << "\n";
    if (!c.branch.empty()) ss << "branch: " << c.branch << "\n";
    ss << "exact: " << (c.exact ? "true" : "false") << "\n";
    if (!c.detail.empty()) ss << "detail: " << c.detail << "\n";
    if (c.violation) ss << "violation: " << c.violation->str() << "\n";
    const auto &s = c.stats;
    ss << "search: nodes " << s.nodes << ", leaves " << s.leaves << ", w-pruned " << s.w_pruned << ", solved "
       << s.solved << (s.complete ? "" : " (incomplete)") << "\n";
    if (c.witness) ss << "witness:\n" << summarize(*c.witness);
    return ss.str();
}

inline std::string render_state_summary(const SparseState &s) {
    std::ostringstream ss;
    int k = uniformity(s);
    ss << "parties: " << s.n() << "\nlocal dimension: " << s.d() << "\nterms: " << s.support_count()
       << "\nuniformity: " << k << "\nminimal support: " << (k > 0 && is_minimal_support(s, k) ? "true" : "false")
       << "\nexact: " << (s.is_exact() ? "true" : "false") << "\n";
    return ss.str();
}

inline json state_summary_json(const SparseState &s) {
    int k = uniformity(s);
    return {{"type", "state_check"},
            {"n", s.n()},
            {"d", s.d()},
            {"terms", s.support_count()},
            {"uniformity", k},
            {"minimal_support", k > 0 && is_minimal_support(s, k)},
            {"exact", s.is_exact()}};
}

struct Named {
    std::string name;
    std::string help;
};

inline const std::vector<Named> &construct_names() {
    static const std::vector<Named> names = {
        {"ghz", "GHZ(n,d), 1-uniform (--n, --d)"},
        {"ame43", "AME(4,3), 9 terms"},
        {"ame44", "AME(4,4) from GF(4), 16 terms"},
        {"ame49", "AME(4,9) = AME(4,3) (x) AME(4,3)"},
        {"ame5", "AME(5,d) with d^3 phased terms (--d)"},
        {"ame5p", "AME(5,d)' of minimal support (--d)"},
        {"ame64", "AME(6,4) from the hexacode"},
    };
    return names;
}

inline json construct(const std::string &name, int n, int d) {
    if (name == "ghz") return to_json(construct_ghz(n, d));
    if (name == "ame43") return to_json(construct_ame43());
    if (name == "ame44") return to_json(construct_ame44());
    if (name == "ame49") return to_json(construct_ame49());
    if (name == "ame5") return to_json(construct_ame5_phased(d));
    if (name == "ame5p") return to_json(construct_ame5_prime(d));
    if (name == "ame64") return to_json(construct_ame64());
    std::string known;
    for (const auto &c : construct_names()) known += (known.empty() ? "" : ", ") + c.name;
    throw DomainError("unknown state '" + name + "'; available: " + known);
}

}  // namespace cli

/// Runs one command line. Reports go to `out`, diagnostics to `err`.
inline int run_cli(const std::vector<std::string> &args, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{"Local-operator (SLOCC / LU) equivalence of k-uniform states of minimal support", "ame_slocc"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string mode = "exact", config_path, out_path;
    bool as_json = false;
    app.add_option("--mode", mode, "exact | float")->check(CLI::IsMember({"exact", "float"}));
    app.add_option("--tolerance", cfg.tolerance, "float comparison tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-nodes", cfg.max_nodes, "search node budget")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "seed for randomised suites");
    app.add_option("--config", config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_path, "write the report to a file");
    app.add_flag("--json", as_json, "emit JSON instead of text");

    // construct
    auto *c_construct = app.add_subcommand("construct", "emit a named state as JSON");
    std::string cname;
    int cn = 3, cd = 2;
    c_construct->add_option("name", cname, "state name")->required();
    c_construct->add_option("--n", cn, "parties (ghz)");
    c_construct->add_option("--d", cd, "local dimension (ghz, ame5, ame5p)");

    // check
    auto *c_check = app.add_subcommand("check", "validate a state, OA, MOLH, Butson matrix, operator or certificate");
    std::string check_path, check_src, check_dst;
    c_check->add_option("file", check_path)->required()->check(CLI::ExistingFile);
    c_check->add_option("--src", check_src, "source state for certificate replay");
    c_check->add_option("--dst", check_dst, "target state for certificate replay");

    // convert
    auto *c_convert = app.add_subcommand("convert", "convert between OA text, OA JSON, state JSON and MOLH JSON");
    std::string conv_path, conv_to;
    c_convert->add_option("file", conv_path)->required()->check(CLI::ExistingFile);
    c_convert->add_option("--to", conv_to, "state | oa | oa-text | molh")
        ->required()
        ->check(CLI::IsMember({"state", "oa", "oa-text", "molh"}));

    // equiv
    auto *c_equiv = app.add_subcommand("equiv", "decide SLOCC equivalence; exit 1 when Inequivalent");
    std::string eq_src, eq_dst, eq_branch = "full";
    c_equiv->add_option("--src", eq_src)->required()->check(CLI::ExistingFile);
    c_equiv->add_option("--dst", eq_dst)->required()->check(CLI::ExistingFile);
    c_equiv->add_option("--branch", eq_branch, "lm | full")->check(CLI::IsMember({"lm", "full"}));

    // autos
    auto *c_autos = app.add_subcommand("autos", "local automorphisms of a minimal-support state");
    std::string au_path, au_branch = "lm";
    c_autos->add_option("file", au_path)->required()->check(CLI::ExistingFile);
    c_autos->add_option("--branch", au_branch, "lm | full")->check(CLI::IsMember({"lm", "full"}));

    // filter
    auto *c_filter = app.add_subcommand("filter", "reduced-state filters (LM on projected supports, or spectra)");
    std::string fl_src, fl_dst;
    int fl_m = 0;
    c_filter->add_option("--src", fl_src)->required()->check(CLI::ExistingFile);
    c_filter->add_option("--dst", fl_dst)->required()->check(CLI::ExistingFile);
    c_filter->add_option("--subset-size", fl_m, "parties kept (default k+1)");

    // enumerate-bh
    auto *c_bh = app.add_subcommand("enumerate-bh", "Butson BH(d,d) classes up to monomial equivalence (d <= 6)");
    int bh_d = 0;
    c_bh->add_option("d", bh_d)->required()->check(CLI::Range(1, 6));

    // reproduce
    auto *c_repro = app.add_subcommand("reproduce", "run a recorded example end to end");
    std::vector<std::string> repro_ids;
    bool repro_list = false;
    c_repro->add_option("ids", repro_ids, "example ids, or 'all'");
    c_repro->add_flag("--list", repro_list, "list available ids");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitError;
    }

    std::ostringstream report;
    int code = kExitOk;
    try {
        if (!config_path.empty()) {
            // File values first; explicit flags win.
            RunConfig file = run_config_from_json(load_json(config_path));
            if (app.count("--tolerance") == 0) cfg.tolerance = file.tolerance;
            if (app.count("--max-nodes") == 0) cfg.max_nodes = file.max_nodes;
            if (app.count("--seed") == 0) cfg.seed = file.seed;
            if (app.count("--mode") == 0) mode = file.mode == RunConfig::Mode::Exact ? "exact" : "float";
            if (!as_json) as_json = file.output == RunConfig::Output::Json;
        }
        cfg.mode = mode == "exact" ? RunConfig::Mode::Exact : RunConfig::Mode::Float;
        cfg.output = as_json ? RunConfig::Output::Json : RunConfig::Output::Text;
        cfg.apply();
        auto emit = [&](const json &j, const std::string &text) {
            if (as_json) {
                report << j.dump(2) << "\n";
            } else {
                report << text;
            }
        };

        if (*c_construct) {
            report << cli::construct(cname, cn, cd).dump(2) << "\n";
        } else if (*c_check) {
            auto doc = cli::load_document(check_path);
            if (doc.type == "oa") {
                const auto &oa = *doc.oa;
                emit({{"type", "oa_check"}, {"rows", oa.rows.size()}, {"n", oa.n}, {"d", oa.d}, {"k", oa.k},
                      {"index", oa.index()}, {"valid", true}},
                     "orthogonal array OA(" + std::to_string(oa.rows.size()) + "," + std::to_string(oa.n) + "," +
                         std::to_string(oa.d) + "," + std::to_string(oa.k) + "), index " +
                         std::to_string(oa.index()) + ": valid\n");
            } else if (doc.type == "minimal_state" || doc.type == "sparse_state") {
                auto s = any_state_from_json(doc.j);
                cfg.require_exact(s, check_path);
                emit(cli::state_summary_json(s), cli::render_state_summary(s));
            } else if (doc.type == "molh") {
                auto L = molh_from_json(doc.j);
                emit({{"type", "molh_check"}, {"k", L.k}, {"d", L.d}, {"valid", true}},
                     "MOLH k=" + std::to_string(L.k) + " d=" + std::to_string(L.d) + ": valid\n");
            } else if (doc.type == "butson") {
                auto m = butson_from_json(doc.j);
                bool ok = is_butson(m, m.q);
                emit({{"type", "butson_check"}, {"d", m.d}, {"q", m.q}, {"valid", ok}},
                     "BH(" + std::to_string(m.d) + "," + std::to_string(m.q) + "): " + (ok ? "valid" : "INVALID") +
                         "\n");
            } else if (doc.type == "local_operator") {
                auto op = local_operator_from_json(doc.j);
                bool unitary = std::all_of(op.sites.begin(), op.sites.end(),
                                           [](const SiteMatrix &m) { return m.is_unitary(); });
                auto ws = witness_structure(op);
                emit({{"type", "operator_check"}, {"unitary", unitary}, {"structure_ok", ws.ok},
                      {"block_sizes", ws.block_sizes}},
                     std::string("unitary: ") + (unitary ? "true" : "false") + "\n" + cli::summarize(op));
            } else if (doc.type == "certificate") {
                auto c = certificate_from_json(doc.j);
                if (c.witness && !check_src.empty() && !check_dst.empty()) {
                    auto replay = certify_witness(cli::load_state(check_src), cli::load_state(check_dst), *c.witness);
                    bool ok = replay.verdict == Verdict::Equivalent;
                    emit({{"type", "replay"}, {"replayed", ok}}, std::string("replay: ") + (ok ? "ok" : "FAILED") + "\n");
                    if (!ok) code = kExitNegative;
                } else {
                    emit(to_json(c), cli::render(c));
                }
            } else if (doc.type == "ame5_certificate") {
                auto c = ame5_certificate_from_json(doc.j);
                emit(to_json(c), std::string("AME(5,") + std::to_string(c.d) + ") certificate: " +
                                     (c.passed() ? "all steps passed" : "FAILED") + "\n");
            } else {
                throw FormatError(FormatError::Code::Json, "unknown document type '" + doc.type + "'");
            }
        } else if (*c_convert) {
            auto doc = cli::load_document(conv_path);
            MinimalSupportState s;
            if (doc.type == "oa") {
                s = oa_to_state(*doc.oa);
            } else if (doc.type == "molh") {
                s = molh_to_state(molh_from_json(doc.j));
            } else {
                s = cli::require_minimal(any_state_from_json(doc.j), conv_path);
            }
            if (conv_to == "state") report << to_json(s).dump(2) << "\n";
            if (conv_to == "oa") report << to_json(state_to_oa(s)).dump(2) << "\n";
            if (conv_to == "oa-text") report << format_oa_text(state_to_oa(s));
            if (conv_to == "molh") report << to_json(state_to_molh(s)).dump(2) << "\n";
        } else if (*c_equiv) {
            auto a = cli::load_state(eq_src), b = cli::load_state(eq_dst);
            cfg.require_exact(a, eq_src);
            cfg.require_exact(b, eq_dst);
            EquivalenceCertificate c;
            if (eq_branch == "lm") {
                auto ma = cli::require_minimal(a, eq_src), mb = cli::require_minimal(b, eq_dst);
                c = lm_match(ma, mb, cfg.match_options());
            } else {
                c = decide_slocc(a, b, cfg.match_options());
            }
            emit(to_json(c), cli::render(c));
            if (c.verdict == Verdict::Inequivalent) code = kExitNegative;
        } else if (*c_autos) {
            auto s = cli::require_minimal(cli::load_state(au_path), au_path);
            cfg.require_exact(s, au_path);
            auto branch = au_branch == "lm" ? AutBranch::LM : AutBranch::LMButson;
            auto auts = automorphisms(s, branch, cfg.match_options());
            json arr = json::array();
            std::ostringstream text;
            text << auts.size() << " automorphisms\n";
            for (size_t i = 0; i < auts.size(); i++) {
                arr.push_back(to_json(auts[i]));
                text << "#" << i << "\n" << cli::summarize(auts[i]);
            }
            emit({{"type", "automorphisms"}, {"count", auts.size()}, {"operators", arr}}, text.str());
        } else if (*c_filter) {
            auto a = cli::load_state(fl_src), b = cli::load_state(fl_dst);
            int k = uniformity(a);
            auto ma = k > 0 ? detail::as_minimal(a, k) : std::nullopt;
            auto mb = k > 0 ? detail::as_minimal(b, k) : std::nullopt;
            if (ma && mb && 2 * k < a.n()) {
                auto r = reduced_lm_filter(*ma, *mb, fl_m, cfg.match_options());
                bool passed = r.verdict == FilterVerdict::Passed;
                std::string subset;
                for (int x : r.subset) subset += (subset.empty() ? "" : ",") + std::to_string(x);
                emit({{"type", "filter"}, {"filter", "reduced-lm"}, {"passed", passed}, {"subset", r.subset},
                      {"reason", r.reason}, {"subsets_examined", r.subsets_examined}},
                     std::string("reduced LM filter: ") + (passed ? "passed" : "FAILED on {" + subset + "}") + " (" +
                         std::to_string(r.subsets_examined) + " subsets)\n" +
                         (r.reason.empty() ? "" : "reason: " + r.reason + "\n"));
            } else {
                int m = fl_m ? fl_m : k + 1;
                auto r = compare_reduced_spectra(a, b, m);
                emit({{"type", "filter"}, {"filter", "spectra"}, {"passed", !r.differ}, {"subset", r.subset}},
                     std::string("reduced spectra on ") + std::to_string(m) + " parties: " +
                         (r.differ ? "differ" : "agree") + "\n");
            }
        } else if (*c_bh) {
            auto classes = enumerate_bh(bh_d);
            json arr = json::array();
            std::ostringstream text;
            text << classes.size() << " classes of BH(" << bh_d << "," << bh_d << ")\n";
            for (const auto &m : classes) {
                arr.push_back(to_json(m));
                text << m.str() << "\n";
            }
            emit({{"type", "butson_classes"}, {"d", bh_d}, {"count", classes.size()}, {"matrices", arr}}, text.str());
        } else if (*c_repro) {
            if (repro_list || repro_ids.empty()) {
                for (const auto &e : reproduce_registry()) report << e.id << "  " << e.summary << "\n";
            } else {
                if (repro_ids.size() == 1 && repro_ids[0] == "all") repro_ids = reproduce_ids();
                json arr = json::array();
                for (const auto &id : repro_ids) {
                    auto rep = reproduce(id, cfg);
                    if (!rep.passed()) code = kExitNegative;
                    if (as_json) {
                        arr.push_back(to_json(rep));
                    } else {
                        report << format_report(rep);
                    }
                }
                if (as_json) report << arr.dump(2) << "\n";
            }
        }
    } catch (const FormatError &e) {
        err << "error (format " << (int)e.code << "): " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    if (out_path.empty()) {
        out << report.str();
    } else {
        try {
            write_file(out_path, report.str());
        } catch (const std::exception &e) {
            err << "error: " << e.what() << "\n";
            return kExitError;
        }
    }
    return code;
}

inline int run_cli(int argc, char **argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace ame

#endif  // AME_CLI_HPP
