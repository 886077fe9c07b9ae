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

#include "ame/cli.hpp"

#include <cstdio>
#include <filesystem>

#include "gtest/gtest.h"

using namespace ame;

namespace {

const std::string kData = AME_DATA_DIR;

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string &name) {
    return (std::filesystem::temp_directory_path() / ("ame_cli_test_" + name)).string();
}

}  // namespace

TEST(Cli, ConstructAme43EmitsNineTerms) {
    auto r = run({"construct", "ame43"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["type"], "minimal_state");
    EXPECT_EQ(j["rows"].size(), 9u);
    EXPECT_EQ(minimal_state_from_json(j), construct_ame43());
    EXPECT_EQ(run({"construct", "nope"}).code, 2);
}

TEST(Cli, EquivExitCodes) {
    auto r = run({"equiv", "--src", kData + "/ame55.json", "--dst", kData + "/ame55p.json"});
    EXPECT_EQ(r.code, 1) << r.out << r.err;
    EXPECT_NE(r.out.find("Inequivalent"), std::string::npos);

    auto same = run({"equiv", "--src", kData + "/ame43_oa.txt", "--dst", kData + "/ame43_oa.txt", "--json"});
    ASSERT_EQ(same.code, 0) << same.err;
    auto cert = certificate_from_json(json::parse(same.out));
    EXPECT_EQ(cert.verdict, Verdict::Equivalent);
    ASSERT_TRUE(cert.witness.has_value());

    // The emitted certificate replays through `check`.
    auto path = temp_path("cert.json");
    write_file(path, same.out);
    auto replay = run({"check", path, "--src", kData + "/ame43_oa.txt", "--dst", kData + "/ame43_oa.txt"});
    EXPECT_EQ(replay.code, 0) << replay.err;
    EXPECT_NE(replay.out.find("replay: ok"), std::string::npos);
    std::remove(path.c_str());
}

TEST(Cli, UsageAndInputErrors) {
    EXPECT_EQ(run({"--frobnicate", "construct", "ame43"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"equiv", "--src", kData + "/ame55.json"}).code, 2);
    EXPECT_EQ(run({"enumerate-bh", "9"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);

    auto bad = temp_path("bad_oa.txt");
    write_file(bad, "9 4 3 2\n0 3 0 0\n");
    auto r = run({"check", bad});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("format 12"), std::string::npos) << r.err;
    std::remove(bad.c_str());
}

TEST(Cli, ExactModeRejectsRealTurns) {
    auto s = MinimalSupportState::create(3, 2, 1, construct_ghz(3, 2).support(), {Phase::real(0.3), Phase::one()});
    auto path = temp_path("real.json");
    write_file(path, to_json(s).dump());
    auto r = run({"check", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("exact mode"), std::string::npos);
    EXPECT_EQ(run({"--mode", "float", "check", path}).code, 0);
    std::remove(path.c_str());
}

TEST(Cli, ConvertRoundTrip) {
    auto molh = run({"convert", kData + "/ame43_oa.txt", "--to", "molh"});
    ASSERT_EQ(molh.code, 0) << molh.err;
    auto path = temp_path("molh.json");
    write_file(path, molh.out);
    auto text = run({"convert", path, "--to", "oa-text"});
    ASSERT_EQ(text.code, 0) << text.err;
    EXPECT_EQ(parse_oa_text(text.out).rows, parse_oa_file(kData + "/ame43_oa.txt").rows);
    std::remove(path.c_str());
}

TEST(Cli, OtherSubcommands) {
    auto bh = run({"enumerate-bh", "4", "--json"});
    ASSERT_EQ(bh.code, 0) << bh.err;
    EXPECT_EQ(json::parse(bh.out)["count"], 2);

    auto autos = run({"autos", kData + "/ame43_oa.txt", "--json"});
    ASSERT_EQ(autos.code, 0) << autos.err;
    EXPECT_EQ(json::parse(autos.out)["count"], automorphisms(construct_ame43()).size());

    auto filt = run({"filter", "--src", kData + "/ame55p.json", "--dst", kData + "/ame55p.json", "--json"});
    ASSERT_EQ(filt.code, 0) << filt.err;
    EXPECT_EQ(json::parse(filt.out)["passed"], true);

    auto list = run({"reproduce", "--list"});
    EXPECT_EQ(list.code, 0);
    for (const auto &id : reproduce_ids()) EXPECT_NE(list.out.find(id), std::string::npos);
    EXPECT_EQ(run({"reproduce", "ame44-fourier-square"}).code, 0);
    EXPECT_EQ(run({"reproduce", "no-such-id"}).code, 2);
}

TEST(Cli, ConfigFileAndOutputPath) {
    auto cfg = temp_path("cfg.json");
    write_file(cfg, R"({"mode": "exact", "tolerance": 1e-9, "max_nodes": 1000000, "seed": 7, "output": "json"})");
    auto out = temp_path("out.json");
    auto r = run({"--config", cfg, "-o", out, "check", kData + "/ghz3_oa.txt"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(load_json(out)["type"], "oa_check");
    set_tolerance(1e-10);
    std::remove(cfg.c_str());
    std::remove(out.c_str());
}
