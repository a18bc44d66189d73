// Copyright 2026 The tbcluster Authors
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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tbcluster/json_io.hpp"
#include "tbcluster/run_config.hpp"
#include "tbcluster/source.hpp"

namespace fs = std::filesystem;

namespace {

TEST(JsonIo, Fnv1aReferenceVectors) {
    EXPECT_EQ(tbc::fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(tbc::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(tbc::fnv1a64("foobar"), 0x85944171f73967e8ULL);
    EXPECT_EQ(tbc::hex64(0xabcULL), "0000000000000abc");
}

TEST(JsonIo, StateRoundTripWithOrderedKeys) {
    const auto layout = tbc::default_layout(tbc::LevelSpec::paper_default());
    const auto s = tbc::cluster_state(layout, tbc::ModeGrid{});
    const auto j = tbc::state_to_json(s);
    std::vector<std::string> keys;
    for (const auto &[k, v] : j["amplitudes"][0].items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"t_s", "f_s", "t_i", "f_i", "re", "im"}));
    const auto back = tbc::state_from_json(tbc::ojson::parse(j.dump()));
    EXPECT_EQ(back.amplitudes(), s.amplitudes());
    EXPECT_EQ(back.signal_idler_offset_ghz(), s.signal_idler_offset_ghz());
    EXPECT_THROW(tbc::state_from_json(tbc::ojson::parse("{\"grid\": 1}")), tbc::Error);
}

TEST(JsonIo, AtomicWriteLeavesNoTemporary) {
    const fs::path dir = fs::temp_directory_path() / "tbc_atomic_test";
    fs::remove_all(dir);
    tbc::write_file_atomic(dir / "sub" / "a.txt", "hello\n");
    tbc::write_file_atomic(dir / "sub" / "a.txt", "again\n");
    std::ifstream in(dir / "sub" / "a.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "again\n");
    EXPECT_FALSE(fs::exists(dir / "sub" / "a.txt.tmp"));
    fs::remove_all(dir);
}

TEST(Config, PresetFilesMatchBuiltins) {
    for (const auto &name : tbc::preset_names()) {
        std::ifstream in(fs::path(TBC_SOURCE_DIR) / "presets" / (name + ".json"));
        ASSERT_TRUE(in.good()) << name;
        tbc::RunConfig cfg;
        tbc::apply_config_json(cfg, tbc::ojson::parse(in));
        EXPECT_EQ(tbc::config_hash(cfg), tbc::config_hash(tbc::preset(name))) << name;
        EXPECT_NO_THROW(cfg.validate());
    }
    EXPECT_THROW(tbc::preset("nope"), tbc::ConfigError);
}

TEST(Config, DefaultsCarryPublishedParameters) {
    const auto c = tbc::preset("paper-default");
    EXPECT_EQ(c.channel.link.length_km, 25.0);
    EXPECT_EQ(c.channel.link.thermal_sensitivity_ps_per_k_km, 36.8);
    EXPECT_EQ(c.detection.detector.jitter_signal_ps, 17.0);
    EXPECT_EQ(c.detection.detector.tdc_jitter_ps, 18.0);
    EXPECT_EQ(c.cpm.dispersion_ns_per_nm, 10.0);
    EXPECT_EQ(c.train.fwhm_ps, 37.0);
    const auto cal = tbc::preset("paper-calibrated");
    EXPECT_EQ(cal.detection.white_noise, 0.0667);
    EXPECT_EQ(cal.analysis.target_stderr, 0.04);
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
    const char *bad[] = {
        R"({"bogus": 1})",
        R"({"detection": {"bogus": 1}})",
        R"({"detection": {"detector": {"jitter": 1}}})",
        R"({"channel": {"stabilizer": {"interval": 1}}})",
        R"({"detection": {"white_noise": "high"}})",
        R"({"encoding": {"levels": 3}})",
        R"([1, 2])",
    };
    for (const char *text : bad) {
        tbc::RunConfig cfg;
        EXPECT_THROW(tbc::apply_config_json(cfg, tbc::ojson::parse(text)), tbc::ConfigError) << text;
    }
}

TEST(Config, OverlayAndValidation) {
    tbc::RunConfig cfg;
    tbc::apply_config_json(cfg, tbc::ojson::parse(R"({"seed": 9, "detection": {"white_noise": 0.2}})"));
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.detection.white_noise, 0.2);
    EXPECT_EQ(cfg.channel.link.length_km, 25.0);
    EXPECT_NO_THROW(cfg.validate());
    cfg.channel.link.length_km = -1.0;
    EXPECT_THROW(cfg.validate(), tbc::ConfigError);
    tbc::RunConfig bad;
    bad.detection.visibility_penalty = {{"q", 0.9}};
    EXPECT_THROW(bad.validate(), tbc::ConfigError);
    tbc::RunConfig phases;
    tbc::apply_config_json(phases, tbc::ojson::parse(R"({"source": {"phases_rad": [0, 0, 0]}})"));
    EXPECT_THROW(phases.validate(), tbc::ConfigError);
}

TEST(Config, HashIgnoresOutputDirectory) {
    tbc::RunConfig a;
    tbc::RunConfig b;
    b.out = "elsewhere";
    EXPECT_EQ(tbc::config_hash(a), tbc::config_hash(b));
    b.seed = 2;
    EXPECT_NE(tbc::config_hash(a), tbc::config_hash(b));
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(TBC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Cli, ExitCodes) {
    const fs::path dir = fs::temp_directory_path() / "tbc_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    EXPECT_EQ(run_cli("capacity --out " + (dir / "ok").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "ok" / "capacity.json"));
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("generate --preset nope --out " + (dir / "p").string()), 2);
    {
        std::ofstream(dir / "bad.json") << "{\"detection\": {\"bogus\": 1}}";
    }
    EXPECT_EQ(run_cli("generate --config " + (dir / "bad.json").string() + " --out " + (dir / "bad").string()), 2);
    EXPECT_FALSE(fs::exists(dir / "bad"));
    {
        std::ofstream(dir / "broken.json") << "{not json";
    }
    EXPECT_EQ(run_cli("generate --config " + (dir / "broken.json").string() + " --out " + (dir / "b").string()), 2);
    {
        std::ofstream(dir / "empty.json") << "{\"waveform\": {\"dispersions_ns_per_nm\": []}}";
    }
    EXPECT_EQ(run_cli("visibility --config " + (dir / "empty.json").string() + " --out " + (dir / "e").string()), 2);
    {
        std::ofstream(dir / "offgrid.json") << "{\"cpm\": {\"dispersion_ns_per_nm\": 7}}";
    }
    EXPECT_EQ(run_cli("witness --config " + (dir / "offgrid.json").string() + " --out " + (dir / "o").string()), 1);
    {
        std::ofstream(dir / "zero.json") << "{\"source\": {\"phases_rad\": [0, 0, 0, 0]}}";
    }
    EXPECT_EQ(run_cli("generate --config " + (dir / "zero.json").string() + " --out " + (dir / "z").string()), 0);
    std::ifstream in(dir / "z" / "state.json");
    const auto j = tbc::ojson::parse(in);
    EXPECT_NEAR(j["fidelity"].get<double>(), 0.25, 1e-12);
    fs::remove_all(dir);
}

}  // namespace
