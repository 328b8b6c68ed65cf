#include "toricflow/io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace toricflow;

namespace {

const std::string kBinary = TORICFLOW_BINARY;
const std::string kConfigs = TORICFLOW_CONFIG_DIR;
const std::string kGolden = TORICFLOW_GOLDEN_DIR;

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run(const std::string& args) {
    CliResult r;
    const std::string cmd = kBinary + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string config(const std::string& name) { return "--config " + kConfigs + "/" + name; }

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / ("toricflow_cli_" + name);
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

Json without_source(Json j) {
    j.erase("source");
    return j;
}

std::size_t count(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST(Cli, CheckReportsExampleInvariants) {
    const CliResult r = run("check " + config("kp2.json"));
    ASSERT_EQ(r.code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["gamma"], Json::array({"0", "0", "1"}));
    EXPECT_TRUE(j["special"].get<bool>());
    EXPECT_EQ(j["k_zeta_order"], 2);
    EXPECT_EQ(j["slice"]["shape"], "triangle");
    EXPECT_TRUE(j["slice"]["regular"].get<bool>());
}

TEST(Cli, FlowTimelineAndTopologies) {
    const CliResult r = run("flow " + config("kp2.json"));
    ASSERT_EQ(r.code, 0);
    const Json j = Json::parse(r.out);
    ASSERT_EQ(j["events"].size(), 3u);
    EXPECT_EQ(j["events"][0]["tau"], "2/5");
    EXPECT_EQ(j["events"][1]["tau"], "4/5");
    EXPECT_EQ(j["events"][2]["tau"], "1");
    EXPECT_EQ(j["events"][2]["kind"], "extinction");
    EXPECT_EQ(j["events"][0]["face"], Json::array({1, 3, 4}));
    const std::array<std::string, 3> surfaces{"S2", "T2", "S2"};
    const std::array<int, 3> euler{2, 0, 2};
    ASSERT_EQ(j["intervals"].size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(j["intervals"][i]["topology"]["surface"], surfaces[i]);
        EXPECT_EQ(j["intervals"][i]["topology"]["euler"], euler[i]);
    }
}

TEST(Cli, TomlAndJsonAgree) {
    for (const std::string cmd : {"check", "flow", "topology --tau 3/5"}) {
        const CliResult a = run(cmd + " " + config("kp2.json"));
        const CliResult b = run(cmd + " " + config("kp2.toml"));
        ASSERT_EQ(a.code, 0);
        ASSERT_EQ(b.code, 0);
        EXPECT_EQ(without_source(Json::parse(a.out)), without_source(Json::parse(b.out))) << cmd;
    }
}

TEST(Cli, TopologyAtTau) {
    const CliResult r = run("topology --tau 3/5 " + config("kp2.json"));
    ASSERT_EQ(r.code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["surface"], "T2");
    EXPECT_EQ(j["euler"], 0);
}

TEST(Cli, VerifyIsDeterministic) {
    const std::string args = "verify --samples 30 --seed 7 " + config("leewang.json");
    const CliResult a = run(args);
    const CliResult b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_TRUE(Json::parse(a.out)["pass"].get<bool>());
}

TEST(Cli, VerifyExitCodes) {
    EXPECT_EQ(run("verify --samples 30 " + config("stationary.json")).code, 0);
    EXPECT_EQ(run("verify --samples 30 " + config("special_lagrangian.toml")).code, 0);
    EXPECT_EQ(run("verify --samples 30 " + config("real_form.json")).code, 0);
    const CliResult neg = run("verify --samples 30 --negative-control " + config("leewang.json"));
    EXPECT_EQ(neg.code, 1);
    const Json j = Json::parse(neg.out);
    for (const auto& id : j["identities"]) EXPECT_EQ(id["pass"].get<bool>(), id["name"] != "lagrangian") << id["name"];
}

TEST(Cli, ConfigErrorsExitTwo) {
    EXPECT_EQ(run("check --config /nonexistent.json").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("topology --tau 2/5 " + config("kp2.json")).code, 2);
    EXPECT_EQ(run("topology --tau 11/10 " + config("kp2.json")).code, 2);
    EXPECT_EQ(run("flow " + config("nonprimitive.json")).code, 2);
    const auto bad = write_temp("bad.toml", "m = 2\n[[facets]]\nlambda = [1, 0]\nkappa = 0.5\n");
    EXPECT_EQ(run("check --config " + bad.string()).code, 2);
}

TEST(Cli, ConfigDiagnosticsNameFieldAndLine) {
    const std::string toml = "m = 2\n[[facets]]\nlambda = [1, 0]\nkappa = 0.5\n";
    try {
        parse_config(toml, ConfigFormat::Toml, "bad.toml");
        FAIL();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("bad.toml: line 4: facets[0].kappa"), std::string::npos) << msg;
        EXPECT_NE(msg.find("floating-point"), std::string::npos) << msg;
    }
    const std::string json = R"({"m": 2, "facets": [{"lambda": [1, 0], "kappa": "0"}], "extra": 1})";
    EXPECT_THROW(parse_config(json, ConfigFormat::Json, "x.json"), ConfigError);
}

TEST(Cli, NonPrimitiveWarning) {
    const CliResult r = run("check " + config("nonprimitive.json"));
    ASSERT_EQ(r.code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["validation"]["warnings"][0], "non-primitive normal (2,0) of facet 1");
}

TEST(Cli, RenderMatchesGolden) {
    const auto out = std::filesystem::temp_directory_path() / "toricflow_cli_render.svg";
    ASSERT_EQ(run("render " + config("kp2.json") + " --svg " + out.string()).code, 0);
    const std::string svg = read_file(out);
    EXPECT_EQ(svg, read_file(kGolden + "/kp2.svg"));
    const std::size_t panels = count(svg, "<g id=\"panel-");
    EXPECT_EQ(panels, 6u);
    EXPECT_EQ(count(svg, "<polygon"), panels);
}

TEST(Cli, FlowWritesOutAndSvg) {
    const auto json = std::filesystem::temp_directory_path() / "toricflow_cli_flow.json";
    const auto svg = std::filesystem::temp_directory_path() / "toricflow_cli_flow.svg";
    const CliResult r = run("flow " + config("kp2.json") + " --out " + json.string() + " --svg " + svg.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(Json::parse(read_file(json))["events"].size(), 3u);
    EXPECT_EQ(read_file(svg), read_file(kGolden + "/kp2.svg"));
}
