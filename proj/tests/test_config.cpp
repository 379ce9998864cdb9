#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "vtolctrl/commands.hpp"
#include "vtolctrl/report.hpp"

using namespace vtolctrl;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / "vtolctrl_test_config" / name;
    std::filesystem::remove_all(dir);
    return dir;
}

std::vector<std::string> read_lines(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);)
        lines.push_back(l);
    return lines;
}

std::string config_error(const json &root, const std::string &scenario) {
    try {
        parse_run_config(root, scenario);
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        return e.what();
    }
    ADD_FAILURE() << "expected ConfigError";
    return {};
}

} // namespace

TEST(Config, DefaultParses) {
    const json root = load_config_json(std::nullopt);
    const RunConfig c1 = parse_run_config(root, "case1_level");
    EXPECT_EQ(c1.model.states(), 4u);
    EXPECT_EQ(c1.controllers, (std::vector<std::string>{"pid", "lqr", "h2"}));
    EXPECT_EQ(c1.seeds, 20u);
    EXPECT_EQ(c1.sim.x0, (std::vector<double>{0, 0, 0, 0.5}));
    const RunConfig c2 = parse_run_config(root, "case2_hover");
    EXPECT_EQ(c2.model.states(), 6u);
    EXPECT_EQ(c2.sim.x0[1], 0.174533);
    EXPECT_EQ(c2.sim.dryden.airspeed, 10.0);
    ASSERT_TRUE(c2.pid.has_value());
    EXPECT_EQ(c2.pid->mixer.rows(), 4u);
    EXPECT_EQ(c2.pid->mixer.cols(), 3u);
}

TEST(Config, SummaryLabelsMirrorTables) {
    const json root = load_config_json(std::nullopt);
    const RunConfig c1 = parse_run_config(root, "case1_level");
    ASSERT_EQ(c1.summary.size(), 1u);
    EXPECT_EQ(c1.summary[0].label, "q (rad/sec)");
    EXPECT_EQ(c1.summary[0].state, 3u);
    EXPECT_FALSE(c1.summary[0].degrees);
    const RunConfig c2 = parse_run_config(root, "case2_hover");
    ASSERT_EQ(c2.summary.size(), 3u);
    EXPECT_EQ(c2.summary[0].label, "Roll angle (deg)");
    EXPECT_EQ(c2.summary[1].label, "Pitch angle (deg)");
    EXPECT_EQ(c2.summary[2].label, "Yaw angle (deg)");
    for (const auto &c : c2.summary)
        EXPECT_TRUE(c.degrees);
}

TEST(Config, MissingWeightsNamesField) {
    json root = load_config_json(std::nullopt);
    root["scenarios"]["case1_level"].erase("weights");
    EXPECT_NE(config_error(root, "case1_level").find("weights"), std::string::npos);
}

TEST(Config, UnknownScenario) {
    EXPECT_NE(config_error(load_config_json(std::nullopt), "case9").find("case9"), std::string::npos);
}

TEST(Config, UnknownController) {
    json root = load_config_json(std::nullopt);
    root["scenarios"]["case1_level"]["controllers"] = {"lqr", "hinf"};
    EXPECT_NE(config_error(root, "case1_level").find("controllers"), std::string::npos);
}

TEST(Config, WrongTypeNamesField) {
    json root = load_config_json(std::nullopt);
    root["scenarios"]["case1_level"]["sim"]["dt"] = "fast";
    EXPECT_NE(config_error(root, "case1_level").find("dt"), std::string::npos);
}

TEST(Config, BadJsonIsParseError) {
    const auto dir = fresh_dir("badjson");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "c.json") << "{ \"seeds\": 3, ";
    try {
        load_config_json(dir / "c.json");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
}

TEST(Config, OverridesReplaceFields) {
    json root = load_config_json(std::nullopt);
    Overrides o;
    o.controllers = std::vector<std::string>{"h2"};
    o.seeds = 3;
    o.seed_base = 40;
    o.output_dir = "/tmp/x";
    apply_overrides(root, "case1_level", o);
    const RunConfig c = parse_run_config(root, "case1_level");
    EXPECT_EQ(c.controllers, std::vector<std::string>{"h2"});
    EXPECT_EQ(c.seeds, 3u);
    EXPECT_EQ(c.seed_base, 40u);
    EXPECT_EQ(c.output_dir, std::filesystem::path("/tmp/x"));
}

TEST(Config, EnvironmentOutputDirectory) {
    json root = load_config_json(std::nullopt);
    ::setenv("VTOLCTRL_OUT", "/tmp/from_env", 1);
    apply_overrides(root, "case1_level", {});
    EXPECT_EQ(parse_run_config(root, "case1_level").output_dir, std::filesystem::path("/tmp/from_env"));
    json root2 = load_config_json(std::nullopt);
    Overrides o;
    o.output_dir = "/tmp/flag";
    apply_overrides(root2, "case1_level", o);
    EXPECT_EQ(parse_run_config(root2, "case1_level").output_dir, std::filesystem::path("/tmp/flag"));
    ::unsetenv("VTOLCTRL_OUT");
}

TEST(Config, HashIsDeterministicAndIgnoresOutputDir) {
    const json root = load_config_json(std::nullopt);
    const std::string h = parse_run_config(root, "case1_level").config_hash;
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(parse_run_config(load_config_json(std::nullopt), "case1_level").config_hash, h);
    json moved = root;
    moved["output_dir"] = "elsewhere";
    EXPECT_EQ(parse_run_config(moved, "case1_level").config_hash, h);
    json changed = root;
    changed["seeds"] = 5;
    EXPECT_NE(parse_run_config(changed, "case1_level").config_hash, h);
}

TEST(Config, Fnv1aReferenceVectors) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Config, SplitList) {
    EXPECT_EQ(split_list("lqr, h2,pid"), (std::vector<std::string>{"lqr", "h2", "pid"}));
    EXPECT_TRUE(split_list("").empty());
}

TEST(Config, AeroDefaults) {
    const AeroConfig a = parse_aero_config(load_config_json(std::nullopt));
    EXPECT_EQ(a.geometry.span, 1.2);
    EXPECT_EQ(a.geometry.root_chord, 0.28);
    EXPECT_EQ(a.geometry.spanwise_panels, 32u);
    EXPECT_EQ(a.alpha_end_deg, 10.0);
}

TEST(Config, BadWingIsConfigError) {
    json root = load_config_json(std::nullopt);
    root["aero"]["tip_chord"] = 0.5;
    try {
        parse_aero_config(root);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        EXPECT_EQ(exit_code_for(e), exit_code::usage);
    }
}

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(exit_code_for(Error(ErrorCode::ConfigError, "")), 1);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::ParseError, "")), 1);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::SingularFeedthrough, "")), 2);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::NoConvergence, "")), 2);
}

TEST(Commands, SynthWritesCertifiedGains) {
    json root = load_config_json(std::nullopt);
    Overrides o;
    o.controllers = std::vector<std::string>{"lqr", "h2"};
    o.output_dir = fresh_dir("synth").string();
    apply_overrides(root, "case1_level", o);
    const RunConfig c = parse_run_config(root, "case1_level");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_synth(c, out, err), exit_code::ok) << err.str();
    for (const char *name : {"lqr", "h2"}) {
        const auto path = c.output_dir / "case1_level" / "gains" / (std::string(name) + ".json");
        ASSERT_TRUE(std::filesystem::exists(path)) << path;
        const json j = json::parse(std::ifstream(path));
        EXPECT_TRUE(j.at("certificate").at("satisfied").get<bool>());
        EXPECT_LT(j.at("spectral_abscissa").get<double>(), 0.0);
        EXPECT_EQ(j.at("K").size(), 1u);
    }
    const json h2 = json::parse(std::ifstream(c.output_dir / "case1_level" / "gains" / "h2.json"));
    EXPECT_TRUE(h2.contains("gamma"));
}

TEST(Commands, SingularFeedthroughExitsTwo) {
    json root = load_config_json(std::nullopt);
    root["scenarios"]["case1_level"]["weights"]["h2"] = {{"Cz", {{1, 0, 0, 0}, {0, 0, 0, 1}}},
                                                          {"Du", {{0}, {0}}}};
    Overrides o;
    o.controllers = std::vector<std::string>{"h2"};
    o.output_dir = fresh_dir("singular").string();
    apply_overrides(root, "case1_level", o);
    const RunConfig c = parse_run_config(root, "case1_level");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_synth(c, out, err), exit_code::numerical);
    EXPECT_NE(err.str().find("SingularFeedthrough"), std::string::npos) << err.str();
}

TEST(Commands, SimulateIsDeterministicAndWritesArtifacts) {
    json root = load_config_json(std::nullopt);
    root["scenarios"]["case1_level"]["sim"]["t_final"] = 2.0;
    Overrides o;
    o.seeds = 1;
    o.output_dir = fresh_dir("simulate").string();
    apply_overrides(root, "case1_level", o);
    const RunConfig c = parse_run_config(root, "case1_level");
    std::ostringstream out1, out2, err;
    ASSERT_EQ(cmd_simulate(c, out1, err), exit_code::ok) << err.str();
    const auto dir = c.output_dir / "case1_level";
    const std::string first = read_lines(dir / "summary.txt").front();
    const json s1 = json::parse(std::ifstream(dir / "summary.json"));
    ASSERT_EQ(cmd_simulate(c, out2, err), exit_code::ok);
    const json s2 = json::parse(std::ifstream(dir / "summary.json"));
    EXPECT_EQ(s1, s2);
    EXPECT_EQ(out1.str(), out2.str());
    EXPECT_EQ(s1.at("config_hash"), c.config_hash);
    EXPECT_EQ(s1.at("columns"), json::array({"q (rad/sec)"}));
    EXPECT_EQ(s1.at("controllers").size(), 3u);
    EXPECT_NE(first.find("q (rad/sec)"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "metrics.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "traces" / "lqr_seed1.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "compare_q.svg"));

    const auto trace = read_lines(dir / "traces" / "pid_seed1.csv");
    EXPECT_EQ(trace.front(), "t,theta,u,w,q,elevon,w");
    EXPECT_EQ(trace.size(), 1u + 1001u);
}

TEST(Commands, AeroSweepCsv) {
    json root = load_config_json(std::nullopt);
    root["output_dir"] = fresh_dir("aero").string();
    const AeroConfig a = parse_aero_config(root);
    std::ostringstream out, err;
    ASSERT_EQ(cmd_aero(a, out, err), exit_code::ok);
    const auto lines = read_lines(a.output_dir / "aero" / "polar.csv");
    ASSERT_EQ(lines.size(), 12u);
    EXPECT_EQ(lines[0], "alpha_deg,CL,CDi,Cm");
    double prev = -1.0;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        EXPECT_NE(lines[k].back(), ',');
        std::stringstream ss(lines[k]);
        std::vector<double> cells;
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(std::stod(cell));
        ASSERT_EQ(cells.size(), 4u);
        EXPECT_EQ(cells[0], static_cast<double>(k - 1));
        EXPECT_GT(cells[1], prev);
        prev = cells[1];
    }
    const auto svg = read_lines(a.output_dir / "aero" / "polar.svg");
    EXPECT_NE(svg.front().find("viewBox=\"0 0 800 400\""), std::string::npos);
}

TEST(Commands, GustCsvFormat) {
    json root = load_config_json(std::nullopt);
    Overrides o;
    o.output_dir = fresh_dir("gust").string();
    apply_overrides(root, "case1_level", o);
    const RunConfig c = parse_run_config(root, "case1_level");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_gust(c, 1.0, out, err), exit_code::ok);
    const auto lines = read_lines(c.output_dir / "case1_level" / "gust_seed1.csv");
    ASSERT_GE(lines.size(), 3u);
    EXPECT_EQ(lines[0].front(), '#');
    EXPECT_EQ(lines[1], "t,u_g,v_g,w_g,p_g,q_g,r_g");
}

TEST(Report, SvgHasOnePolylinePerSeries) {
    const std::string svg = render_svg("t", "x", "y", {{"a", {0, 1, 2}, {0, 1, 0}}, {"b", {0, 1, 2}, {1, 0, 1}}});
    std::size_t count = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1))
        ++count;
    EXPECT_EQ(count, 2u);
    EXPECT_NE(svg.find(">a<"), std::string::npos);
    EXPECT_NE(svg.find(">b<"), std::string::npos);
}

TEST(Report, NumbersRoundTrip) {
    for (double v : {0.1, -3.0e-17, 22.49, 1.0 / 3.0})
        EXPECT_EQ(std::stod(format_number(v)), v);
}
