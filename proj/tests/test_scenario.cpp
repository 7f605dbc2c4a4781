#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "srde/commands.hpp"
#include "srde/scenario.hpp"

using namespace srde;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("presets carry the pinned figure parameters") {
    const Scenario fig2 = preset_scenario("fig2");
    CHECK(fig2.params.epsilon == 1.0);
    CHECK(fig2.params.sigma == 1.0);
    CHECK(fig2.sweep.axis == SweepAxis::Gamma);
    CHECK(fig2.sweep.grid == std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0});
    CHECK(fig2.ensemble.size == 200);
    CHECK(fig2.ensemble.monitor == Monitor::AmplitudeSquared);

    const Scenario fig4 = preset_scenario("fig4");
    CHECK(fig4.sweep.axis == SweepAxis::Sigma);
    CHECK(fig4.sweep.grid == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
    CHECK(fig4.params.gamma == 1.0);
    CHECK(fig4.ensemble.monitor == Monitor::Amplitude);

    const Scenario fig1 = preset_scenario("fig1");
    CHECK(fig1.sim.backend == Backend::FiniteDifference);
    CHECK(fig1.sim.grid_points == 15);

    CHECK_THROWS_AS(preset_scenario("fig9"), std::invalid_argument);
}

TEST_CASE("empty text parses to the default scenario") {
    const Scenario s = parse_scenario_text("  \n");
    CHECK(s.name == "default");
    CHECK(s.params.epsilon == 0.1);
    CHECK(s.params.basis.total_modes == 8);
    CHECK(s.params.spectrum.lambda(2) == 1.0);
}

TEST_CASE("field overrides and preset overlays") {
    const Scenario s =
        parse_scenario_text(R"({"preset":"fig2","ensemble":{"size":16},"out_dir":"x"})");
    CHECK(s.ensemble.size == 16);
    CHECK(s.out_dir == "x");
    CHECK(s.sweep.grid.size() == 5);  // preset value preserved
    CHECK(s.params.epsilon == 1.0);
}

TEST_CASE("errors carry field paths") {
    SUBCASE("range error") {
        try {
            parse_scenario_text(R"({"params":{"sigma":-1.0}})");
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("params.sigma") != std::string::npos);
        }
    }
    SUBCASE("unknown key") {
        try {
            parse_scenario_text(R"({"params":{"sigmaa":1.0}})");
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("params.sigmaa") != std::string::npos);
        }
    }
    SUBCASE("unknown preset") {
        try {
            parse_scenario_text(R"({"preset":"fig7"})");
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("preset") != std::string::npos);
        }
    }
    SUBCASE("unknown monitor") {
        CHECK_THROWS_AS(parse_scenario_text(R"({"ensemble":{"monitor":"b"}})"),
                        std::invalid_argument);
    }
    SUBCASE("epsilon out of range") {
        CHECK_THROWS_AS(parse_scenario_text(R"({"params":{"epsilon":2.0}})"),
                        std::invalid_argument);
    }
}

TEST_CASE("resolved scenarios round-trip") {
    for (const std::string name : {"default", "fig1", "fig2", "fig3", "fig4"}) {
        const Scenario s = preset_scenario(name);
        const std::string echoed = scenario_to_text(s);
        const Scenario back = parse_scenario_text(echoed);
        CHECK(scenario_to_json(back) == scenario_to_json(s));
    }
    // a modified scenario round-trips too
    Scenario s = preset_scenario("fig3");
    s.sim.init_amplitude = 0.75;
    s.model = ModelKind::AveragedDeviation;
    s.ensemble.monitor = Monitor::AmplitudeSquared;
    const Scenario back = parse_scenario_text(scenario_to_text(s));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
}

TEST_CASE("parse_scenario accepts preset names and files") {
    const Scenario s = parse_scenario("fig3");
    CHECK(s.name == "fig3");
    CHECK_THROWS_AS(parse_scenario("no_such_file.json"), std::invalid_argument);

    const std::string path = "scenario_tmp_test.json";
    {
        std::ofstream out(path);
        out << R"({"name":"custom","params":{"epsilon":0.25}})";
    }
    const Scenario from_file = parse_scenario(path);
    CHECK(from_file.name == "custom");
    CHECK(from_file.params.epsilon == 0.25);
    std::remove(path.c_str());
}

TEST_CASE("commands emit stable CSV schemas") {
    namespace fs = std::filesystem;
    Scenario s = preset_scenario("default");
    s.sim.t_final = 2.0;
    s.sim.record_stride = 20;
    s.sim.snapshot_stride = 200;
    s.ensemble.size = 4;
    s.sweep.grid = {0.4, 0.8};
    s.out_dir = "cmd_test_out";
    std::ostringstream log;

    CHECK(cmd_simulate(s, log) == 0);
    {
        std::ifstream in(fs::path(s.out_dir) / "trajectory.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "t,a");
    }
    CHECK(fs::exists(fs::path(s.out_dir) / "scenario_resolved.json"));
    // the echoed scenario re-parses to the same resolved form
    const Scenario echoed =
        parse_scenario((fs::path(s.out_dir) / "scenario_resolved.json").string());
    CHECK(scenario_to_json(echoed) == scenario_to_json(s));

    s.sim.t_final = 4.0;
    CHECK(cmd_sweep(s, log) == 0);
    {
        std::ifstream in(fs::path(s.out_dir) / "sweep.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "covariate,mean,var,stderr,n,divergences");
    }
    const std::string first_run = read_file((fs::path(s.out_dir) / "sweep.csv").string());
    CHECK(cmd_sweep(s, log) == 0);
    CHECK(read_file((fs::path(s.out_dir) / "sweep.csv").string()) == first_run);

    CHECK(cmd_reduce(s, log) == 0);
    {
        std::ifstream in(fs::path(s.out_dir) / "averaged.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "t_slow,A1");
    }
    CHECK(cmd_verify(s, log) == 0);
    fs::remove_all(s.out_dir);
}
