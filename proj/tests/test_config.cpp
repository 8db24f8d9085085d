// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "bsched/config.hpp"
#include "bsched/experiment.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace bsched;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("bsched_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string config_error_field(const std::string& text)
{
    try {
        parse_experiment_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

const char* kGoldenConfig = R"({"num_bns": 2, "num_antennas": 2, "horizon": 3, "replicas": 2, "seed": 7,
                                "emit": ["slots_csv"]})";

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(BSCHED_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("empty document gives the Table-1 defaults")
    {
        const ExperimentSpec spec = parse_experiment_text("{}");
        const NetworkConfig& c = spec.base;
        CHECK(c.num_bns == 5);
        CHECK(c.num_antennas == 5);
        CHECK(c.link.noise_power == doctest::Approx(1e-14).epsilon(1e-12));
        CHECK(c.scheduler.power_budget == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(c.link.bandwidth == 5e3);
        CHECK(c.admission.d_max == 3e4);
        CHECK(c.scheduler.epsilon == 0.01);
        CHECK(c.scheduler.it_max == 100);
        CHECK(c.link.alpha_max == 0.8);
        CHECK(c.horizon == 1000);
        CHECK(c.channel.rician_k == 1.0);
        CHECK(c.channel.pathloss_exp == 3.0);
        CHECK(c.channel.carrier_freq == 915e6);
        CHECK(c.channel.num_antennas == 5);
        CHECK(c.geometry.average_distance.value() == 30.0);
        CHECK(c.scheduler.rate_model.unbounded());
        CHECK(c.replicas == 20);
        CHECK(spec.sweep.empty());
    }

    TEST_CASE("single field overrides")
    {
        const NetworkConfig c = parse_experiment_text(R"({"num_antennas": 10})").base;
        CHECK(c.num_antennas == 10);
        CHECK(c.channel.num_antennas == 10);
        CHECK(c.num_bns == 5);

        const NetworkConfig f = parse_experiment_text(R"({"blocklength": 100, "error_prob": 1e-5})").base;
        CHECK(f.scheduler.rate_model.blocklength.value() == 100.0);
        CHECK(f.scheduler.rate_model.error_prob == 1e-5);
        CHECK(parse_experiment_text(R"({"blocklength": "inf"})").base.scheduler.rate_model.unbounded());
        CHECK(parse_experiment_text(R"({"blocklength": null})").base.scheduler.rate_model.unbounded());

        const NetworkConfig g = parse_experiment_text(R"({"num_bns": 4, "geometry": {"distances": [18, 22, 30, 34]}})").base;
        CHECK(g.geometry.distances == std::vector<double>{18, 22, 30, 34});
    }

    TEST_CASE("schema errors name the field")
    {
        CHECK(config_error_field(R"({"num_antennas": 0})") == "num_antennas");
        CHECK(config_error_field(R"({"num_antennas": "five"})") == "num_antennas");
        CHECK(config_error_field(R"({"num_antennas": 2.5})") == "num_antennas");
        CHECK(config_error_field(R"({"antennas": 4})") == "antennas");
        CHECK(config_error_field(R"({"utility": "max"})") == "utility");
        CHECK(config_error_field(R"({"geometry": {"radius": 50, "shape": "disc"}})") == "geometry.shape");
        CHECK(config_error_field(R"({"geometry": {"distances": [10, -1]}, "num_bns": 2})") == "geometry.distances[1]");
        CHECK(config_error_field(R"({"geometry": {"distances": [10, 20]}})") == "geometry.distances");
        CHECK(config_error_field(R"({"alpha_max": 1.2})") == "alpha_max");
        CHECK(config_error_field(R"({"error_prob": 1})") == "error_prob");
        CHECK(config_error_field(R"({"blocklength": 0})") == "blocklength");
        CHECK(config_error_field(R"({"sweep": [{"param": "nope", "values": [1]}]})") == "sweep[0].param");
        CHECK(config_error_field(R"({"sweep": [{"param": "v_param", "values": []}]})") == "sweep[0].values");
        CHECK(config_error_field(R"({"sweep": [{"param": "num_bns", "values": [2, 0]}]})") == "num_bns");
        CHECK(config_error_field(R"({"emit": ["pdf"]})") == "emit[0]");
    }

    TEST_CASE("syntax errors report line and column")
    {
        try {
            parse_experiment_text("{\n  \"num_bns\": 3,\n  \"horizon\" 10\n}");
            FAIL("expected a parse error");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("line 3") != std::string::npos);
            CHECK(msg.find("column") != std::string::npos);
        }
    }

    TEST_CASE("unit conversions")
    {
        CHECK(dbm_to_watts(-110.0) == doctest::Approx(1e-14).epsilon(1e-12));
        CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(watts_to_dbm(0.5) == doctest::Approx(26.9897).epsilon(1e-5));
        CHECK(watts_to_dbm(dbm_to_watts(-73.2)) == doctest::Approx(-73.2).epsilon(1e-12));
    }

    TEST_CASE("configuration round trip")
    {
        const ExperimentSpec spec = parse_experiment_text(
            R"({"num_bns": 4, "utility": "common", "blocklength": 1000, "geometry": {"radius": 50}})");
        const NetworkConfig again = parse_network_config(network_config_to_json(spec.base));
        CHECK(again.num_bns == 4);
        CHECK(again.admission.utility == Utility::Common);
        CHECK(again.scheduler.rate_model.blocklength.value() == 1000.0);
        CHECK(again.geometry.radius.value() == 50.0);
        CHECK(again.link.noise_power == doctest::Approx(spec.base.link.noise_power).epsilon(1e-12));
    }

    TEST_CASE("sweep expansion is a cartesian product")
    {
        const ExperimentSpec spec = parse_experiment_text(R"({
            "sweep": [{"param": "v_param", "values": [1e3, 1e4, 1e5]},
                      {"param": "geometry.ring_distance", "values": [10, 20]}]})");
        const auto points = expand_sweep(spec);
        REQUIRE(points.size() == 6);
        CHECK(points[0].config.admission.v_param == 1e3);
        CHECK(points[1].config.admission.v_param == 1e4);
        CHECK(points[3].config.geometry.ring_distance.value() == 20.0);
        CHECK(points[5].assignment[0].second == json(1e5));
    }

    TEST_CASE("overrides")
    {
        ExperimentSpec spec = preset("fig8_fairness");
        apply_override(spec, "v_param=1e5");
        apply_override(spec, "horizon=50");
        apply_override(spec, "output_dir=somewhere");
        CHECK(spec.base.admission.v_param == 1e5);
        CHECK(spec.output_dir == "somewhere");
        for (const auto& p : expand_sweep(spec))
            CHECK(p.config.horizon == 50);
        CHECK_THROWS_AS(apply_override(spec, "nonsense=1"), ConfigError);
        CHECK_THROWS_AS(apply_override(spec, "no_equals_sign"), ConfigError);
        CHECK_THROWS_AS(apply_override(spec, "num_bns=3"), ConfigError);
    }

    TEST_CASE("every preset expands to a valid experiment")
    {
        for (const std::string& name : preset_names()) {
            const ExperimentSpec spec = preset(name);
            CHECK(spec.name == name);
            CHECK_FALSE(expand_sweep(spec).empty());
        }
        CHECK_THROWS_AS(preset("fig99"), ConfigError);

        const auto fig4 = expand_sweep(preset("fig4_tradeoff"));
        CHECK(fig4.size() == 18);
        CHECK(fig4.front().config.admission.v_param == 1e7);
        CHECK(fig4.back().config.admission.v_param == 1e9);
        CHECK(fig4.back().config.scheduler.power_budget == doctest::Approx(0.8));

        const auto fig9 = expand_sweep(preset("fig9_fbl_range"));
        CHECK(fig9.front().config.scheduler.rate_model.unbounded());
        CHECK(fig9.front().config.scheduler.rate_model.error_prob == 1e-3);
        CHECK(fig9[3].config.scheduler.rate_model.blocklength.value() == 100.0);

        const auto fig8 = preset("fig8_fairness");
        CHECK(fig8.base.geometry.distances == std::vector<double>{18, 22, 30, 34});
    }

    TEST_CASE("load_config reads files")
    {
        const auto dir = scratch_dir("load");
        std::ofstream(dir / "c.json") << R"({"num_bns": 3})";
        CHECK(load_config(dir / "c.json").base.num_bns == 3);
        CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
    }

    TEST_CASE("number formatting is shortest round trip")
    {
        CHECK(format_number(30000.0) == "30000");
        CHECK(format_number(0.1) == "0.1");
        CHECK(format_number(-0.0) == "0");
        CHECK(format_number(1e-14) == "1e-14");
        CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    }

    TEST_CASE("slots.csv matches the golden file")
    {
        ExperimentSpec spec = parse_experiment_text(kGoldenConfig);
        spec.output_dir = scratch_dir("golden").string();
        const ExperimentResult result = run_experiment(spec);
        REQUIRE(result.files.size() == 1);
        const std::string produced = read_file(result.files[0]);
        const std::string golden = read_file(std::filesystem::path(BSCHED_TEST_DATA_DIR) / "golden_slots.csv");
        CHECK(produced == golden);

        const auto& cols = slots_csv_columns();
        std::string header;
        for (std::size_t i = 0; i < cols.size(); ++i)
            header += (i ? "," : "") + cols[i];
        CHECK(produced.substr(0, produced.find('\n')) == header);
    }

    TEST_CASE("experiment outputs are deterministic")
    {
        ExperimentSpec spec = parse_experiment_text(R"({"num_bns": 2, "horizon": 20, "replicas": 3,
            "sweep": [{"param": "utility", "values": ["sum", "common"]}]})");
        spec.output_dir = scratch_dir("det_a").string();
        const auto a = run_experiment(spec);
        spec.output_dir = scratch_dir("det_b").string();
        spec.base.workers = 2;
        const auto b = run_experiment(spec);
        REQUIRE(a.files.size() == 3);
        for (std::size_t i = 0; i < a.files.size(); ++i)
            CHECK(read_file(a.files[i]) == read_file(b.files[i]));
        const std::string sweep = read_file(a.files[2]);
        CHECK(sweep.find("point,utility,replicas,") == 0);
        CHECK(sweep.find("\n1,common,3,") != std::string::npos);
        const json summary = json::parse(read_file(a.files[0]));
        CHECK(summary["points"].size() == 2);
        CHECK(summary["points"][1]["assignment"]["utility"] == "common");
        CHECK(summary["points"][0]["replica_summaries"].size() == 3);
    }

    TEST_CASE("command line interface")
    {
        const auto dir = scratch_dir("cli");
        std::ofstream(dir / "tiny.json") << R"({"num_bns": 2, "horizon": 1, "replicas": 1, "emit": ["slots_csv"]})";
        std::ofstream(dir / "bad.json") << R"({"num_antennas": 0})";
        const std::string tiny = (dir / "tiny.json").string();
        CHECK(run_cli("--seed 3 --out " + (dir / "a").string() + " run " + tiny) == 0);
        CHECK(run_cli("--seed 3 --out " + (dir / "b").string() + " run " + tiny) == 0);
        CHECK(read_file(dir / "a" / "slots.csv") == read_file(dir / "b" / "slots.csv"));
        CHECK(run_cli("--seed 4 --out " + (dir / "c").string() + " run " + tiny) == 0);
        CHECK(read_file(dir / "a" / "slots.csv") != read_file(dir / "c" / "slots.csv"));
        CHECK(run_cli("run " + (dir / "bad.json").string()) == 2);
        CHECK(run_cli("run " + (dir / "missing.json").string()) == 2);
        CHECK(run_cli("verify no_such_suite") != 0);
        CHECK(run_cli("preset no_such_preset") != 0);
        CHECK(run_cli("--replicas 1 --out " + (dir / "p").string() +
                      " preset fig8_fairness --override horizon=5") == 0);
        CHECK(std::filesystem::exists(dir / "p" / "sweep.csv"));
        CHECK(run_cli("") != 0);
    }
}
