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

#include "bsched/experiment.hpp"
#include "bsched/verify.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

int run_spec(bsched::ExperimentSpec spec, const std::optional<std::uint64_t>& seed, const std::optional<int>& replicas,
             const std::optional<std::string>& out_dir, const std::vector<std::string>& overrides)
{
    for (const std::string& o : overrides)
        bsched::apply_override(spec, o);
    if (seed)
        bsched::apply_override(spec, "seed=" + std::to_string(*seed));
    if (replicas)
        bsched::apply_override(spec, "replicas=" + std::to_string(*replicas));
    if (out_dir)
        spec.output_dir = *out_dir;

    const bsched::ExperimentResult result = bsched::run_experiment(spec);
    std::cout << spec.name << ": " << result.points.size() << " sweep point(s)\n";
    for (const auto& path : result.files)
        std::cout << "wrote " << path.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Online energy and data scheduling simulator for multi-antenna backscatter networks"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::optional<int> replicas;
    std::optional<std::string> out_dir;
    app.add_option("--seed", seed, "Base random seed (replica r uses seed + r)");
    app.add_option("--replicas", replicas, "Monte-Carlo replicas per sweep point")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory");

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a JSON configuration");
    run_cmd->add_option("config", config_path, "Path to the JSON configuration")->required();

    std::string preset_name;
    std::vector<std::string> overrides;
    auto* preset_cmd = app.add_subcommand("preset", "Run a named scenario preset");
    preset_cmd->add_option("name", preset_name, "Preset name")
        ->required()
        ->check(CLI::IsMember(bsched::preset_names()));
    preset_cmd->add_option("--override", overrides, "Override a configuration field, key=value")->take_all();

    std::string suite;
    auto* verify_cmd = app.add_subcommand("verify", "Run a property suite");
    verify_cmd->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(bsched::suite_names()));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd)
            return run_spec(bsched::load_config(config_path), seed, replicas, out_dir, {});
        if (*preset_cmd)
            return run_spec(bsched::preset(preset_name), seed, replicas, out_dir, overrides);
        if (*verify_cmd) {
            const bool ok = bsched::report(bsched::run_suite(suite), std::cout);
            std::cout << (ok ? "suite passed" : "suite FAILED") << '\n';
            return ok ? 0 : 1;
        }
    } catch (const bsched::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const bsched::InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
