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

#ifndef BSCHED_CONFIG_HPP
#define BSCHED_CONFIG_HPP

#include "bsched/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bsched {

/// Configuration problem; field() names the offending key path ("" for syntax errors).
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

enum class EmitKind { SummaryJson, SlotsCsv, SweepCsv };

struct SweepAxis {
    std::string param;  // dotted key path, e.g. "v_param" or "geometry.radius"
    std::vector<nlohmann::json> values;
};

struct ExperimentSpec {
    std::string name = "run";
    nlohmann::json base_document = nlohmann::json::object();  // network keys only
    NetworkConfig base;
    std::vector<SweepAxis> sweep;
    std::string output_dir = "out";
    std::set<EmitKind> emit = {EmitKind::SummaryJson, EmitKind::SlotsCsv, EmitKind::SweepCsv};
};

struct SweepPoint {
    std::vector<std::pair<std::string, nlohmann::json>> assignment;
    nlohmann::json document;
    NetworkConfig config;
};

/// Builds a validated NetworkConfig from network keys; absent keys take the defaults.
NetworkConfig parse_network_config(const nlohmann::json& doc);

/// Inverse of parse_network_config: the document that reproduces cfg.
nlohmann::json network_config_to_json(const NetworkConfig& cfg);

/// Parses a full experiment document (network keys plus sweep/output_dir/emit/name).
ExperimentSpec parse_experiment(const nlohmann::json& doc);

/// Parses JSON text; syntax errors report line and column.
ExperimentSpec parse_experiment_text(std::string_view text);

ExperimentSpec load_config(const std::filesystem::path& path);

/// Applies "key=value" (value parsed as JSON, else taken as a string) to the base config.
void apply_override(ExperimentSpec& spec, std::string_view assignment);

/// Cartesian product of the sweep axes, each point validated.
std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec);

const std::vector<std::string>& preset_names();

/// Named scenario reproducing one of the evaluation figures at desk scale.
ExperimentSpec preset(std::string_view name);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

} // namespace bsched

#endif // BSCHED_CONFIG_HPP
