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

#ifndef BSCHED_EXPERIMENT_HPP
#define BSCHED_EXPERIMENT_HPP

#include "bsched/config.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace bsched {

struct PointResult {
    SweepPoint point;
    std::vector<RunResult> runs;  // ordered by replica
    AggregateSummary aggregate;
};

struct ExperimentResult {
    std::vector<PointResult> points;
    std::vector<std::filesystem::path> files;  // files written, in emit order
};

/// Shortest round-trip decimal form; integral values print without a fraction.
std::string format_number(double x);

/// Column order of slots.csv. One row per (point, replica, slot, bn).
const std::vector<std::string>& slots_csv_columns();

void write_slots_csv(std::ostream& out, const std::vector<PointResult>& points);
void write_sweep_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<PointResult>& points);
nlohmann::json summary_json(const ExperimentSpec& spec, const std::vector<PointResult>& points);

/// Runs every sweep point and replica without touching the filesystem.
std::vector<PointResult> simulate_experiment(const ExperimentSpec& spec);

/// Runs the experiment and writes the emitted files into spec.output_dir.
/// InvariantViolation from any replica propagates after all workers stop.
ExperimentResult run_experiment(const ExperimentSpec& spec);

} // namespace bsched

#endif // BSCHED_EXPERIMENT_HPP
