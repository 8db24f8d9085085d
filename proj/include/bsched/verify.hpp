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

#ifndef BSCHED_VERIFY_HPP
#define BSCHED_VERIFY_HPP

#include "bsched/channel.hpp"
#include "bsched/phy.hpp"
#include "bsched/scheduler.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bsched {

/// A random link-scheduling instance under Table-1 link parameters.
struct RandomInstance {
    ChannelState<double> ch;
    BeamformingDecision<double> dec;  // feasible: ||f||^2 <= P, unit-norm g_n, alpha in [0, alpha_max]
    Eigen::VectorXd Q;
    LinkBudget lb;
    SchedulerConfig cfg;
};

/// BNs at distances uniform in [5, 50] m; Q_n uniform in [0, q_max].
RandomInstance random_instance(RandomStream& rng, int num_antennas, int num_bns, double q_max = 1e5);

/// Uniformly distributed unit vector in C^M.
CVector<double> random_unit_vector(RandomStream& rng, int M);

struct PropertyOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

const std::vector<std::string>& suite_names();

/// Runs one named property suite with fixed seeds. Throws std::invalid_argument for unknown names.
std::vector<PropertyOutcome> run_suite(std::string_view suite);

/// Prints one "PASS|FAIL name: detail" line per outcome; returns true when all passed.
bool report(const std::vector<PropertyOutcome>& outcomes, std::ostream& out);

} // namespace bsched

#endif // BSCHED_VERIFY_HPP
