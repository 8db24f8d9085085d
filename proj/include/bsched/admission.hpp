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

#ifndef BSCHED_ADMISSION_HPP
#define BSCHED_ADMISSION_HPP

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace bsched {

enum class Utility { Sum, Proportional, Common };

std::string_view to_string(Utility u);
Utility parse_utility(std::string_view name);

struct AdmissionConfig {
    Utility utility = Utility::Sum;
    double v_param = 1e5;  // V
    double d_max = 3e4;    // D_max [bits per slot]

    void validate() const;
};

/// Buffered bits per BN.
using QueueLevels = Eigen::VectorXd;

/// D_n = D_max while Q_n <= V, otherwise nothing.
Eigen::VectorXd admit_sum(const QueueLevels& Q, const AdmissionConfig& cfg);

/// Shared admission: every BN admits D_max while sum_n Q_n <= V.
Eigen::VectorXd admit_common(const QueueLevels& Q, const AdmissionConfig& cfg);

/// D_n = D_max up to V / (1 + D_max), then V / Q_n - 1, and zero from V on.
Eigen::VectorXd admit_proportional(const QueueLevels& Q, const AdmissionConfig& cfg);

/// Dispatches on cfg.utility.
Eigen::VectorXd admit(const QueueLevels& Q, const AdmissionConfig& cfg);

/// U(D): sum, sum of natural logs of (1 + D_n), or minimum.
double utility_value(const Eigen::VectorXd& D, Utility utility);

/// sum_n Q_n D_n - V U(D), the per-slot admission cost.
double admission_objective(const QueueLevels& Q, const Eigen::VectorXd& D, const AdmissionConfig& cfg);

/// Grid search over [0, D_max] with grid_points values per dimension.
///
/// Sum and proportional costs separate per BN and are searched coordinate-wise;
/// the common cost is searched over a shared admission level.
Eigen::VectorXd admission_oracle(const QueueLevels& Q, const AdmissionConfig& cfg, int grid_points);

/// Exhaustive search over the full product grid (grid_points^N evaluations); test use only.
Eigen::VectorXd admission_oracle_joint(const QueueLevels& Q, const AdmissionConfig& cfg, int grid_points);

} // namespace bsched

#endif // BSCHED_ADMISSION_HPP
