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

#include "bsched/admission.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bsched {

std::string_view to_string(Utility u)
{
    switch (u) {
    case Utility::Sum:
        return "sum";
    case Utility::Proportional:
        return "proportional";
    case Utility::Common:
        return "common";
    }
    return "unknown";
}

Utility parse_utility(std::string_view name)
{
    if (name == "sum")
        return Utility::Sum;
    if (name == "proportional")
        return Utility::Proportional;
    if (name == "common")
        return Utility::Common;
    throw std::invalid_argument("unknown utility '" + std::string(name) + "'");
}

void AdmissionConfig::validate() const
{
    if (!(v_param > 0.0))
        throw std::invalid_argument("admission: v_param must be > 0");
    if (!(d_max > 0.0))
        throw std::invalid_argument("admission: d_max must be > 0");
}

Eigen::VectorXd admit_sum(const QueueLevels& Q, const AdmissionConfig& cfg)
{
    return (Q.array() <= cfg.v_param).select(Eigen::VectorXd::Constant(Q.size(), cfg.d_max), 0.0);
}

Eigen::VectorXd admit_common(const QueueLevels& Q, const AdmissionConfig& cfg)
{
    const double level = Q.sum() <= cfg.v_param ? cfg.d_max : 0.0;
    return Eigen::VectorXd::Constant(Q.size(), level);
}

Eigen::VectorXd admit_proportional(const QueueLevels& Q, const AdmissionConfig& cfg)
{
    Eigen::VectorXd D(Q.size());
    const double full_below = cfg.v_param / (1.0 + cfg.d_max);
    for (Eigen::Index n = 0; n < Q.size(); ++n) {
        if (Q(n) <= full_below)
            D(n) = cfg.d_max;
        else if (Q(n) >= cfg.v_param)
            D(n) = 0.0;
        else
            D(n) = cfg.v_param / Q(n) - 1.0;
    }
    return D;
}

Eigen::VectorXd admit(const QueueLevels& Q, const AdmissionConfig& cfg)
{
    switch (cfg.utility) {
    case Utility::Sum:
        return admit_sum(Q, cfg);
    case Utility::Proportional:
        return admit_proportional(Q, cfg);
    case Utility::Common:
        return admit_common(Q, cfg);
    }
    throw std::logic_error("admit: unhandled utility");
}

double utility_value(const Eigen::VectorXd& D, Utility utility)
{
    switch (utility) {
    case Utility::Sum:
        return D.sum();
    case Utility::Proportional:
        return D.array().log1p().sum();
    case Utility::Common:
        return D.size() == 0 ? 0.0 : D.minCoeff();
    }
    throw std::logic_error("utility_value: unhandled utility");
}

double admission_objective(const QueueLevels& Q, const Eigen::VectorXd& D, const AdmissionConfig& cfg)
{
    return Q.dot(D) - cfg.v_param * utility_value(D, cfg.utility);
}

namespace {

double grid_value(int i, int grid_points, double d_max)
{
    return grid_points == 1 ? 0.0 : d_max * static_cast<double>(i) / static_cast<double>(grid_points - 1);
}

} // namespace

Eigen::VectorXd admission_oracle(const QueueLevels& Q, const AdmissionConfig& cfg, int grid_points)
{
    if (grid_points < 2)
        throw std::invalid_argument("admission_oracle: need at least two grid points");
    const Eigen::Index N = Q.size();
    Eigen::VectorXd best(N);
    if (cfg.utility == Utility::Common) {
        double best_cost = std::numeric_limits<double>::infinity();
        double best_level = 0.0;
        for (int i = 0; i < grid_points; ++i) {
            const double d = grid_value(i, grid_points, cfg.d_max);
            const double cost = d * Q.sum() - cfg.v_param * d;
            if (cost < best_cost) {
                best_cost = cost;
                best_level = d;
            }
        }
        best.setConstant(best_level);
        return best;
    }
    for (Eigen::Index n = 0; n < N; ++n) {
        double best_cost = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid_points; ++i) {
            const double d = grid_value(i, grid_points, cfg.d_max);
            const double gain = cfg.utility == Utility::Sum ? d : std::log1p(d);
            const double cost = Q(n) * d - cfg.v_param * gain;
            if (cost < best_cost) {
                best_cost = cost;
                best(n) = d;
            }
        }
    }
    return best;
}

Eigen::VectorXd admission_oracle_joint(const QueueLevels& Q, const AdmissionConfig& cfg, int grid_points)
{
    const Eigen::Index N = Q.size();
    if (N > 4)
        throw std::invalid_argument("admission_oracle_joint: at most 4 BNs");
    if (grid_points < 2)
        throw std::invalid_argument("admission_oracle_joint: need at least two grid points");
    Eigen::VectorXi idx = Eigen::VectorXi::Zero(N);
    Eigen::VectorXd D(N), best(N);
    double best_cost = std::numeric_limits<double>::infinity();
    for (;;) {
        for (Eigen::Index n = 0; n < N; ++n)
            D(n) = grid_value(idx(n), grid_points, cfg.d_max);
        const double cost = admission_objective(Q, D, cfg);
        if (cost < best_cost) {
            best_cost = cost;
            best = D;
        }
        Eigen::Index k = 0;
        while (k < N && ++idx(k) == grid_points)
            idx(k++) = 0;
        if (k == N)
            break;
    }
    return best;
}

} // namespace bsched
