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

#ifndef BSCHED_SIM_HPP
#define BSCHED_SIM_HPP

#include "bsched/admission.hpp"
#include "bsched/channel.hpp"
#include "bsched/phy.hpp"
#include "bsched/scheduler.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace bsched {

enum class Controller { Mdpp, MrtBaseline };

std::string_view to_string(Controller c);
Controller parse_controller(std::string_view name);

/// Thrown when a run breaks a guaranteed property (queue bound, monotone scheduler trace).
class InvariantViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// How BN positions are produced for a replica.
///
/// Explicit distances win, then a common ring distance; otherwise BNs are
/// spread uniformly over the area of the annulus [inner_radius, outer], where
/// outer is either `radius` or chosen so that the mean distance equals
/// `average_distance`.
struct GeometrySpec {
    std::vector<double> distances;
    std::optional<double> ring_distance;
    std::optional<double> average_distance = 30.0;
    std::optional<double> radius;
    double inner_radius = 1.0;

    Geometry realize(int num_bns, RandomStream& rng) const;
    double outer_radius() const;
    void validate(int num_bns) const;
};

struct NetworkConfig {
    int num_bns = 5;
    int num_antennas = 5;
    LinkBudget link;
    ChannelParams channel;
    GeometrySpec geometry;
    SchedulerConfig scheduler;
    AdmissionConfig admission;
    int horizon = 1000;
    std::uint64_t seed = 1;
    int replicas = 20;
    Controller controller = Controller::Mdpp;
    double warmup_fraction = 0.1;
    int workers = 0;  // 0: one per hardware thread

    void validate() const;
    int warmup_slots() const;
};

struct SlotMetrics {
    int slot = 0;
    Eigen::VectorXd rates;
    Eigen::VectorXd admissions;
    Eigen::VectorXd served;
    Eigen::VectorXd queues_after;
    double utility_value = 0.0;
    Eigen::VectorXd received_energy;
    int scheduler_iterations = 0;
    double lyapunov = 0.0;        // 1/2 sum Q_n(t)^2 before the slot
    double dpp_service = 0.0;      // -sum Q_n R_n
    double dpp_admission = 0.0;    //  sum Q_n D_n
    double dpp_penalty = 0.0;      // -V U(D)
};

struct RunSummary {
    double avg_utility = 0.0;
    double avg_utility_windowed = 0.0;
    double avg_queue = 0.0;
    double avg_queue_windowed = 0.0;
    Eigen::VectorXd per_bn_throughput;
    Eigen::VectorXd per_bn_throughput_windowed;
    Eigen::VectorXd per_bn_admitted;
    Eigen::VectorXd per_bn_energy;
    double max_queue_seen = 0.0;
    double max_rate_seen = 0.0;
    double b_constant = 0.0;  // N/2 (R_max^2 + D_max^2) with the observed R_max
    double mean_iterations = 0.0;
    double converged_fraction = 0.0;
    double total_admitted = 0.0;
    double total_served = 0.0;
    double final_backlog = 0.0;
    Geometry geometry;
};

struct RunResult {
    RunSummary summary;
    std::vector<SlotMetrics> slots;
};

/// Q' = max(Q - R, 0) + D, elementwise.
QueueLevels queue_step(const QueueLevels& Q, const Eigen::VectorXd& R, const Eigen::VectorXd& D);

/// Sum-of-channels MRT transmit beam, alpha_max everywhere and MMSE receive beams.
BeamformingDecision<double> mrt_baseline_decision(const ChannelState<double>& ch, double power_budget,
                                                  const LinkBudget& lb);

/// Runs one replica (seed = cfg.seed + replica). slot_sink, when given, sees every slot.
RunResult run(const NetworkConfig& cfg, int replica = 0, bool keep_slots = false,
              const std::function<void(const SlotMetrics&)>& slot_sink = {});

/// Runs cfg.replicas independent replicas on a worker pool; results ordered by replica.
std::vector<RunResult> run_replicas(const NetworkConfig& cfg, bool keep_slots = false);

struct Stat {
    double mean = 0.0;
    double se = 0.0;
};

Stat mean_and_se(const std::vector<double>& xs);

struct AggregateSummary {
    int replicas = 0;
    Stat avg_utility;
    Stat avg_utility_windowed;
    Stat avg_queue;
    Stat sum_throughput;
    Stat sum_throughput_windowed;
    Stat mean_iterations;
    Eigen::VectorXd per_bn_throughput;
    Eigen::VectorXd per_bn_throughput_windowed;
    Eigen::VectorXd per_bn_energy;
    double max_queue_seen = 0.0;
    double converged_fraction = 0.0;
};

AggregateSummary aggregate(const std::vector<RunSummary>& runs);

} // namespace bsched

#endif // BSCHED_SIM_HPP
