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

#include "bsched/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

namespace bsched {

std::string_view to_string(Controller c)
{
    return c == Controller::Mdpp ? "mdpp" : "mrt_baseline";
}

Controller parse_controller(std::string_view name)
{
    if (name == "mdpp")
        return Controller::Mdpp;
    if (name == "mrt_baseline")
        return Controller::MrtBaseline;
    throw std::invalid_argument("unknown controller '" + std::string(name) + "'");
}

double GeometrySpec::outer_radius() const
{
    if (radius)
        return *radius;
    return annulus_outer_for_mean(inner_radius, average_distance.value_or(30.0));
}

void GeometrySpec::validate(int num_bns) const
{
    if (!distances.empty()) {
        if (static_cast<int>(distances.size()) != num_bns)
            throw std::invalid_argument("geometry: " + std::to_string(distances.size()) +
                                        " distances given for " + std::to_string(num_bns) + " BNs");
        for (double d : distances)
            if (!(d > 0.0))
                throw std::invalid_argument("geometry: distances must be positive");
        return;
    }
    if (ring_distance) {
        if (!(*ring_distance > 0.0))
            throw std::invalid_argument("geometry: ring_distance must be positive");
        return;
    }
    if (!(inner_radius >= 0.0))
        throw std::invalid_argument("geometry: inner_radius must be >= 0");
    if (radius && !(*radius > inner_radius))
        throw std::invalid_argument("geometry: radius must exceed inner_radius");
    if (!radius && !(average_distance.value_or(30.0) > inner_radius))
        throw std::invalid_argument("geometry: average_distance must exceed inner_radius");
}

Geometry GeometrySpec::realize(int num_bns, RandomStream& rng) const
{
    if (!distances.empty())
        return geometry_from_distances(distances, rng);
    if (ring_distance)
        return geometry_from_distances(std::vector<double>(num_bns, *ring_distance), rng);
    return draw_annulus_geometry(num_bns, inner_radius, outer_radius(), rng);
}

void NetworkConfig::validate() const
{
    if (num_bns < 1)
        throw std::invalid_argument("num_bns must be >= 1");
    if (num_antennas < 1)
        throw std::invalid_argument("num_antennas must be >= 1");
    if (channel.num_antennas != num_antennas)
        throw std::invalid_argument("channel antenna count disagrees with num_antennas");
    link.validate();
    channel.validate();
    geometry.validate(num_bns);
    scheduler.validate();
    admission.validate();
    if (horizon < 1)
        throw std::invalid_argument("horizon must be >= 1");
    if (replicas < 1)
        throw std::invalid_argument("replicas must be >= 1");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
        throw std::invalid_argument("warmup_fraction must lie in [0, 1)");
    if (workers < 0)
        throw std::invalid_argument("workers must be >= 0");
}

int NetworkConfig::warmup_slots() const
{
    return static_cast<int>(std::floor(warmup_fraction * horizon));
}

QueueLevels queue_step(const QueueLevels& Q, const Eigen::VectorXd& R, const Eigen::VectorXd& D)
{
    return (Q - R).cwiseMax(0.0) + D;
}

BeamformingDecision<double> mrt_baseline_decision(const ChannelState<double>& ch, double power_budget,
                                                  const LinkBudget& lb)
{
    BeamformingDecision<double> dec;
    dec.f = init_f<double>(Eigen::VectorXd::Ones(ch.num_bns()), ch, power_budget);
    dec.alpha = Eigen::VectorXd::Constant(ch.num_bns(), lb.alpha_max);
    dec.g = update_g(ch, dec, lb);
    return dec;
}

RunResult run(const NetworkConfig& cfg, int replica, bool keep_slots,
              const std::function<void(const SlotMetrics&)>& slot_sink)
{
    cfg.validate();
    const int N = cfg.num_bns;
    const int T = cfg.horizon;
    const int warmup = cfg.warmup_slots();
    const double V = cfg.admission.v_param;
    const double queue_cap = V + cfg.admission.d_max;

    RandomStream rng(cfg.seed + static_cast<std::uint64_t>(replica));
    RunResult out;
    RunSummary& s = out.summary;
    s.geometry = cfg.geometry.realize(N, rng);
    const ChannelModel<double> model(s.geometry, cfg.channel);

    s.per_bn_throughput = Eigen::VectorXd::Zero(N);
    s.per_bn_throughput_windowed = Eigen::VectorXd::Zero(N);
    s.per_bn_admitted = Eigen::VectorXd::Zero(N);
    s.per_bn_energy = Eigen::VectorXd::Zero(N);

    QueueLevels Q = QueueLevels::Zero(N);
    double utility_sum = 0.0, utility_sum_w = 0.0, queue_sum = 0.0, queue_sum_w = 0.0;
    long long iteration_sum = 0;
    int converged = 0;
    if (keep_slots)
        out.slots.reserve(T);

    for (int t = 0; t < T; ++t) {
        const ChannelState<double> ch = model.draw(rng);

        SlotMetrics m;
        m.slot = t;
        BeamformingDecision<double> dec;
        if (cfg.controller == Controller::Mdpp) {
            ScheduleResult<double> res = schedule_slot<double>(Q, ch, cfg.scheduler, cfg.link);
            if (!is_monotone(res.objective_trace)) {
                std::ostringstream msg;
                msg << "scheduler objective decreased in slot " << t << " of replica " << replica;
                throw InvariantViolation(msg.str());
            }
            m.scheduler_iterations = res.iterations;
            converged += res.converged ? 1 : 0;
            dec = std::move(res.decision);
        } else {
            dec = mrt_baseline_decision(ch, cfg.scheduler.power_budget, cfg.link);
            converged += 1;
        }

        const Eigen::VectorXd sinrs = sinr_all(ch, dec, cfg.link);
        m.rates.resize(N);
        for (int n = 0; n < N; ++n)
            m.rates(n) = link_rate(sinrs(n), cfg.scheduler.rate_model, cfg.link);
        m.admissions = admit(Q, cfg.admission);
        m.served = Q.cwiseMin(m.rates);
        m.received_energy = received_energy_all(ch, dec);
        m.utility_value = utility_value(m.admissions, cfg.admission.utility);
        m.lyapunov = 0.5 * Q.squaredNorm();
        m.dpp_service = -Q.dot(m.rates);
        m.dpp_admission = Q.dot(m.admissions);
        m.dpp_penalty = -V * m.utility_value;

        Q = queue_step(Q, m.rates, m.admissions);
        m.queues_after = Q;

        if (cfg.controller == Controller::Mdpp && Q.maxCoeff() > queue_cap) {
            std::ostringstream msg;
            msg << "queue bound V + D_max = " << queue_cap << " exceeded in slot " << t << " of replica "
                << replica << " (max queue " << Q.maxCoeff() << ")";
            throw InvariantViolation(msg.str());
        }

        s.max_queue_seen = std::max(s.max_queue_seen, Q.maxCoeff());
        s.max_rate_seen = std::max(s.max_rate_seen, m.rates.maxCoeff());
        s.per_bn_throughput += m.served;
        s.per_bn_admitted += m.admissions;
        s.per_bn_energy += m.received_energy;
        s.total_admitted += m.admissions.sum();
        s.total_served += m.served.sum();
        utility_sum += m.utility_value;
        queue_sum += Q.mean();
        iteration_sum += m.scheduler_iterations;
        if (t >= warmup) {
            s.per_bn_throughput_windowed += m.served;
            utility_sum_w += m.utility_value;
            queue_sum_w += Q.mean();
        }

        if (slot_sink)
            slot_sink(m);
        if (keep_slots)
            out.slots.push_back(std::move(m));
    }

    const double Tw = static_cast<double>(T - warmup);
    s.avg_utility = utility_sum / T;
    s.avg_utility_windowed = utility_sum_w / Tw;
    s.avg_queue = queue_sum / T;
    s.avg_queue_windowed = queue_sum_w / Tw;
    s.per_bn_throughput /= T;
    s.per_bn_throughput_windowed /= Tw;
    s.per_bn_admitted /= T;
    s.per_bn_energy /= T;
    s.mean_iterations = static_cast<double>(iteration_sum) / T;
    s.converged_fraction = static_cast<double>(converged) / T;
    s.final_backlog = Q.sum();
    s.b_constant = 0.5 * N * (s.max_rate_seen * s.max_rate_seen + cfg.admission.d_max * cfg.admission.d_max);
    return out;
}

std::vector<RunResult> run_replicas(const NetworkConfig& cfg, bool keep_slots)
{
    cfg.validate();
    std::vector<RunResult> results(cfg.replicas);
    int workers = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, cfg.replicas);

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int r = next++; r < cfg.replicas; r = next++) {
            try {
                results[r] = run(cfg, r, keep_slots);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = cfg.replicas;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

Stat mean_and_se(const std::vector<double>& xs)
{
    Stat st;
    if (xs.empty())
        return st;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    st.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs)
            ss += (x - st.mean) * (x - st.mean);
        const double var = ss / static_cast<double>(xs.size() - 1);
        st.se = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return st;
}

AggregateSummary aggregate(const std::vector<RunSummary>& runs)
{
    AggregateSummary a;
    a.replicas = static_cast<int>(runs.size());
    if (runs.empty())
        return a;
    auto collect = [&](auto field) {
        std::vector<double> xs;
        xs.reserve(runs.size());
        for (const RunSummary& r : runs)
            xs.push_back(field(r));
        return mean_and_se(xs);
    };
    a.avg_utility = collect([](const RunSummary& r) { return r.avg_utility; });
    a.avg_utility_windowed = collect([](const RunSummary& r) { return r.avg_utility_windowed; });
    a.avg_queue = collect([](const RunSummary& r) { return r.avg_queue; });
    a.sum_throughput = collect([](const RunSummary& r) { return r.per_bn_throughput.sum(); });
    a.sum_throughput_windowed = collect([](const RunSummary& r) { return r.per_bn_throughput_windowed.sum(); });
    a.mean_iterations = collect([](const RunSummary& r) { return r.mean_iterations; });
    a.per_bn_throughput = Eigen::VectorXd::Zero(runs.front().per_bn_throughput.size());
    a.per_bn_throughput_windowed = Eigen::VectorXd::Zero(runs.front().per_bn_throughput.size());
    a.per_bn_energy = Eigen::VectorXd::Zero(runs.front().per_bn_energy.size());
    double conv = 0.0;
    for (const RunSummary& r : runs) {
        a.per_bn_throughput += r.per_bn_throughput;
        a.per_bn_throughput_windowed += r.per_bn_throughput_windowed;
        a.per_bn_energy += r.per_bn_energy;
        a.max_queue_seen = std::max(a.max_queue_seen, r.max_queue_seen);
        conv += r.converged_fraction;
    }
    a.per_bn_throughput /= static_cast<double>(runs.size());
    a.per_bn_throughput_windowed /= static_cast<double>(runs.size());
    a.per_bn_energy /= static_cast<double>(runs.size());
    a.converged_fraction = conv / static_cast<double>(runs.size());
    return a;
}

} // namespace bsched
