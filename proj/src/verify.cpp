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

#include "bsched/verify.hpp"

#include "bsched/admission.hpp"
#include "bsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bsched {

namespace {

/// Accumulates one property over many trials, keeping the worst observed value.
class Property {
  public:
    explicit Property(std::string name) : name_(std::move(name)) {}

    void check(bool ok, double measure = 0.0)
    {
        ++trials_;
        if (!ok)
            ++failures_;
        worst_ = std::max(worst_, measure);
    }

    PropertyOutcome outcome(const std::string& measure_label = "worst") const
    {
        std::ostringstream detail;
        detail << failures_ << "/" << trials_ << " failures";
        if (!measure_label.empty())
            detail << ", " << measure_label << " " << worst_;
        return {name_, failures_ == 0 && trials_ > 0, detail.str()};
    }

  private:
    std::string name_;
    long trials_ = 0;
    long failures_ = 0;
    double worst_ = 0.0;
};

double rel_diff(double a, double b)
{
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

std::vector<PropertyOutcome> transforms_suite()
{
    RandomStream rng(20240601);
    Property lagrangian_check("lagrangian transform at gamma* equals weighted rate");
    Property quadratic_check("quadratic transform at y* equals lagrangian value");
    Property gamma_stat("gamma* is a local maximizer of the lagrangian surrogate");
    Property y_stat("y* is a local maximizer of the quadratic surrogate");
    for (int trial = 0; trial < 1000; ++trial) {
        const int M = 2 + static_cast<int>(rng.uniform() * 7);
        const int N = 2 + static_cast<int>(rng.uniform() * 7);
        const RandomInstance inst = random_instance(rng, M, N);
        const Eigen::VectorXd gamma = update_gamma(inst.ch, inst.dec, inst.lb);
        const double direct = weighted_rate(inst.Q, gamma, inst.lb);
        const double lag = lagrangian_objective(inst.ch, inst.dec, inst.Q, gamma, inst.lb);
        const double e2 = rel_diff(lag, direct);
        lagrangian_check.check(e2 <= 1e-9, e2);

        const CVector<double> y = update_y(inst.ch, inst.dec, inst.Q, gamma, inst.lb);
        const double quad = quadratic_objective(inst.ch, inst.dec, inst.Q, gamma, y, inst.lb);
        const double e3 = rel_diff(quad, lag);
        quadratic_check.check(e3 <= 1e-9, e3);

        const double slack = 1e-12 * std::abs(lag);
        for (int n = 0; n < N; ++n) {
            for (double step : {1e-4, -1e-4}) {
                Eigen::VectorXd g2 = gamma;
                g2(n) = std::max(0.0, g2(n) + step);
                const double v = lagrangian_objective(inst.ch, inst.dec, inst.Q, g2, inst.lb);
                gamma_stat.check(v <= lag + slack, std::max(0.0, v - lag) / std::max(std::abs(lag), 1e-300));
            }
            const double scale = std::max(std::abs(y(n)), 1e-300) * 1e-4;
            for (std::complex<double> step : {std::complex<double>(scale, 0), std::complex<double>(-scale, 0),
                                              std::complex<double>(0, scale), std::complex<double>(0, -scale)}) {
                CVector<double> y2 = y;
                y2(n) += step;
                const double v = quadratic_objective(inst.ch, inst.dec, inst.Q, gamma, y2, inst.lb);
                y_stat.check(v <= quad + slack, std::max(0.0, v - quad) / std::max(std::abs(quad), 1e-300));
            }
        }
    }
    return {lagrangian_check.outcome("worst relative error"), quadratic_check.outcome("worst relative error"),
            gamma_stat.outcome("worst relative gain"), y_stat.outcome("worst relative gain")};
}

std::vector<PropertyOutcome> admission_suite()
{
    RandomStream rng(20240602);
    std::vector<PropertyOutcome> out;
    constexpr int grid = 2001;
    for (Utility u : {Utility::Sum, Utility::Proportional, Utility::Common}) {
        const std::string tag(to_string(u));
        Property dominance(tag + ": closed form is no worse than the grid oracle");
        Property resolution(tag + ": grid oracle is within grid resolution of the closed form");
        Property cutoff(tag + ": no admission once the queue reaches V");
        for (int trial = 0; trial < 1000; ++trial) {
            const int N = 1 + static_cast<int>(rng.uniform() * 4);
            AdmissionConfig cfg;
            cfg.utility = u;
            cfg.v_param = std::pow(10.0, rng.uniform(1.0, 6.0));
            cfg.d_max = std::pow(10.0, rng.uniform(0.0, 4.5));
            Eigen::VectorXd Q(N);
            for (int n = 0; n < N; ++n)
                Q(n) = rng.uniform(0.0, (u == Utility::Common ? 2.0 / N : 2.0) * cfg.v_param);
            const Eigen::VectorXd D = admit(Q, cfg);
            const Eigen::VectorXd Dg = admission_oracle(Q, cfg, grid);
            const double closed = admission_objective(Q, D, cfg);
            const double oracle = admission_objective(Q, Dg, cfg);
            const double h = cfg.d_max / (grid - 1);
            const double scale = (Q.sum() + N * cfg.v_param) * cfg.d_max;
            dominance.check(closed <= oracle + 1e-12 * scale, std::max(0.0, closed - oracle) / scale);
            const double slack = h * (Q.sum() + N * cfg.v_param);
            resolution.check(oracle - closed <= slack, (oracle - closed) / slack);
            if (u == Utility::Common) {
                cutoff.check(Q.sum() <= cfg.v_param || D.isZero(0.0));
            } else {
                for (int n = 0; n < N; ++n)
                    cutoff.check(Q(n) < cfg.v_param || D(n) == 0.0 || (u == Utility::Sum && Q(n) == cfg.v_param));
            }
        }
        out.push_back(dominance.outcome("worst relative excess"));
        out.push_back(resolution.outcome("worst fraction of slack"));
        out.push_back(cutoff.outcome(""));
    }

    Property equal("common: all admissions identical");
    Property lipschitz("utilities are 1-Lipschitz from below on ordered pairs");
    for (int trial = 0; trial < 1000; ++trial) {
        const int N = 1 + static_cast<int>(rng.uniform() * 6);
        AdmissionConfig cfg;
        cfg.utility = Utility::Common;
        Eigen::VectorXd Q(N), D0(N), D1(N);
        for (int n = 0; n < N; ++n) {
            Q(n) = rng.uniform(0.0, 0.5 * cfg.v_param);
            D0(n) = rng.uniform(0.0, cfg.d_max);
            D1(n) = D0(n) + rng.uniform(0.0, cfg.d_max);
        }
        const Eigen::VectorXd D = admit_common(Q, cfg);
        equal.check((D.array() == D(0)).all());
        for (Utility u : {Utility::Sum, Utility::Proportional, Utility::Common}) {
            const double gap = utility_value(D1, u) - utility_value(D0, u) - (D1 - D0).sum();
            lipschitz.check(gap <= 1e-9 * std::max(1.0, (D1 - D0).sum()), std::max(0.0, gap));
        }
    }
    out.push_back(equal.outcome(""));
    out.push_back(lipschitz.outcome("worst excess"));
    return out;
}

std::vector<PropertyOutcome> scheduler_suite()
{
    RandomStream rng(20240603);
    Property monotone("objective trace nondecreasing within 1e-9 relative");
    Property feasible("every decision is feasible");
    Property converged("at least 99% of slots converge before it_max");
    int converged_count = 0;
    const int slots = 2000;
    for (int trial = 0; trial < slots; ++trial) {
        const int M = 2 + static_cast<int>(rng.uniform() * 7);
        const int N = 2 + static_cast<int>(rng.uniform() * 7);
        const RandomInstance inst = random_instance(rng, M, N);
        const ScheduleResult<double> r = schedule_slot<double>(inst.Q, inst.ch, inst.cfg, inst.lb);
        monotone.check(is_monotone(r.objective_trace, 1e-9));
        const auto& d = r.decision;
        const bool ok = d.f.squaredNorm() <= inst.cfg.power_budget * (1 + 1e-9) && (d.alpha.array() >= 0).all() &&
                        (d.alpha.array() <= inst.lb.alpha_max).all() &&
                        ((d.g.colwise().norm().array() - 1.0).abs() <= 1e-9).all();
        feasible.check(ok);
        converged_count += r.converged ? 1 : 0;
    }
    converged.check(converged_count >= 0.99 * slots, static_cast<double>(converged_count) / slots);

    Property receive("receive beamformer beats 1e5 random unit vectors (M=N=2)");
    for (int trial = 0; trial < 20; ++trial) {
        RandomInstance inst = random_instance(rng, 2, 2);
        inst.dec.g = update_g(inst.ch, inst.dec, inst.lb);
        const Eigen::VectorXd opt = sinr_all(inst.ch, inst.dec, inst.lb);
        for (int n = 0; n < 2; ++n) {
            double best = 0.0;
            BeamformingDecision<double> probe = inst.dec;
            for (int s = 0; s < 100000; ++s) {
                probe.g.col(n) = random_unit_vector(rng, 2);
                best = std::max(best, sinr_all(inst.ch, probe, inst.lb)(n));
            }
            receive.check(opt(n) >= best * (1 - 1e-3), std::max(0.0, best - opt(n)) / best);
        }
    }

    Property mrt_align("single BN: f aligns with conj(h) within 1e-3 rad");
    Property mrt_alpha("single BN: alpha equals alpha_max");
    Property mrt_rate("single BN: rate matches the closed form within 0.1%");
    for (int trial = 0; trial < 50; ++trial) {
        const int M = 1 + static_cast<int>(rng.uniform() * 8);
        RandomInstance inst = random_instance(rng, M, 1);
        inst.Q(0) = rng.uniform(1.0, 1e5);
        const ScheduleResult<double> r = schedule_slot<double>(inst.Q, inst.ch, inst.cfg, inst.lb);
        const CVector<double> h = inst.ch.h.col(0);
        const double cosang = std::abs(h.conjugate().dot(r.decision.f)) / (h.norm() * r.decision.f.norm());
        const double angle = std::acos(std::min(1.0, cosang));
        mrt_align.check(angle <= 1e-3, angle);
        mrt_alpha.check(r.decision.alpha(0) == inst.lb.alpha_max);
        const double a = inst.lb.alpha_max;
        const double closed = inst.Q(0) * shannon_rate(a * a * std::pow(h.squaredNorm(), 2) *
                                                           inst.cfg.power_budget / inst.lb.noise_power,
                                                       inst.lb);
        const double e = rel_diff(r.objective, closed);
        mrt_rate.check(e <= 1e-3, e);
    }
    return {monotone.outcome(""),
            feasible.outcome(""),
            converged.outcome("converged fraction"),
            receive.outcome("worst relative shortfall"),
            mrt_align.outcome("worst angle"),
            mrt_alpha.outcome(""),
            mrt_rate.outcome("worst relative error")};
}

std::vector<PropertyOutcome> queue_bounds_suite()
{
    Property bound("every queue stays within V + D_max");
    Property flow("admitted bits equal served bits plus final backlog");
    for (Utility u : {Utility::Sum, Utility::Proportional, Utility::Common}) {
        for (int seed = 1; seed <= 10; ++seed) {
            NetworkConfig cfg;
            cfg.admission.utility = u;
            cfg.admission.v_param = 1e5;
            cfg.seed = static_cast<std::uint64_t>(seed);
            cfg.replicas = 1;
            const double limit = cfg.admission.v_param + cfg.admission.d_max;
            double worst = 0.0;
            bool ok = true;
            RunResult r;
            try {
                r = run(cfg, 0, false, [&](const SlotMetrics& m) {
                    worst = std::max(worst, m.queues_after.maxCoeff());
                    ok = ok && (m.queues_after.array() <= limit).all();
                });
            } catch (const InvariantViolation&) {
                ok = false;
            }
            bound.check(ok, worst / limit);
            const RunSummary& s = r.summary;
            const double e = std::abs(s.total_admitted - s.total_served - s.final_backlog) /
                             std::max(1.0, s.total_admitted);
            flow.check(ok && e <= 1e-12, e);
        }
    }
    return {bound.outcome("worst fraction of V + D_max"), flow.outcome("worst relative imbalance")};
}

std::vector<PropertyOutcome> fbl_suite()
{
    RandomStream rng(20240605);
    LinkBudget lb;
    Property below("finite-blocklength rate never exceeds the Shannon rate");
    Property in_l("rate nondecreasing in blocklength");
    Property in_psi("rate nondecreasing in target error probability");
    Property unbounded("unbounded blocklength equals the Shannon rate exactly");
    for (int trial = 0; trial < 10000; ++trial) {
        const double s = std::pow(10.0, rng.uniform(-4.0, 4.0));
        const double psi = std::pow(10.0, rng.uniform(-6.0, -0.5));
        const double shannon = shannon_rate(s, lb);
        double prev = 0.0;
        for (double L : {10.0, 100.0, 1e3, 1e4, 1e5}) {
            const double r = fbl_rate(s, {L, psi}, lb);
            below.check(r <= shannon && r >= 0.0);
            in_l.check(r >= prev);
            prev = r;
            const double r2 = fbl_rate(s, {L, std::min(0.9, psi * 10)}, lb);
            in_psi.check(r2 >= r);
        }
        unbounded.check(fbl_rate(s, {std::nullopt, psi}, lb) == shannon && link_rate(s, {}, lb) == shannon);
    }

    Property run_exact("run with unbounded blocklength reproduces the Shannon run bit for bit");
    NetworkConfig a;
    a.horizon = 50;
    a.admission.utility = Utility::Common;
    NetworkConfig b = a;
    b.scheduler.rate_model.error_prob = 0.2;
    const RunResult ra = run(a, 0, true);
    const RunResult rb = run(b, 0, true);
    bool same = ra.slots.size() == rb.slots.size();
    for (std::size_t t = 0; same && t < ra.slots.size(); ++t)
        same = ra.slots[t].rates == rb.slots[t].rates && ra.slots[t].queues_after == rb.slots[t].queues_after;
    run_exact.check(same && ra.summary.avg_utility == rb.summary.avg_utility);
    return {below.outcome(""), in_l.outcome(""), in_psi.outcome(""), unbounded.outcome(""), run_exact.outcome("")};
}

} // namespace

CVector<double> random_unit_vector(RandomStream& rng, int M)
{
    CVector<double> v(M);
    for (int m = 0; m < M; ++m)
        v(m) = rng.complex_normal();
    const double n = v.norm();
    return n > 0.0 ? CVector<double>(v / n) : CVector<double>(CVector<double>::Unit(M, 0));
}

RandomInstance random_instance(RandomStream& rng, int num_antennas, int num_bns, double q_max)
{
    RandomInstance inst;
    ChannelParams params;
    params.num_antennas = num_antennas;
    Geometry geom;
    for (int n = 0; n < num_bns; ++n) {
        geom.distances.push_back(rng.uniform(5.0, 50.0));
        geom.angles.push_back(rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2));
    }
    inst.ch = draw_channel<double>(geom, params, rng);
    const double P = inst.cfg.power_budget;
    inst.dec.f = random_unit_vector(rng, num_antennas) * std::sqrt(P * rng.uniform(0.25, 1.0));
    inst.dec.g.resize(num_antennas, num_bns);
    for (int n = 0; n < num_bns; ++n)
        inst.dec.g.col(n) = random_unit_vector(rng, num_antennas);
    inst.dec.alpha.resize(num_bns);
    inst.Q.resize(num_bns);
    for (int n = 0; n < num_bns; ++n) {
        inst.dec.alpha(n) = rng.uniform(0.0, inst.lb.alpha_max);
        inst.Q(n) = rng.uniform(0.0, q_max);
    }
    return inst;
}

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = {"transforms", "admission_oracle", "scheduler_oracle",
                                                   "queue_bounds", "fbl"};
    return names;
}

std::vector<PropertyOutcome> run_suite(std::string_view suite)
{
    if (suite == "transforms")
        return transforms_suite();
    if (suite == "admission_oracle")
        return admission_suite();
    if (suite == "scheduler_oracle")
        return scheduler_suite();
    if (suite == "queue_bounds")
        return queue_bounds_suite();
    if (suite == "fbl")
        return fbl_suite();
    throw std::invalid_argument("unknown suite '" + std::string(suite) + "'");
}

bool report(const std::vector<PropertyOutcome>& outcomes, std::ostream& out)
{
    bool all = true;
    for (const PropertyOutcome& o : outcomes) {
        out << (o.passed ? "PASS " : "FAIL ") << o.name << ": " << o.detail << '\n';
        all = all && o.passed;
    }
    return all;
}

} // namespace bsched
