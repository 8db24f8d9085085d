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

#ifndef BSCHED_SCHEDULER_HPP
#define BSCHED_SCHEDULER_HPP

// Per-slot link scheduling: maximize sum_n Q_n R_n over the transmit beamformer,
// the receive beamformers and the reflection coefficients by alternating
// closed-form updates on the Lagrangian-dual / quadratic-transform surrogate.

#include "bsched/channel.hpp"
#include "bsched/numkernel.hpp"
#include "bsched/phy.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bsched {

struct SchedulerConfig {
    double epsilon = 0.01;
    int it_max = 100;
    double power_budget = 0.5;  // P [W]
    double eta_tol = 1e-12;     // relative gap P - ||f||^2 accepted by the eta bisection
    FblParams rate_model;       // unbounded blocklength means Shannon rates

    void validate() const
    {
        if (!(epsilon > 0.0))
            throw std::invalid_argument("scheduler: epsilon must be > 0");
        if (it_max < 1)
            throw std::invalid_argument("scheduler: it_max must be >= 1");
        if (!(power_budget > 0.0))
            throw std::invalid_argument("scheduler: power_budget must be > 0");
        if (!(eta_tol > 0.0))
            throw std::invalid_argument("scheduler: eta_tol must be > 0");
        rate_model.validate();
    }
};

/// SINR surrogates gamma and quadratic-transform auxiliaries y.
template <typename Real = double>
struct AuxiliaryState {
    RVector<Real> gamma;
    CVector<Real> y;
};

/// Cascade coefficients of the current (f, G, alpha).
///
/// beta_{n,k}^T f = gain(n, k) * hf(k); zeta.col(n) = alpha_n (h_n^T f) h_n.
template <typename Real = double>
struct CascadeCoeffs {
    CMatrix<Real> gain;  // g_n^H h_k
    CVector<Real> hf;    // h_k^T f
    CMatrix<Real> zeta;

    Complex<Real> beta_f(Eigen::Index n, Eigen::Index k) const { return gain(n, k) * hf(k); }
};

template <typename Real = double>
struct TransmitUpdate {
    CVector<Real> f;
    Real eta = 0;
};

template <typename Real = double>
struct ScheduleResult {
    BeamformingDecision<Real> decision;
    Real objective = 0;          // sum_n Q_n R_n under the configured rate model
    int iterations = 0;
    bool converged = false;      // stopped on the epsilon criterion before it_max
    std::vector<Real> objective_trace;  // Shannon-weighted objective, entry 0 is the initial point
    std::vector<Real> model_trace;      // objective under the configured rate model
};

template <typename Real>
CascadeCoeffs<Real> cascade_coeffs(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec)
{
    CascadeCoeffs<Real> c;
    c.hf = ch.h.transpose() * dec.f;
    if (dec.g.size() > 0)
        c.gain = dec.g.adjoint() * ch.h;
    c.zeta = ch.h * (dec.alpha.template cast<Complex<Real>>().cwiseProduct(c.hf)).asDiagonal();
    return c;
}

namespace detail {

template <typename Real>
RVector<Real> weights(const RVector<Real>& Q, const RVector<Real>& gamma)
{
    return (Q.array() * (Real(1) + gamma.array())).max(Real(0)).sqrt().matrix();
}

// sigma^2 + sum_k alpha_k^2 |beta_{n,k}^T f|^2, all k included.
template <typename Real>
RVector<Real> full_denominators(const CascadeCoeffs<Real>& c, const RVector<Real>& alpha, const LinkBudget& lb)
{
    const Eigen::Index N = c.gain.rows();
    RVector<Real> den(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        Real s = static_cast<Real>(lb.noise_power);
        for (Eigen::Index k = 0; k < N; ++k)
            s += alpha(k) * alpha(k) * std::norm(c.beta_f(n, k));
        den(n) = s;
    }
    return den;
}

template <typename Real>
Real bits_per_nat(const LinkBudget& lb)
{
    return static_cast<Real>(lb.bandwidth * lb.slot_seconds * std::numbers::log2e);
}

} // namespace detail

/// sum_n Q_n R_n for the given SINRs.
template <typename Real>
Real weighted_rate(const RVector<Real>& Q, const RVector<Real>& sinrs, const LinkBudget& lb,
                   const FblParams& model = {})
{
    Real total = 0;
    for (Eigen::Index n = 0; n < Q.size(); ++n)
        total += Q(n) * static_cast<Real>(link_rate(static_cast<double>(sinrs(n)), model, lb));
    return total;
}

/// Queue-weighted MRT start point, sqrt(P) * sum Q_n h_n^* / ||sum Q_n h_n^*||.
template <typename Real>
CVector<Real> init_f(const RVector<Real>& Q, const ChannelState<Real>& ch, double power_budget)
{
    const Real sqrt_p = static_cast<Real>(std::sqrt(power_budget));
    CVector<Real> dir = ch.h.conjugate() * Q.template cast<Complex<Real>>();
    if (!(dir.norm() > 0)) {
        dir = ch.h.conjugate() * CVector<Real>::Ones(ch.num_bns());
        if (!(dir.norm() > 0)) {
            dir = CVector<Real>::Zero(ch.num_antennas());
            dir(0) = 1;
        }
    }
    return dir.normalized() * sqrt_p;
}

/// MMSE receive beamformers, normalize((I + Z Z^H / sigma^2)^{-1} zeta_n).
template <typename Real>
CMatrix<Real> update_g(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec, const LinkBudget& lb)
{
    const int M = ch.num_antennas();
    const int N = ch.num_bns();
    const CascadeCoeffs<Real> c = cascade_coeffs(ch, dec);
    const Real inv_noise = static_cast<Real>(1.0 / lb.noise_power);

    CMatrix<Real> system = CMatrix<Real>::Identity(M, M);
    system.noalias() += inv_noise * c.zeta * c.zeta.adjoint();
    Eigen::LLT<CMatrix<Real>> llt(system);
    if (llt.info() != Eigen::Success)
        throw NumericError("update_g: receive system matrix is not positive definite");

    CMatrix<Real> g = llt.solve(c.zeta);
    for (int n = 0; n < N; ++n) {
        const Real norm = g.col(n).norm();
        if (norm > 0 && std::isfinite(norm)) {
            g.col(n) /= norm;
            continue;
        }
        // Silenced BN: any unit vector gives SINR 0.
        CVector<Real> fallback = ch.h.col(n).conjugate();
        if (!(fallback.norm() > 0)) {
            fallback = CVector<Real>::Zero(M);
            fallback(0) = 1;
        }
        g.col(n) = fallback.normalized();
    }
    return g;
}

/// gamma_n = current SINR of BN n.
template <typename Real>
RVector<Real> update_gamma(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec, const LinkBudget& lb)
{
    return sinr_all(ch, dec, lb);
}

template <typename Real>
CVector<Real> update_y(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec, const RVector<Real>& Q,
                       const RVector<Real>& gamma, const LinkBudget& lb)
{
    const CascadeCoeffs<Real> c = cascade_coeffs(ch, dec);
    const RVector<Real> s = detail::weights(Q, gamma);
    const RVector<Real> den = detail::full_denominators(c, dec.alpha, lb);
    const Eigen::Index N = Q.size();
    CVector<Real> y(N);
    for (Eigen::Index n = 0; n < N; ++n)
        y(n) = s(n) * dec.alpha(n) * std::conj(c.beta_f(n, n)) / den(n);
    return y;
}

/// Transmit beamformer maximizing the quadratic surrogate under ||f||^2 <= P.
///
/// The stationary point is f(eta) = (A + eta I)^{-1} b. A is diagonalized once,
/// after which ||f(eta)||^2 is a scalar function of eta and the smallest
/// feasible eta is found by bisection.
template <typename Real>
TransmitUpdate<Real> update_f(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec,
                              const RVector<Real>& Q, const RVector<Real>& gamma, const CVector<Real>& y,
                              const SchedulerConfig& cfg)
{
    const int M = ch.num_antennas();
    const int N = ch.num_bns();
    const CascadeCoeffs<Real> c = cascade_coeffs(ch, dec);
    const RVector<Real> s = detail::weights(Q, gamma);
    const Real P = static_cast<Real>(cfg.power_budget);

    RVector<Real> w(N);
    CVector<Real> v(N);
    for (int k = 0; k < N; ++k) {
        Real acc = 0;
        for (int n = 0; n < N; ++n)
            acc += std::norm(y(n)) * std::norm(c.gain(n, k));
        w(k) = dec.alpha(k) * dec.alpha(k) * acc;
        v(k) = s(k) * dec.alpha(k) * std::conj(y(k) * c.gain(k, k));
    }
    const CMatrix<Real> hc = ch.h.conjugate();
    const CVector<Real> b = hc * v;
    const Real b_norm = b.norm();
    if (!(b_norm > 0))
        return {CVector<Real>::Zero(M), Real(0)};

    CMatrix<Real> A = hc * w.template cast<Complex<Real>>().asDiagonal() * hc.adjoint();
    A = (A + A.adjoint()) * Real(0.5);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(A);
    if (es.info() != Eigen::Success)
        throw NumericError("update_f: eigendecomposition failed");
    const RVector<Real>& lambda = es.eigenvalues();
    CVector<Real> proj = es.eigenvectors().adjoint() * b;

    // b lies in the range of A; components along numerically null directions are round-off.
    const Real lambda_max = std::max(lambda.maxCoeff(), Real(0));
    const Real null_tol = lambda_max * Real(1e-12);
    RVector<Real> lam = lambda.cwiseMax(Real(0));
    for (int i = 0; i < M; ++i)
        if (lam(i) <= null_tol) {
            proj(i) = 0;
            lam(i) = 0;
        }
    const RVector<Real> p2 = proj.cwiseAbs2();

    auto norm2_at = [&](Real eta) {
        Real acc = 0;
        for (int i = 0; i < M; ++i) {
            if (p2(i) == Real(0))
                continue;
            const Real d = lam(i) + eta;
            acc += p2(i) / (d * d);
        }
        return acc;
    };
    auto f_at = [&](Real eta) {
        CVector<Real> coef(M);
        for (int i = 0; i < M; ++i)
            coef(i) = p2(i) == Real(0) ? Complex<Real>(0) : proj(i) / (lam(i) + eta);
        return CVector<Real>(es.eigenvectors() * coef);
    };

    if (norm2_at(Real(0)) <= P)
        return {f_at(Real(0)), Real(0)};

    // ||f(eta)|| <= ||b|| / eta, so eta = ||b|| / sqrt(P) is always feasible.
    Real lo = 0;
    Real hi = b_norm / std::sqrt(P);
    const Real tol = static_cast<Real>(cfg.eta_tol) * P;
    for (int it = 0; it < 400; ++it) {
        if (P - norm2_at(hi) <= tol)
            break;
        const Real mid = Real(0.5) * (lo + hi);
        if (!(mid > lo && mid < hi))
            break;
        if (norm2_at(mid) <= P)
            hi = mid;
        else
            lo = mid;
    }
    CVector<Real> f = f_at(hi);
    const Real fn2 = f.squaredNorm();
    if (fn2 > P)
        f *= std::sqrt(P / fn2);
    return {f, hi};
}

/// Reflection coefficients maximizing the quadratic surrogate, clipped to [0, alpha_max].
template <typename Real>
RVector<Real> update_alpha(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec, const RVector<Real>& Q,
                           const RVector<Real>& gamma, const CVector<Real>& y, double alpha_max)
{
    const CascadeCoeffs<Real> c = cascade_coeffs(ch, dec);
    const RVector<Real> s = detail::weights(Q, gamma);
    const Real a_max = static_cast<Real>(alpha_max);
    const Eigen::Index N = Q.size();
    RVector<Real> alpha(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        const Real num = s(n) * std::real(y(n) * c.beta_f(n, n));
        Real den = 0;
        for (Eigen::Index m = 0; m < N; ++m)
            den += std::norm(y(m)) * std::norm(c.beta_f(m, n));
        const Real stationary = den > 0 ? num / den : a_max;
        alpha(n) = std::clamp(stationary, Real(0), a_max);
    }
    return alpha;
}

/// Lagrangian-dual surrogate R~(gamma) expressed in weighted bits.
template <typename Real>
Real lagrangian_objective(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec, const RVector<Real>& Q,
                          const RVector<Real>& gamma, const LinkBudget& lb)
{
    const CascadeCoeffs<Real> c = cascade_coeffs(ch, dec);
    const RVector<Real> den = detail::full_denominators(c, dec.alpha, lb);
    Real total = 0;
    for (Eigen::Index n = 0; n < Q.size(); ++n) {
        const Real signal = dec.alpha(n) * dec.alpha(n) * std::norm(c.beta_f(n, n));
        total += Q(n) * std::log1p(gamma(n)) - Q(n) * gamma(n) + Q(n) * (1 + gamma(n)) * signal / den(n);
    }
    return total * detail::bits_per_nat<Real>(lb);
}

/// Quadratic-transform surrogate R~~(gamma, y) expressed in weighted bits.
template <typename Real>
Real quadratic_objective(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec, const RVector<Real>& Q,
                         const RVector<Real>& gamma, const CVector<Real>& y, const LinkBudget& lb)
{
    const CascadeCoeffs<Real> c = cascade_coeffs(ch, dec);
    const RVector<Real> den = detail::full_denominators(c, dec.alpha, lb);
    const RVector<Real> s = detail::weights(Q, gamma);
    Real total = 0;
    for (Eigen::Index n = 0; n < Q.size(); ++n) {
        total += Q(n) * std::log1p(gamma(n)) - Q(n) * gamma(n) +
                 2 * s(n) * std::real(y(n) * dec.alpha(n) * c.beta_f(n, n)) - std::norm(y(n)) * den(n);
    }
    return total * detail::bits_per_nat<Real>(lb);
}

/// Runs the alternating optimization for one slot.
template <typename Real>
ScheduleResult<Real> schedule_slot(const RVector<Real>& Q, const ChannelState<Real>& ch, const SchedulerConfig& cfg,
                                   const LinkBudget& lb)
{
    cfg.validate();
    if (Q.size() != ch.num_bns())
        throw std::invalid_argument("schedule_slot: queue vector does not match the number of BNs");

    ScheduleResult<Real> result;
    BeamformingDecision<Real>& dec = result.decision;
    dec.f = init_f(Q, ch, cfg.power_budget);
    dec.alpha = RVector<Real>::Constant(ch.num_bns(), static_cast<Real>(lb.alpha_max));
    dec.g = update_g(ch, dec, lb);

    auto evaluate = [&] {
        const RVector<Real> s = sinr_all(ch, dec, lb);
        result.objective_trace.push_back(weighted_rate(Q, s, lb));
        result.model_trace.push_back(weighted_rate(Q, s, lb, cfg.rate_model));
        return result.model_trace.back();
    };
    evaluate();

    if (!(Q.array() > 0).any()) {
        result.objective = 0;
        result.converged = true;
        return result;
    }

    Real current = 0;
    for (;;) {
        const Real previous = current;
        const RVector<Real> gamma = update_gamma(ch, dec, lb);
        const CVector<Real> y = update_y(ch, dec, Q, gamma, lb);
        dec.f = update_f(ch, dec, Q, gamma, y, cfg).f;
        dec.alpha = update_alpha(ch, dec, Q, gamma, y, lb.alpha_max);
        dec.g = update_g(ch, dec, lb);
        current = evaluate();
        ++result.iterations;
        if (std::abs(current - previous) <= static_cast<Real>(cfg.epsilon) * previous) {
            result.converged = true;
            break;
        }
        if (result.iterations >= cfg.it_max)
            break;
    }
    result.objective = current;
    return result;
}

/// True when every step of the trace is nondecreasing up to rel_slack * |previous|.
template <typename Real>
bool is_monotone(const std::vector<Real>& trace, double rel_slack = 1e-9)
{
    for (std::size_t k = 1; k < trace.size(); ++k)
        if (trace[k] < trace[k - 1] - static_cast<Real>(rel_slack) * std::abs(trace[k - 1]))
            return false;
    return true;
}

} // namespace bsched

#endif // BSCHED_SCHEDULER_HPP
