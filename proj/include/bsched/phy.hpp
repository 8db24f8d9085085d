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

#ifndef BSCHED_PHY_HPP
#define BSCHED_PHY_HPP

#include "bsched/channel.hpp"
#include "bsched/numkernel.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace bsched {

struct LinkBudget {
    double noise_power = 1e-14;  // sigma_w^2 [W]
    double bandwidth = 5e3;      // W [Hz]
    double slot_seconds = 1.0;   // tau [s]
    double alpha_max = 0.8;

    void validate() const
    {
        if (!(noise_power > 0.0))
            throw std::invalid_argument("link budget: noise_power must be > 0");
        if (!(bandwidth > 0.0))
            throw std::invalid_argument("link budget: bandwidth must be > 0");
        if (!(slot_seconds > 0.0))
            throw std::invalid_argument("link budget: slot_seconds must be > 0");
        if (!(alpha_max > 0.0 && alpha_max <= 1.0))
            throw std::invalid_argument("link budget: alpha_max must lie in (0, 1]");
    }
};

/// Transmit beamformer f, receive beamformers g_n (columns of g) and reflection coefficients.
template <typename Real = double>
struct BeamformingDecision {
    CVector<Real> f;
    CMatrix<Real> g;
    RVector<Real> alpha;
};

/// Finite-blocklength setting; an empty blocklength means unbounded codewords.
struct FblParams {
    std::optional<double> blocklength;
    double error_prob = 1e-3;

    bool unbounded() const { return !blocklength.has_value(); }

    void validate() const
    {
        if (blocklength && !(*blocklength >= 1.0))
            throw std::invalid_argument("fbl: blocklength must be >= 1");
        if (!(error_prob > 0.0 && error_prob < 1.0))
            throw std::invalid_argument("fbl: error_prob must lie in (0, 1)");
    }
};

/// Cascaded gains c(n, k) = (g_n^H h_k)(h_k^T f); the reflection coefficients are not applied.
template <typename Real>
CMatrix<Real> cascade_gains(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec)
{
    const CVector<Real> hf = ch.h.transpose() * dec.f;
    return (dec.g.adjoint() * ch.h) * hf.asDiagonal();
}

template <typename Real>
RVector<Real> sinr_from_cascade(const CMatrix<Real>& cascade, const RVector<Real>& alpha,
                                const LinkBudget& lb)
{
    const Eigen::Index N = cascade.rows();
    const RVector<Real> a2 = alpha.array().square();
    RVector<Real> out(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        Real interference = 0;
        for (Eigen::Index k = 0; k < N; ++k)
            if (k != n)
                interference += a2(k) * std::norm(cascade(n, k));
        out(n) = a2(n) * std::norm(cascade(n, n)) / (static_cast<Real>(lb.noise_power) + interference);
    }
    return out;
}

/// SINR of every BN for the given decision.
template <typename Real>
RVector<Real> sinr_all(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec,
                       const LinkBudget& lb)
{
    return sinr_from_cascade(cascade_gains(ch, dec), dec.alpha, lb);
}

template <typename Real>
Real sinr(int n, const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec, const LinkBudget& lb)
{
    if (n < 0 || n >= ch.num_bns())
        throw std::out_of_range("sinr: BN index out of range");
    return sinr_all(ch, dec, lb)(n);
}

/// W tau log2(1 + s) bits per slot.
inline double shannon_rate(double s, const LinkBudget& lb)
{
    return lb.bandwidth * lb.slot_seconds * std::log1p(s) * std::numbers::log2e;
}

/// Normal-approximation rate for finite codewords, clamped at zero.
inline double fbl_rate(double s, const FblParams& fbl, const LinkBudget& lb)
{
    if (fbl.unbounded())
        return shannon_rate(s, lb);
    const double L = *fbl.blocklength;
    const double dispersion = 1.0 - 1.0 / ((1.0 + s) * (1.0 + s));
    const double penalty = std::sqrt(dispersion / L) * inv_q(fbl.error_prob) * std::numbers::log2e;
    const double bits = std::log1p(s) * std::numbers::log2e - penalty;
    return std::max(0.0, lb.bandwidth * lb.slot_seconds * bits);
}

/// Rate under the configured codeword model.
inline double link_rate(double s, const FblParams& fbl, const LinkBudget& lb)
{
    return fbl.unbounded() ? shannon_rate(s, lb) : fbl_rate(s, fbl, lb);
}

/// |h_n^T f|^2, the carrier power arriving at BN n.
template <typename Real>
Real received_energy(int n, const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec)
{
    return std::norm((ch.h.col(n).transpose() * dec.f).value());
}

template <typename Real>
RVector<Real> received_energy_all(const ChannelState<Real>& ch, const BeamformingDecision<Real>& dec)
{
    return (ch.h.transpose() * dec.f).cwiseAbs2();
}

} // namespace bsched

#endif // BSCHED_PHY_HPP
