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

#ifndef BSCHED_CHANNEL_HPP
#define BSCHED_CHANNEL_HPP

#include "bsched/numkernel.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace bsched {

inline constexpr double kSpeedOfLight = 3e8;

/// Per-BN placement: distance to the Reader in meters and angle of departure in radians.
struct Geometry {
    std::vector<double> distances;
    std::vector<double> angles;

    std::size_t size() const { return distances.size(); }
    void validate() const;
};

struct ChannelParams {
    double rician_k = 1.0;
    double pathloss_exp = 3.0;
    double carrier_freq = 915e6;
    int num_antennas = 5;

    void validate() const;
};

/// Seedable generator with a fixed, platform-independent output sequence.
///
/// The engine is std::mt19937_64 (its sequence is pinned by the standard); the
/// uniform and normal transforms are implemented here rather than taken from
/// <random>, whose distributions are implementation-defined.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phase = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phase);
        has_spare_ = true;
        return r * std::cos(phase);
    }

    /// Circularly symmetric complex Gaussian with unit variance.
    std::complex<double> complex_normal()
    {
        const double re = normal() * std::numbers::sqrt2 / 2.0;
        const double im = normal() * std::numbers::sqrt2 / 2.0;
        return {re, im};
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// beta = d^{-rho} (c / (4 pi f))^2
inline double pathloss(double distance, const ChannelParams& params)
{
    if (!(distance > 0.0))
        throw std::invalid_argument("pathloss: distance must be positive");
    const double wavelength_factor = kSpeedOfLight / (4.0 * std::numbers::pi * params.carrier_freq);
    return std::pow(distance, -params.pathloss_exp) * wavelength_factor * wavelength_factor;
}

/// Half-wavelength ULA response, entry m = exp(-j pi m sin(theta)).
template <typename Real = double>
CVector<Real> los_steering(double theta, int num_antennas)
{
    if (num_antennas < 1)
        throw std::invalid_argument("los_steering: need at least one antenna");
    CVector<Real> v(num_antennas);
    const double s = std::sin(theta);
    for (int m = 0; m < num_antennas; ++m) {
        const double phase = -std::numbers::pi * m * s;
        v(m) = Complex<Real>(static_cast<Real>(std::cos(phase)), static_cast<Real>(std::sin(phase)));
    }
    return v;
}

/// Channel vectors of one slot; column n holds h_n.
template <typename Real = double>
struct ChannelState {
    CMatrix<Real> h;

    int num_antennas() const { return static_cast<int>(h.rows()); }
    int num_bns() const { return static_cast<int>(h.cols()); }
};

/// Rician block-fading generator. The line-of-sight part is fixed per BN and
/// the scattered part is redrawn on every call to draw().
template <typename Real = double>
class ChannelModel {
  public:
    ChannelModel(const Geometry& geometry, const ChannelParams& params) : params_(params)
    {
        geometry.validate();
        params.validate();
        const int M = params.num_antennas;
        const int N = static_cast<int>(geometry.size());
        const double k = params.rician_k;
        los_.resize(M, N);
        scatter_scale_.resize(N);
        beta_.resize(N);
        for (int n = 0; n < N; ++n) {
            const double beta = pathloss(geometry.distances[n], params);
            beta_(n) = static_cast<Real>(beta);
            const double los_gain = std::sqrt(beta * k / (k + 1.0));
            los_.col(n) = los_steering<Real>(geometry.angles[n], M) * static_cast<Real>(los_gain);
            scatter_scale_(n) = static_cast<Real>(std::sqrt(beta / (k + 1.0)));
        }
    }

    ChannelState<Real> draw(RandomStream& rng) const
    {
        ChannelState<Real> state{los_};
        for (Eigen::Index n = 0; n < los_.cols(); ++n)
            for (Eigen::Index m = 0; m < los_.rows(); ++m) {
                const std::complex<double> z = rng.complex_normal();
                state.h(m, n) += Complex<Real>(static_cast<Real>(z.real()), static_cast<Real>(z.imag())) *
                                 scatter_scale_(n);
            }
        return state;
    }

    const RVector<Real>& pathloss_gains() const { return beta_; }
    const ChannelParams& params() const { return params_; }

  private:
    ChannelParams params_;
    CMatrix<Real> los_;
    RVector<Real> scatter_scale_;
    RVector<Real> beta_;
};

/// One-shot draw; equivalent to constructing a ChannelModel and calling draw().
template <typename Real = double>
ChannelState<Real> draw_channel(const Geometry& geometry, const ChannelParams& params, RandomStream& rng)
{
    return ChannelModel<Real>(geometry, params).draw(rng);
}

/// BNs spread uniformly over the area of an annulus [inner, outer] around the Reader.
Geometry draw_annulus_geometry(int num_bns, double inner_radius, double outer_radius, RandomStream& rng);

/// Explicit distances with angles drawn uniformly on [-pi/2, pi/2].
Geometry geometry_from_distances(const std::vector<double>& distances, RandomStream& rng);

/// Mean distance of a point drawn uniformly over the annulus area.
double annulus_mean_distance(double inner_radius, double outer_radius);

/// Outer radius whose annulus with the given inner radius has the requested mean distance.
double annulus_outer_for_mean(double inner_radius, double mean_distance);

} // namespace bsched

#endif // BSCHED_CHANNEL_HPP
