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

#include "bsched/channel.hpp"

#include <string>

namespace bsched {

void Geometry::validate() const
{
    if (distances.empty())
        throw std::invalid_argument("geometry: at least one BN is required");
    if (angles.size() != distances.size())
        throw std::invalid_argument("geometry: distances and angles differ in length");
    for (std::size_t n = 0; n < distances.size(); ++n) {
        if (!(distances[n] > 0.0))
            throw std::invalid_argument("geometry: distance of BN " + std::to_string(n) + " must be positive");
        if (!(std::abs(angles[n]) <= std::numbers::pi / 2.0))
            throw std::invalid_argument("geometry: angle of BN " + std::to_string(n) + " outside [-pi/2, pi/2]");
    }
}

void ChannelParams::validate() const
{
    if (!(rician_k >= 0.0))
        throw std::invalid_argument("channel: rician_k must be >= 0");
    if (!(pathloss_exp > 0.0))
        throw std::invalid_argument("channel: pathloss_exp must be > 0");
    if (!(carrier_freq > 0.0))
        throw std::invalid_argument("channel: carrier_freq must be > 0");
    if (num_antennas < 1)
        throw std::invalid_argument("channel: num_antennas must be >= 1");
}

Geometry draw_annulus_geometry(int num_bns, double inner_radius, double outer_radius, RandomStream& rng)
{
    if (num_bns < 1 || !(inner_radius >= 0.0) || !(outer_radius > inner_radius))
        throw std::invalid_argument("draw_annulus_geometry: invalid annulus");
    Geometry g;
    const double a2 = inner_radius * inner_radius;
    const double b2 = outer_radius * outer_radius;
    for (int n = 0; n < num_bns; ++n) {
        double d = 0.0;
        while (!(d > 0.0))
            d = std::sqrt(a2 + (b2 - a2) * rng.uniform());
        g.distances.push_back(d);
        g.angles.push_back(rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0));
    }
    return g;
}

Geometry geometry_from_distances(const std::vector<double>& distances, RandomStream& rng)
{
    Geometry g;
    g.distances = distances;
    for (std::size_t n = 0; n < distances.size(); ++n)
        g.angles.push_back(rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0));
    g.validate();
    return g;
}

double annulus_mean_distance(double inner_radius, double outer_radius)
{
    const double a = inner_radius;
    const double b = outer_radius;
    return 2.0 / 3.0 * (b * b * b - a * a * a) / (b * b - a * a);
}

double annulus_outer_for_mean(double inner_radius, double mean_distance)
{
    if (!(mean_distance > inner_radius))
        throw std::invalid_argument("annulus: mean distance must exceed the inner radius");
    // The mean rises monotonically from `inner` (degenerate) with the outer radius.
    double lo = inner_radius;
    double hi = std::max(1.0, 2.0 * mean_distance);
    while (annulus_mean_distance(inner_radius, hi) < mean_distance)
        hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= inner_radius || annulus_mean_distance(inner_radius, mid) < mean_distance)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace bsched
