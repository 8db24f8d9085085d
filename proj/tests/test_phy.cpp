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

#include "bsched/phy.hpp"
#include "bsched/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bsched;
using cd = std::complex<double>;

namespace {

ChannelState<double> scalar_channel(cd h)
{
    ChannelState<double> ch;
    ch.h = CMatrix<double>::Constant(1, 1, h);
    return ch;
}

BeamformingDecision<double> scalar_decision(cd f, cd g, double alpha)
{
    BeamformingDecision<double> d;
    d.f = CVector<double>::Constant(1, f);
    d.g = CMatrix<double>::Constant(1, 1, g);
    d.alpha = RVector<double>::Constant(1, alpha);
    return d;
}

// Element-by-element evaluation of the SINR expression with explicit loops.
double loop_sinr(int n, const ChannelState<double>& ch, const BeamformingDecision<double>& d, double noise)
{
    const int M = ch.num_antennas();
    const int N = ch.num_bns();
    auto term = [&](int k) {
        cd gh = 0.0, hf = 0.0;
        for (int m = 0; m < M; ++m) {
            gh += std::conj(d.g(m, n)) * ch.h(m, k);
            hf += ch.h(m, k) * d.f(m);
        }
        const cd v = d.alpha(k) * gh * hf;
        return v.real() * v.real() + v.imag() * v.imag();
    };
    double interference = 0.0;
    for (int k = 0; k < N; ++k)
        if (k != n)
            interference += term(k);
    return term(n) / (noise + interference);
}

} // namespace

TEST_SUITE("phy")
{
    TEST_CASE("sinr scalar examples")
    {
        LinkBudget lb;
        lb.noise_power = 1.0;
        const auto ch = scalar_channel(1.0);
        CHECK(sinr(0, ch, scalar_decision(2.0, 1.0, 0.5), lb) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(sinr(0, ch, scalar_decision(2.0, 1.0, 0.0), lb) == 0.0);
        CHECK_THROWS_AS(sinr(1, ch, scalar_decision(2.0, 1.0, 0.5), lb), std::out_of_range);
    }

    TEST_CASE("sinr matches an element-wise oracle on random instances")
    {
        RandomStream rng(31);
        for (int trial = 0; trial < 200; ++trial) {
            const int M = 1 + trial % 5;
            const int N = 1 + (trial / 5) % 5;
            const RandomInstance inst = random_instance(rng, M, N);
            const RVector<double> s = sinr_all(inst.ch, inst.dec, inst.lb);
            for (int n = 0; n < N; ++n)
                CHECK(s(n) == doctest::Approx(loop_sinr(n, inst.ch, inst.dec, inst.lb.noise_power)).epsilon(1e-12));
        }
    }

    TEST_CASE("sinr invariances")
    {
        RandomStream rng(32);
        for (int trial = 0; trial < 50; ++trial) {
            RandomInstance inst = random_instance(rng, 3, 3);
            const RVector<double> base = sinr_all(inst.ch, inst.dec, inst.lb);
            BeamformingDecision<double> rotated = inst.dec;
            const double phi = rng.uniform(0, 2 * std::numbers::pi);
            rotated.g.col(1) *= std::polar(1.0, phi);
            rotated.f *= std::polar(1.0, -0.7 * phi);
            const RVector<double> r = sinr_all(inst.ch, rotated, inst.lb);
            for (int n = 0; n < 3; ++n)
                CHECK(r(n) == doctest::Approx(base(n)).epsilon(1e-11));
        }
        // Without interference, scaling f by c scales the SINR by |c|^2.
        LinkBudget lb;
        RandomStream r2(33);
        RandomInstance inst = random_instance(r2, 4, 1);
        const double s1 = sinr(0, inst.ch, inst.dec, lb);
        inst.dec.f *= cd(0.3, 0.4);
        CHECK(sinr(0, inst.ch, inst.dec, lb) == doctest::Approx(0.25 * s1).epsilon(1e-12));
    }

    TEST_CASE("shannon rate examples")
    {
        LinkBudget lb;
        CHECK(shannon_rate(1.0, lb) == doctest::Approx(5000.0).epsilon(1e-15));
        CHECK(shannon_rate(0.0, lb) == 0.0);
        CHECK(shannon_rate(3.0, lb) == doctest::Approx(10000.0).epsilon(1e-15));
    }

    TEST_CASE("finite-blocklength rate examples")
    {
        LinkBudget lb;
        CHECK(fbl_rate(10.0, {std::nullopt, 1e-3}, lb) == shannon_rate(10.0, lb));
        CHECK(fbl_rate(0.0, {100.0, 1e-3}, lb) == 0.0);
        CHECK(fbl_rate(0.0, {1e4, 0.4}, lb) == 0.0);

        // 5000 [log2(11) - sqrt((1 - 1/121) / 100) Q^-1(1e-3) log2(e)]
        const double qinv = 3.0902323061678132;
        const double expected =
            5000.0 * (std::log2(11.0) - std::sqrt((1.0 - 1.0 / 121.0) / 100.0) * qinv / std::log(2.0));
        const double r = fbl_rate(10.0, {100.0, 1e-3}, lb);
        CHECK(std::abs(r - expected) <= 1e-6);
        CHECK(r < shannon_rate(10.0, lb));
        CHECK(link_rate(10.0, {100.0, 1e-3}, lb) == r);
    }

    TEST_CASE("finite-blocklength rate is clamped at zero")
    {
        LinkBudget lb;
        CHECK(fbl_rate(1e-3, {10.0, 1e-5}, lb) == 0.0);
    }

    TEST_CASE("received energy examples")
    {
        const auto ch = scalar_channel(2.0);
        CHECK(received_energy(0, ch, scalar_decision(3.0, 1.0, 0.5)) == doctest::Approx(36.0).epsilon(1e-15));

        ChannelState<double> c2;
        c2.h = CMatrix<double>(2, 1);
        c2.h << cd(1, 1), cd(0, 2);
        BeamformingDecision<double> d;
        d.f = CVector<double>(2);
        // h^T f = 0 when f is orthogonal to conj(h).
        d.f << cd(0, 2), cd(-1, -1);
        CHECK(std::abs(received_energy(0, c2, d)) < 1e-15);

        const double P = 0.5;
        d.f = c2.h.col(0).conjugate().normalized() * std::sqrt(P);
        CHECK(received_energy(0, c2, d) == doctest::Approx(P * c2.h.col(0).squaredNorm()).epsilon(1e-14));
        CHECK(received_energy_all(c2, d)(0) == doctest::Approx(received_energy(0, c2, d)).epsilon(1e-15));
    }

    TEST_CASE("parameter validation")
    {
        LinkBudget lb;
        lb.alpha_max = 1.5;
        CHECK_THROWS_AS(lb.validate(), std::invalid_argument);
        FblParams f{0.5, 1e-3};
        CHECK_THROWS_AS(f.validate(), std::invalid_argument);
        FblParams g{std::nullopt, 1.0};
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
}
