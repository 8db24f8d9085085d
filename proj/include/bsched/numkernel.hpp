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

#ifndef BSCHED_NUMKERNEL_HPP
#define BSCHED_NUMKERNEL_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bsched {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a factorization meets a matrix that is not positive definite.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Solves A x = b for Hermitian positive-definite A with a Cholesky factorization.
template <typename Real>
CVector<Real> hermitian_solve(const CMatrix<Real>& A, const CVector<Real>& b)
{
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw std::invalid_argument("hermitian_solve: dimension mismatch");
    Eigen::LLT<CMatrix<Real>> llt(A);
    if (llt.info() != Eigen::Success)
        throw NumericError("hermitian_solve: matrix is not positive definite");
    return llt.solve(b);
}

/// v v^H
template <typename Derived>
auto outer_hermitian(const Eigen::MatrixBase<Derived>& v)
{
    using Scalar = typename Derived::Scalar;
    if (v.size() == 0)
        throw std::invalid_argument("outer_hermitian: empty vector");
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = v * v.adjoint();
    return out;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& A, double rel_tol = 1e-12)
{
    if (A.rows() != A.cols())
        return false;
    const double scale = std::max(1.0, static_cast<double>(A.norm()));
    return static_cast<double>((A - A.adjoint()).norm()) <= rel_tol * scale;
}

/// Standard normal CDF.
inline double norm_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Inverse of the standard normal CDF, |norm_cdf(result) - p| <= 1e-9.
inline double inv_norm_cdf(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("inv_norm_cdf: p must lie in (0, 1), got " + std::to_string(p));

    // Rational starting point (Acklam), refined with Halley steps on erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
    for (int k = 0; k < 2; ++k) {
        // Work on the nearer tail so the residual keeps its relative precision.
        const double err = (x < 0.0) ? norm_cdf(x) - p : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
        const double u = err * sqrt_2pi * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

/// Inverse Gaussian Q-function, Q^{-1}(psi) = inv_norm_cdf(1 - psi).
inline double inv_q(double psi)
{
    if (!(psi > 0.0 && psi < 1.0))
        throw std::domain_error("inv_q: psi must lie in (0, 1)");
    return -inv_norm_cdf(psi);
}

} // namespace bsched

#endif // BSCHED_NUMKERNEL_HPP
