#ifndef QMRANK_EFUNC_HPP
#define QMRANK_EFUNC_HPP

#include <cmath>

#include "common.hpp"
#include "quadrature.hpp"

namespace qmrank {

// E(x) = 2 * Integral_0^x exp(-pi t^2) dt = erf(sqrt(pi) x) for real x.
inline double E_func(double x) { return std::erf(sqrt_pi * x); }

// sgn(nu) - E(x) without cancellation: the tail is an erfc either way.
inline double sgn_minus_E(int sgn, double x)
{
    return sgn > 0 ? std::erfc(sqrt_pi * x) : -std::erfc(-sqrt_pi * x);
}

// Complex E along the straight segment from 0 to z:
//   E(z) = 2z * Integral_0^1 exp(-pi z^2 s^2) ds.
// Real arguments take the erf fast path; complex ones are integrated with
// refinement until the relative change is below tol.
inline cplx E_func(const cplx& z, double tol = 1e-13)
{
    if (z.imag() == 0.0) return cplx(E_func(z.real()), 0.0);
    if (z == cplx(0.0, 0.0)) return {};
    const cplx z2 = z * z;
    auto f = [&](double s) { return std::exp(-pi * z2 * (s * s)); };
    QuadResult r = integrate_finite(f, 0.0, 1.0, tol, /*relative=*/true);
    return 2.0 * z * r.value;
}

} // namespace qmrank

#endif
