#ifndef QMRANK_MODULAR_HPP
#define QMRANK_MODULAR_HPP

#include <cstdint>

#include "common.hpp"
#include "qseries.hpp"
#include "rational.hpp"
#include "sl2.hpp"

namespace qmrank {

// Dedekind sum s(m, t) = sum_{j mod t} ((j/t)) ((mj/t)) with the sawtooth
// ((x)) = x - floor(x) - 1/2 off the integers and 0 on them.  Computed by
// the O(t) definition, exactly: with r_j = m*j mod t the nonzero summands
// are (2j - t)(2 r_j - t) / (4 t^2), and the numerator total fits an
// int128 for any t below the cap.
inline Rational dedekind_sum(long long m, long long t)
{
    if (t < 1) throw domain_error("dedekind_sum: t must be >= 1");
    if (t > 100'000'000) throw resource_error("dedekind_sum: t beyond the O(t) cap");
    long long mr = m % t;
    if (mr < 0) mr += t;
    __int128 numerator = 0;
    long long r = 0; // r_j = m*j mod t, updated incrementally
    for (long long j = 1; j < t; ++j) {
        r += mr;
        if (r >= t) r -= t;
        if (r == 0) continue; // ((integer)) = 0
        numerator += static_cast<__int128>(2 * j - t) * (2 * r - t);
    }
    // Reduce int128 -> mpz through two 64-bit halves.
    const bool neg = numerator < 0;
    unsigned __int128 mag = neg ? -static_cast<unsigned __int128>(numerator)
                                : static_cast<unsigned __int128>(numerator);
    mpz_class num;
    mpz_import(num.get_mpz_t(), 1, 1, sizeof(mag), 0, 0, &mag);
    if (neg) num = -num;
    const mpz_class tz(static_cast<long>(t));
    return Rational(num, 4 * tz * tz);
}

namespace detail {

// The eta multiplier formulas are stated for c > 0 or (c, d) = (0, 1);
// -gamma acts identically on H, so other matrices are negated first.
inline SL2Matrix eta_normalize(const SL2Matrix& g)
{
    if (g.c < 0 || (g.c == 0 && g.d < 0)) return g.negated();
    return g;
}

inline long long to_ll(const mpz_class& z, const char* what)
{
    if (!z.fits_slong_p()) throw resource_error(std::string(what) + ": entry too large");
    return z.get_si();
}

} // namespace detail

namespace detail {

// The representative swap gamma -> -gamma keeps the Moebius action but
// flips (c tau + d)^{1/2} by -+i on H, so the multiplier must flip the
// other way for eta(gamma tau) = chi (c tau + d)^{1/2} eta(tau) to keep
// holding with principal branches for the matrix as given.
inline cplx eta_normalize_factor(const SL2Matrix& g)
{
    if (g.c < 0) return {0.0, 1.0};                 // chi_gamma = i chi_{-gamma}
    if (g.c == 0 && g.d < 0) return {0.0, -1.0};    // chi_gamma = -i chi_{-gamma}
    return {1.0, 0.0};
}

} // namespace detail

// The eta multiplier chi_gamma from the transformation
//   eta(gamma tau) = chi_gamma (c tau + d)^{1/2} eta(tau):
//   chi = e(b/24)                                     for c = 0, d = 1,
//   chi = sqrt(-i) e(-s(d,c)/2) e((a+d)/(24c))        for c > 0,
// extended to c < 0 (and d = -1) through the -gamma representative.
inline cplx chi_eta(const SL2Matrix& gamma)
{
    const SL2Matrix g = detail::eta_normalize(gamma);
    const cplx swap = detail::eta_normalize_factor(gamma);
    if (g.c == 0) {
        return swap * e_of(Rational(g.b, 24).to_double());
    }
    const long long c = detail::to_ll(g.c, "chi_eta");
    const long long d = detail::to_ll(g.d, "chi_eta");
    const Rational s = dedekind_sum(d, c);
    const Rational expo = Rational(-1, 8) - s / Rational(2) +
                          Rational(g.a + g.d, 24 * mpz_class(static_cast<long>(c)));
    // expo is rational; only its fractional part matters.
    const Rational frac = expo - Rational(expo.floor(), 1);
    return swap * e_of(frac.to_double());
}

// Same multiplier through the closed form with a generalized Legendre
// (Kronecker) symbol:
//   c odd: (d/|c|) e(((a+d)c - bd(c^2-1) - 3c)/24)
//   d odd: (c/d)  e(((a+d)c - bd(c^2-1) + 3d - 3 - 3cd)/24)
// c and d cannot both be even (det = 1).
inline cplx chi_legendre(const SL2Matrix& gamma)
{
    const SL2Matrix g = detail::eta_normalize(gamma);
    const cplx swap = detail::eta_normalize_factor(gamma);
    const mpz_class &a = g.a, &b = g.b, &c = g.c, &d = g.d;
    mpz_class expo;
    int sym = 0;
    if (mpz_odd_p(c.get_mpz_t())) {
        mpz_class cab = abs(c);
        sym = mpz_kronecker(d.get_mpz_t(), cab.get_mpz_t());
        expo = (a + d) * c - b * d * (c * c - 1) - 3 * c;
    } else if (mpz_odd_p(d.get_mpz_t())) {
        sym = mpz_kronecker(c.get_mpz_t(), d.get_mpz_t());
        expo = (a + d) * c - b * d * (c * c - 1) + 3 * d - 3 - 3 * c * d;
    } else {
        throw invariant_error("chi_legendre: c and d both even contradicts det 1");
    }
    mpz_class r;
    mpz_mod_ui(r.get_mpz_t(), expo.get_mpz_t(), 24);
    return swap * (static_cast<double>(sym) * e_of(r.get_d() / 24.0));
}

// Residual |eta(gamma tau) - chi_gamma (c tau + d)^{1/2} eta(tau)| with both
// eta values computed independently of the transformation law.
inline double eta_transform_check(const SL2Matrix& gamma, const UhPoint& tau)
{
    const SL2Matrix g = detail::eta_normalize(gamma);
    const cplx lhs = eta_value(UhPoint(apply_mobius(g, tau.tau)));
    const cplx jfac = cplx(g.c.get_d(), 0.0) * tau.tau + cplx(g.d.get_d(), 0.0);
    const cplx rhs = chi_eta(g) * sqrt_principal(jfac) * eta_value(tau);
    return std::abs(lhs - rhs);
}

} // namespace qmrank

#endif
