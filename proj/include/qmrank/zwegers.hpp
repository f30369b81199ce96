#ifndef QMRANK_ZWEGERS_HPP
#define QMRANK_ZWEGERS_HPP

#include <cmath>
#include <cstdlib>

#include "common.hpp"
#include "efunc.hpp"
#include "quadrature.hpp"

namespace qmrank {

namespace detail {

// Shared truncation policy for the bilateral theta-type series: sum
// k = 0, 1, 2, ... on both wings and stop a wing once `run_needed`
// consecutive terms fall below rel_cut * (running L1 scale), but never
// before the hump at index ~ hump_guard has been passed.
struct BilateralAccumulator {
    kahan_cplx acc;
    double l1 = 0.0;
    double rel_cut;
    int run_needed;

    explicit BilateralAccumulator(double cut, int run = 5)
        : rel_cut(cut), run_needed(run) {}

    void add(const cplx& term) {
        acc.add(term);
        l1 += std::abs(term);
    }
    bool negligible(const cplx& term) const {
        return std::abs(term) < rel_cut * std::max(l1, 1e-300);
    }
};

} // namespace detail

// Jacobi theta function
//   theta(u; tau) = sum_{nu in 1/2 + Z} e^{pi i nu^2 tau + 2 pi i nu (u + 1/2)}.
inline cplx theta(const cplx& u, const cplx& tau)
{
    const double y = tau.imag();
    if (!(y > 0)) throw domain_error("theta: Im(tau) must be positive");
    if (y < 1e-8) throw precision_error("theta: Im(tau) too small for the series");

    const double hump = std::abs(u.imag()) / y; // terms peak near nu = -Im(u)/y
    const int k_min = static_cast<int>(hump) + 3;
    detail::BilateralAccumulator sum(1e-16);
    for (int side : {+1, -1}) {
        int small_run = 0;
        for (int k = 0; k < 20'000'000; ++k) {
            const double nu = side * (k + 0.5);
            const cplx expo = cplx(0, pi) * (nu * nu) * tau +
                              cplx(0, two_pi) * nu * (u + 0.5);
            if (expo.real() > 700.0)
                throw precision_error("theta: term overflow; Im(tau) too small");
            const cplx term = std::exp(expo);
            sum.add(term);
            if (k >= k_min && sum.negligible(term)) {
                if (++small_run >= 5) break;
            } else {
                small_run = 0;
            }
        }
    }
    return sum.acc.value();
}

// Triple-product form of the same function:
//   theta(u; tau) = -i e^{pi i tau/4} e^{-pi i u}
//       prod_{m>=1} (1-q^m)(1 - e^{2 pi i u} q^{m-1})(1 - e^{-2 pi i u} q^m).
inline cplx theta_product(const cplx& u, const cplx& tau)
{
    const double y = tau.imag();
    if (!(y > 0)) throw domain_error("theta_product: Im(tau) must be positive");
    const cplx q = e_of(tau);
    const cplx z = e_of(u), zinv = 1.0 / z;
    const double scale = std::max({1.0, std::abs(z), std::abs(zinv)});
    cplx prod = 1.0;
    cplx qm = 1.0; // q^{m-1}
    for (int m = 1;; ++m) {
        prod *= (1.0 - q * qm) * (1.0 - z * qm) * (1.0 - zinv * q * qm);
        if (std::abs(qm) * scale < 1e-17 * (1.0 - std::abs(q))) break;
        if (m > 10'000'000) throw precision_error("theta_product: |q| too close to 1");
        qm *= q;
    }
    return cplx(0, -1) * std::exp(cplx(0, pi) * tau / 4.0) * std::exp(cplx(0, -pi) * u) * prod;
}

// Zwegers' nonholomorphic R:
//   R(u; tau) = sum_{nu in 1/2+Z} {sgn(nu) - E((nu + Im u / Im tau) sqrt(2 Im tau))}
//               (-1)^{nu - 1/2} e^{-pi i nu^2 tau - 2 pi i nu u}.
// The sgn - E tail is an erfc and is kept in log scale so the growing
// exponential factor never overflows before the product dies.
inline cplx zwegers_R(const cplx& u, const cplx& tau)
{
    const double y = tau.imag();
    if (!(y > 0)) throw domain_error("zwegers_R: Im(tau) must be positive");
    const double c = u.imag() / y;
    const double root2y = std::sqrt(2.0 * y);

    const int k_min = static_cast<int>(std::abs(c)) + 5;
    detail::BilateralAccumulator sum(1e-15);
    for (int side : {+1, -1}) {
        int small_run = 0;
        for (int k = 0; k < 20'000'000; ++k) {
            const double nu = side * (k + 0.5);
            const double sE = sgn_minus_E(side, (nu + c) * root2y);
            cplx term = 0.0;
            if (sE != 0.0) {
                const double mag_log =
                    std::log(std::abs(sE)) + pi * nu * nu * y + two_pi * nu * u.imag();
                if (mag_log > 700.0)
                    throw precision_error("zwegers_R: term overflow; Im(tau) too small");
                const double angle = -pi * nu * nu * tau.real() - two_pi * nu * u.real();
                // (-1)^{nu - 1/2}: nu - 1/2 = k on the plus wing, -(k+1) on the minus wing
                const long long nu_half = side > 0 ? k : -(k + 1);
                const double parity = (nu_half % 2 == 0) ? 1.0 : -1.0;
                const double sign = sE > 0 ? parity : -parity;
                term = sign * std::exp(mag_log) * cplx(std::cos(angle), std::sin(angle));
            }
            sum.add(term);
            if (k >= k_min && sum.negligible(term)) {
                if (++small_run >= 5) break;
            } else {
                small_run = 0;
            }
        }
    }
    return sum.acc.value();
}

// Mordell integral h(u; tau) = Integral_R e^{pi i tau t^2 - 2 pi u t} / cosh(pi t) dt.
inline cplx mordell_h(const cplx& u, const cplx& tau, double tol = 1e-11)
{
    if (!(tau.imag() > 0)) throw domain_error("mordell_h: Im(tau) must be positive");
    auto f = [&](double t) {
        double ch = std::cosh(pi * t);
        cplx numer = std::exp(cplx(0, pi) * tau * (t * t) - two_pi * u * t);
        if (std::isinf(ch)) return cplx(0.0, 0.0); // numerator already negligible
        return numer / ch;
    };
    return integrate_real_line(f, tol).value;
}

// Unary weight-3/2 theta g_{a,b}(tau) = sum_{nu in a+Z} nu e^{pi i nu^2 tau + 2 pi i nu b},
// summed directly; callers should have Im(tau) >= ~0.5 (see g_ab below).
inline cplx g_ab_direct(double a, double b_re, double b_im, const cplx& tau)
{
    const double y = tau.imag();
    if (!(y > 0)) throw domain_error("g_ab: Im(tau) must be positive");
    const double hump = std::abs(b_im) / y + 1.0;
    const int k_min = static_cast<int>(hump) + 3;
    const double a0 = a - std::round(a); // g is 1-periodic in a
    detail::BilateralAccumulator sum(1e-16);
    for (int side : {+1, -1}) {
        int small_run = 0;
        for (int k = (side > 0 ? 0 : 1); k < 20'000'000; ++k) {
            const double nu = a0 + side * k;
            const cplx expo = cplx(0, pi) * (nu * nu) * tau +
                              cplx(0, two_pi) * nu * cplx(b_re, b_im);
            if (expo.real() > 700.0)
                throw precision_error("g_ab: term overflow; Im(tau) too small");
            const cplx term = nu * std::exp(expo);
            sum.add(term);
            if (k >= k_min && sum.negligible(term)) {
                if (++small_run >= 5) break;
            } else {
                small_run = 0;
            }
        }
    }
    return sum.acc.value();
}

// g_{a,b} at any height: the argument is pushed into the region
// Im(tau) >= 0.5 with the transformation rules
//   g_{a,b}(tau + m) = e(-m a(a+1)/2) g_{a, b + m(a + 1/2)}(tau),
//   g_{a,b}(tau)     = i e(ab) (i/tau)^{3/2} g_{b,-a}(-1/tau),
// together with the periodicity g_{a+1,b} = g_{a,b} and
// g_{a,b+1} = e(a) g_{a,b}.  Every series summation then happens at a
// comfortable height, which is what makes the period integrals near their
// rational endpoint tractable.
inline cplx g_ab(double a, double b, const cplx& tau_in, double min_height = 0.5)
{
    cplx tau = tau_in;
    if (!(tau.imag() > 0)) throw domain_error("g_ab: Im(tau) must be positive");
    if (!(min_height >= 0.3 && min_height <= 0.9))
        throw domain_error("g_ab: min_height outside the sensible window");
    // The accumulated (i/tau)^{3/2} factors can overflow a double long
    // before the final series underflows against them, so the factor is
    // carried as phase * exp(log_scale).
    cplx factor = 1.0;
    double log_scale = 0.0;
    auto renormalize = [&] {
        const double m = std::abs(factor);
        if (m > 1e30 || m < 1e-30) {
            log_scale += std::log(m);
            factor /= m;
        }
    };
    for (int iter = 0; iter < 200; ++iter) {
        a -= std::round(a); // period 1 in a, no factor
        // normalise b to [-1/2, 1/2): g_{a,b} = e(m a) g_{a, b-m}
        const double mb = std::round(b);
        if (mb != 0.0) {
            factor *= e_of(mb * a);
            b -= mb;
        }
        const double ms = std::round(tau.real());
        if (ms != 0.0) {
            factor *= e_of(-ms * a * (a + 1.0) / 2.0);
            b += ms * (a + 0.5);
            tau -= ms;
            continue; // b may need renormalising
        }
        if (tau.imag() >= min_height) {
            const cplx g = g_ab_direct(a, b, 0.0, tau);
            if (g == cplx(0.0, 0.0)) return {};
            const double total = log_scale + std::log(std::abs(g));
            if (total < -740.0) return {};
            if (total > 705.0) throw precision_error("g_ab: value overflows a double");
            return (factor * (g / std::abs(g))) * std::exp(total);
        }
        // invert
        factor *= cplx(0, 1) * e_of(a * b) * pow_principal(cplx(0, 1) / tau, 1.5);
        renormalize();
        const double na = b, nb = -a;
        a = na;
        b = nb;
        tau = -1.0 / tau;
    }
    throw precision_error("g_ab: modular reduction did not terminate");
}

// Level-3 Appell sum
//   A_3(u, v; tau) = e^{3 pi i u} sum_{n in Z} (-1)^n q^{3n(n+1)/2} e^{2 pi i n v}
//                                               / (1 - e^{2 pi i u} q^n).
// u on (or within 1e-12 of) the lattice Z tau + Z is rejected.
inline cplx appell_a3(const cplx& u, const cplx& v, const cplx& tau, double rel_cut = 1e-16)
{
    const double y = tau.imag();
    if (!(y > 0)) throw domain_error("appell_a3: Im(tau) must be positive");
    const double lat_a = u.imag() / y;
    const double lat_b = u.real() - lat_a * tau.real();
    if (std::abs(lat_a - std::round(lat_a)) < 1e-12 &&
        std::abs(lat_b - std::round(lat_b)) < 1e-12)
        throw singular_error("appell_a3: u is on the lattice Z tau + Z");

    const cplx eu = e_of(u), eu_inv = 1.0 / eu;
    detail::BilateralAccumulator sum(rel_cut);
    for (int side : {+1, -1}) {
        int small_run = 0;
        for (int k = (side > 0 ? 0 : 1); k < 5'000'000; ++k) {
            const long long n = side > 0 ? k : -k;
            const double parity = (k % 2 == 0) ? 1.0 : -1.0;
            // numerator exponent: 3 pi i n(n+1) tau + 2 pi i n v
            const cplx numer =
                parity * std::exp(cplx(0, 3 * pi) * static_cast<double>(n) *
                                      static_cast<double>(n + 1) * tau +
                                  cplx(0, two_pi) * static_cast<double>(n) * v);
            cplx term;
            if (n >= 0) {
                const cplx zqn = eu * std::exp(cplx(0, two_pi) * static_cast<double>(n) * tau);
                const cplx denom = 1.0 - zqn;
                if (std::abs(denom) < 1e-13)
                    throw singular_error("appell_a3: denominator vanishes at n = " + std::to_string(n));
                term = numer / denom;
            } else {
                // 1/(1 - e(u) q^n) = -e(-u) q^{-n} / (1 - e(-u) q^{-n}), |q^{-n}| < 1
                const cplx w = eu_inv * std::exp(cplx(0, two_pi) * static_cast<double>(-n) * tau);
                const cplx denom = 1.0 - w;
                if (std::abs(denom) < 1e-13)
                    throw singular_error("appell_a3: denominator vanishes at n = " + std::to_string(n));
                term = -numer * w / denom;
            }
            sum.add(term);
            if (k >= 2 && sum.negligible(term)) {
                if (++small_run >= 5) break;
            } else {
                small_run = 0;
            }
        }
    }
    return std::exp(cplx(0, 3 * pi) * u) * sum.acc.value();
}

// Zwegers' completion term for the level-3 Appell sum:
//   scriptR_3(u, v; tau) = (i/2) sum_{j=0}^{2} e^{2 pi i j u}
//                           theta(v + j tau + 1; 3 tau) R(3u - v - j tau - 1; 3 tau),
// equal to the same sum without the +-1 shifts.  Both forms are evaluated
// and must agree; a mismatch means a series bug, not a math ambiguity.
inline cplx script_r3(const cplx& u, const cplx& v, const cplx& tau)
{
    const cplx tau3 = 3.0 * tau;
    cplx shifted = 0.0, plain = 0.0;
    for (int j = 0; j < 3; ++j) {
        const cplx ju = e_of(static_cast<double>(j) * u);
        const cplx arg_t = v + static_cast<double>(j) * tau;
        const cplx arg_r = 3.0 * u - v - static_cast<double>(j) * tau;
        shifted += ju * theta(arg_t + 1.0, tau3) * zwegers_R(arg_r - 1.0, tau3);
        plain += ju * theta(arg_t, tau3) * zwegers_R(arg_r, tau3);
    }
    const cplx a = cplx(0, 0.5) * shifted;
    const cplx b = cplx(0, 0.5) * plain;
    if (std::abs(a - b) > 1e-8 * std::max(1.0, std::abs(a)))
        throw identity_error("script_r3: the two defining forms disagree");
    return a;
}

// Completed level-3 Appell function and its elliptic transformation defect.
inline cplx appell_a3_hat(const cplx& u, const cplx& v, const cplx& tau)
{
    return appell_a3(u, v, tau) + script_r3(u, v, tau);
}

// | A3hat(u + n1 tau + m1, v + n2 tau + m2) -
//   (-1)^{n1+m1} e^{2 pi i (u(3 n1 - n2) - v n1)} q^{3 n1^2/2 - n1 n2} A3hat(u, v) |
inline double a3hat_elliptic_residual(const cplx& u, const cplx& v, const cplx& tau,
                                      int n1, int n2, int m1, int m2)
{
    const cplx lhs = appell_a3_hat(u + static_cast<double>(n1) * tau + static_cast<double>(m1),
                                   v + static_cast<double>(n2) * tau + static_cast<double>(m2),
                                   tau);
    const double sign = ((n1 + m1) % 2 == 0) ? 1.0 : -1.0;
    const cplx phase = std::exp(cplx(0, two_pi) * (u * static_cast<double>(3 * n1 - n2) -
                                                   v * static_cast<double>(n1)));
    const cplx qpow = std::exp(cplx(0, two_pi) * tau *
                               (1.5 * n1 * n1 - static_cast<double>(n1) * n2));
    const cplx rhs = sign * phase * qpow * appell_a3_hat(u, v, tau);
    return std::abs(lhs - rhs);
}

} // namespace qmrank

#endif
