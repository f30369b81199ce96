#ifndef QMRANK_QMF_HPP
#define QMRANK_QMF_HPP

#include <string>
#include <vector>

#include "common.hpp"
#include "modular.hpp"
#include "quadrature.hpp"
#include "quantumset.hpp"
#include "ranksum.hpp"
#include "zwegers.hpp"

namespace qmrank {

namespace detail {

// e(r) for exact rational r, reduced mod 1 before the trig call.
inline cplx e_of_rational(const Rational& r)
{
    const Rational frac = r - Rational(r.floor(), 1);
    return e_of(frac.to_double());
}

inline cplx zeta24_pow(long long e)
{
    long long r = e % 24;
    if (r < 0) r += 24;
    return e_of(static_cast<double>(r) / 24.0);
}

} // namespace detail

// ---------------------------------------------------------------------------
// E_1(alpha/beta, ell; x) =
//   (ell x + 1)^{1/2} zeta_24^{ell} q^{-1/24} e(3 alpha / (2 beta))
//   - e(-S_ell x / 24)   e(3 alpha / (2 beta)),
// the elementary part of the cocycle.  Defined away from x = -1/ell.
// ---------------------------------------------------------------------------
inline cplx mathcal_e1(const Rational& alpha_over_beta, long long ell, const cplx& x)
{
    const cplx jx = static_cast<double>(ell) * x + 1.0;
    if (std::abs(jx) < 1e-12) throw pole_error("mathcal_e1: pole at x = -1/ell");
    const cplx phase = detail::e_of_rational(Rational(3) / Rational(2) * alpha_over_beta);
    const cplx slx = x / jx;
    return sqrt_principal(jx) * detail::zeta24_pow(ell) * e_of(-x / 24.0) * phase -
           e_of(-slx / 24.0) * phase;
}

// ---------------------------------------------------------------------------
// The weight-3/2 period integral over the vertical ray from 1/ell:
//   J = Integral_{1/ell}^{i inf} g_{a,b}(3 rho) / sqrt(-i (rho + x)) d rho.
// g_ab pushes every series evaluation to height >= min_height internally,
// which tames the rho -> 1/ell endpoint.
// ---------------------------------------------------------------------------
inline QuadResult theta_period_integral(double a, double b, long long ell, const cplx& x,
                                        double tol = 1e-9, double min_height = 0.5)
{
    if (std::abs(a - std::round(a)) < 1e-12)
        throw domain_error("theta_period_integral: integer characteristic a has no decay");
    const double base = 1.0 / static_cast<double>(ell);
    if (std::abs(x + base) < 1e-12)
        throw pole_error("theta_period_integral: endpoint pole at x = -1/ell");
    auto f = [&](cplx rho) {
        return g_ab(a, b, 3.0 * rho, min_height) / sqrt_principal(cplx(0, -1) * (rho + x));
    };
    return quad_vertical_ray(f, base, tol);
}

// ---------------------------------------------------------------------------
// F_{alpha,beta}(tau) = q^{-1/6} sum_{+-} (+-) e(-+ alpha/beta)
//                       R(3 alpha/beta +- tau; 3 tau),
// and G = F(tau) - zeta_24^{-ell} (ell tau + 1)^{-1/2} F(S_ell tau).
// ---------------------------------------------------------------------------
inline cplx f_alpha_beta(const RootEntry& e, const cplx& tau)
{
    const double ab = Rational(e.alpha, e.beta).to_double();
    const cplx r_plus = zwegers_R(3.0 * ab + tau, 3.0 * tau);
    const cplx r_minus = zwegers_R(3.0 * ab - tau, 3.0 * tau);
    const cplx phase_p = detail::e_of_rational(Rational(-e.alpha, e.beta));
    const cplx phase_m = detail::e_of_rational(Rational(e.alpha, e.beta));
    return e_of(-tau / 6.0) * (phase_p * r_plus - phase_m * r_minus);
}

inline cplx g_alpha_beta_fdiff(const RootEntry& e, long long ell, const cplx& tau)
{
    const cplx j = static_cast<double>(ell) * tau + 1.0;
    const cplx stau = tau / j;
    return f_alpha_beta(e, tau) -
           detail::zeta24_pow(-ell) * (1.0 / sqrt_principal(j)) * f_alpha_beta(e, stau);
}

// Closed form of the same difference: sqrt(3) sum_{+-} (-+) e(-+ 1/6) J_{+-}
// with J_{+-} the period integrals at characteristics (+-1/3 + 1/2,
// 1/2 - 3 alpha/beta).  The alternative zeta_6 weighting that also
// circulates, sqrt(3) sum_{+-} e(+- 1/6) J_{+-}, is returned alongside so
// the two bookkeepings can be compared against the direct cocycle.
struct GClosedForm {
    cplx value;       // -e(-1/6) J_+ + e(1/6) J_-   (times sqrt 3)
    cplx alt_value;   //  e(1/6) J_+ + e(-1/6) J_-   (times sqrt 3)
    double quad_error;
};

inline GClosedForm g_alpha_beta_closed(const RootEntry& e, long long ell, const cplx& x,
                                       double tol = 1e-9, double min_height = 0.5)
{
    const double b = 0.5 - 3.0 * Rational(e.alpha, e.beta).to_double();
    const QuadResult jp = theta_period_integral(1.0 / 3.0 + 0.5, b, ell, x, tol, min_height);
    const QuadResult jm = theta_period_integral(-1.0 / 3.0 + 0.5, b, ell, x, tol, min_height);
    const double s3 = std::sqrt(3.0);
    GClosedForm out;
    out.value = s3 * (-e_of(-1.0 / 6.0) * jp.value + e_of(1.0 / 6.0) * jm.value);
    out.alt_value = s3 * (e_of(1.0 / 6.0) * jp.value + e_of(-1.0 / 6.0) * jm.value);
    out.quad_error = s3 * (jp.error_estimate + jm.error_estimate);
    return out;
}

// ---------------------------------------------------------------------------
// The nonholomorphic completion A_n^- and the completed A-hat.
// ---------------------------------------------------------------------------

// A_n^-(tau) = (1/eta) sum_j c_j scriptR_3(alpha_j/beta_j, -tau; tau),
// cross-checked against the rewritten form
//   -(1/2) sum_j c_j e(alpha_j/beta_j) F_{alpha_j,beta_j}(tau).
// The c_j are the fitted Appell-decomposition coefficients; the -tau
// argument matches their normalisation (see solve_pi_dagger), under which
// the elementary q^{-1/24} line of the completion cancels identically.
inline cplx a_minus(const RootVector& zeta, const UhPoint& tau, const PiDaggerSolution& pi)
{
    if (!pi.usable) throw domain_error("a_minus: unusable Pi-dagger solution");
    const cplx t = tau.tau;
    cplx via_f{};
    for (std::size_t j = 0; j < zeta.size(); ++j) {
        const auto& e = zeta[j];
        via_f += -0.5 * pi.c[j] * detail::e_of_rational(Rational(e.alpha, e.beta)) *
                 f_alpha_beta(e, t);
    }
    // The theta/eta route is compared wherever its ingredients stay above
    // the double underflow region: close to the real axis both theta and
    // eta are genuinely of size exp(-1/Im tau), so only the R-based form
    // remains computable there.
    if (t.imag() >= 0.05) {
        cplx via_script{};
        for (std::size_t j = 0; j < zeta.size(); ++j) {
            const double u = Rational(zeta[j].alpha, zeta[j].beta).to_double();
            via_script += pi.c[j] * script_r3(cplx(u, 0.0), -t, t);
        }
        via_script /= eta_value(tau);
        if (std::abs(via_script - via_f) > 1e-8 * std::max(1.0, std::abs(via_f)))
            throw identity_error("a_minus: completion forms disagree beyond 1e-8");
    }
    return via_f;
}

inline cplx a_hat(const RootVector& zeta, const UhPoint& tau, const PiDaggerSolution& pi)
{
    return a_n(tau, zeta) + a_minus(zeta, tau, pi);
}

// |Ahat(tau) - chi_gamma (c tau + d)^{-1/2} Ahat(gamma tau)| for a word in
// S_ell, T.
inline double a_hat_modularity_residual(const RootVector& zeta, const UhPoint& tau,
                                        const PiDaggerSolution& pi, const GroupWord& gamma)
{
    const SL2Matrix m = word_to_matrix(gamma);
    const cplx lhs = a_hat(zeta, tau, pi);
    const cplx image = apply_mobius(m, tau.tau);
    const cplx j = cplx(m.c.get_d(), 0.0) * tau.tau + cplx(m.d.get_d(), 0.0);
    const cplx rhs = chi_eta(m) * (1.0 / sqrt_principal(j)) * a_hat(zeta, UhPoint(image), pi);
    return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// The cocycle H_{n,gamma}(x) = A_n(x) - chi_gamma (c x + d)^{-1/2} A_n(gamma x),
// from exact finite sums on both sides.
// ---------------------------------------------------------------------------
inline cplx h_cocycle_direct(const RootVector& zeta, const GroupWord& gamma, const Rational& x,
                             int threads = 1)
{
    const SL2Matrix m = word_to_matrix(gamma);
    const auto image = apply_mobius(m, x);
    if (!image) throw pole_error("h_cocycle_direct: gamma sends x to infinity");
    const auto chk_x = check_quantum_set(zeta, x);
    if (!chk_x.member) throw domain_error("h_cocycle_direct: x: " + chk_x.violated);
    const auto chk_i = check_quantum_set(zeta, *image);
    if (!chk_i.member)
        throw domain_error("h_cocycle_direct: gamma x: " + chk_i.violated);

    const Rational jx = Rational(m.c, 1) * x + Rational(m.d, 1);
    // (c x + d) continued from the upper half-plane: Im(c tau + d) = c Im(tau)
    const cplx jfac(jx.to_double(), m.c < 0 ? -0.0 : +0.0);
    return a_n_at_rational(zeta, x, threads) -
           chi_eta(m) * (1.0 / sqrt_principal(jfac)) * a_n_at_rational(zeta, *image, threads);
}

// ---------------------------------------------------------------------------
// Closed form of H_{n,S_ell}: the G-part assembled from period integrals
// plus the E_1-part, with both zeta_6 weight conventions carried through.
// ---------------------------------------------------------------------------
struct HClosedForm {
    cplx value;            // weights from the F-difference derivation
    cplx alt_value;        // the alternative zeta_6^{+-1} weighting
    cplx e1_sum;           // the elementary E_1 line, before cancellation
    double quad_error = 0; // accumulated integral error estimate
};

inline HClosedForm h_closed_form_s_ell(const RootVector& zeta, const cplx& x,
                                       const PiDaggerSolution& pi, double tol = 1e-9)
{
    if (!pi.usable) throw domain_error("h_closed_form_s_ell: unusable Pi-dagger solution");
    const long long ell = ell_of(zeta);
    const cplx jx = static_cast<double>(ell) * x + 1.0;
    if (std::abs(jx) < 1e-12) throw pole_error("h_closed_form_s_ell: pole at x = -1/ell");
    const cplx jfac = detail::zeta24_pow(-ell) / sqrt_principal(jx);
    // normalisation bracket e(-x/24) - zeta_24^{-ell}(ell x+1)^{-1/2} e(-S_ell x/24)
    const cplx slx = x / jx;
    const cplx bracket = e_of(-x / 24.0) - jfac * e_of(-slx / 24.0);

    // The E_1 line carries the constants e(-alpha/beta) c_j; for the
    // combinatorial normalisation of the rank sum it cancels exactly
    // against -C * bracket with C = sum_j c_j e(alpha_j/(2 beta_j)).
    // Both pieces are assembled anyway: a defect in either would show up
    // as a residual against the direct cocycle.
    HClosedForm out;
    cplx big_c{};
    for (std::size_t j = 0; j < zeta.size(); ++j) {
        const auto& e = zeta[j];
        const GClosedForm g = g_alpha_beta_closed(e, ell, x, tol);
        const cplx coef = 0.5 * pi.c[j] * detail::e_of_rational(Rational(e.alpha, e.beta));
        const cplx e1 = pi.c[j] * detail::e_of_rational(Rational(-e.alpha, e.beta)) * jfac *
                        mathcal_e1(Rational(e.alpha, e.beta), ell, x);
        big_c += pi.c[j] * detail::e_of_rational(Rational(e.alpha, 2 * e.beta));
        out.value += coef * g.value + e1;
        out.alt_value += coef * g.alt_value + e1;
        out.e1_sum += e1;
        out.quad_error += std::abs(coef) * g.quad_error;
    }
    out.value -= big_c * bracket;
    out.alt_value -= big_c * bracket;
    return out;
}

// ---------------------------------------------------------------------------
// Everything the two-way Theorem check produces for one (x, gamma) pair.
// ---------------------------------------------------------------------------
struct CocycleReport {
    Rational x;
    std::string word;
    cplx direct_value{};
    cplx closed_form_value{};
    cplx closed_form_alt{};
    bool has_closed_form = false;
    double residual = 0.0;     // |direct - closed_form|
    double alt_residual = 0.0; // |direct - closed_form_alt|
    double integral_error_estimate = 0.0;
};

// Two-way verification for gamma in {S, T}: the closed form of the S_ell
// cocycle comes from h_closed_form_s_ell, and H_{n,T} must vanish.
inline CocycleReport verify_cocycle(const RootVector& zeta, const GroupWord& gamma,
                                    const Rational& x, const PiDaggerSolution& pi,
                                    double tol = 1e-9, int threads = 1)
{
    CocycleReport rep;
    rep.x = x;
    rep.word = gamma.letters;
    rep.direct_value = h_cocycle_direct(zeta, gamma, x, threads);
    if (gamma.letters == "S") {
        const HClosedForm cf = h_closed_form_s_ell(zeta, cplx(x.to_double(), 0.0), pi, tol);
        rep.closed_form_value = cf.value;
        rep.closed_form_alt = cf.alt_value;
        rep.has_closed_form = true;
        rep.residual = std::abs(rep.direct_value - cf.value);
        rep.alt_residual = std::abs(rep.direct_value - cf.alt_value);
        rep.integral_error_estimate = cf.quad_error;
    } else if (gamma.letters == "T") {
        rep.closed_form_value = cplx(0, 0); // T-shift leaves the cocycle trivial
        rep.has_closed_form = true;
        rep.residual = std::abs(rep.direct_value);
        rep.alt_residual = rep.residual;
    } else {
        rep.residual = 0.0;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Cocycle composition: |H_{gamma gamma'}(x) - H_{gamma'}(x)
//                       - chi_{gamma'} (C x + D)^{-1/2} H_gamma(gamma' x)|.
// ---------------------------------------------------------------------------
inline double cocycle_compose_residual(const RootVector& zeta, const GroupWord& gamma,
                                       const GroupWord& gamma_prime, const Rational& x,
                                       int threads = 1)
{
    if (gamma.ell != gamma_prime.ell)
        throw domain_error("cocycle_compose_residual: mismatched levels");
    const GroupWord composite(gamma.letters + gamma_prime.letters, gamma.ell);
    const SL2Matrix mp = word_to_matrix(gamma_prime);
    const auto image = apply_mobius(mp, x);
    if (!image) throw pole_error("cocycle_compose_residual: gamma' x = infinity");

    const cplx lhs = h_cocycle_direct(zeta, composite, x, threads);
    const Rational jx = Rational(mp.c, 1) * x + Rational(mp.d, 1);
    const cplx jfac(jx.to_double(), mp.c < 0 ? -0.0 : +0.0);
    const cplx rhs = h_cocycle_direct(zeta, gamma_prime, x, threads) +
                     chi_eta(mp) * (1.0 / sqrt_principal(jfac)) *
                         h_cocycle_direct(zeta, gamma, *image, threads);
    return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Continuity witness: sample the closed form along (-1/(2 ell), 2] and
// measure the jump over a step tiny enough that analytic variation sits
// below the quadrature noise.
// ---------------------------------------------------------------------------
struct ContinuitySample {
    double x;
    cplx value;
    double quad_error;
    double jump;       // |H(x + delta) - H(x)|, delta = 1e-12
    double jump_coarse; // |H(x + 1e-4) - H(x)|
};

inline std::vector<ContinuitySample> continuity_scan(const RootVector& zeta,
                                                     const PiDaggerSolution& pi,
                                                     const std::vector<double>& xs,
                                                     double tol = 1e-8)
{
    std::vector<ContinuitySample> out;
    for (double x : xs) {
        ContinuitySample s;
        s.x = x;
        const HClosedForm h0 = h_closed_form_s_ell(zeta, cplx(x, 0.0), pi, tol);
        const HClosedForm h1 = h_closed_form_s_ell(zeta, cplx(x + 1e-12, 0.0), pi, tol);
        const HClosedForm h2 = h_closed_form_s_ell(zeta, cplx(x + 1e-4, 0.0), pi, tol);
        s.value = h0.value;
        s.quad_error = std::max(h0.quad_error, h1.quad_error);
        s.jump = std::abs(h1.value - h0.value);
        s.jump_coarse = std::abs(h2.value - h0.value);
        out.push_back(s);
    }
    return out;
}

// The default 50-point grid for the witness: clustered near the left
// endpoint, spread over the rest of (-1/(2 ell), 2], with irrationals mixed in.
inline std::vector<double> continuity_grid(long long ell, int n_points = 50)
{
    std::vector<double> xs;
    const double left = -0.5 / static_cast<double>(ell);
    for (int i = 0; i < 8; ++i)
        xs.push_back(left + (1.0 / static_cast<double>(ell)) * (0.08 * (i + 1)));
    xs.push_back(1.0 / pi);
    xs.push_back(0.36787944117144233); // 1/e
    xs.push_back(0.41421356237309515); // sqrt(2) - 1
    xs.push_back(0.61803398874989485); // golden ratio conjugate
    xs.push_back(pi / 4.0);
    const int rest = n_points - static_cast<int>(xs.size());
    for (int i = 0; i < rest; ++i)
        xs.push_back(0.02 + (2.0 - 0.02) * i / std::max(1, rest - 1));
    return xs;
}

} // namespace qmrank

#endif
