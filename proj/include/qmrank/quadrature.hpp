#ifndef QMRANK_QUADRATURE_HPP
#define QMRANK_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "common.hpp"

namespace qmrank {

struct QuadResult {
    cplx value{};
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

// Hard refinement budget shared by all engines: fail loudly instead of
// returning a silently inaccurate value.
inline constexpr std::size_t quad_node_budget = std::size_t{1} << 20;

namespace detail {

// One trapezoid level over the truncated line [-t_minus, t_plus].
template <typename F>
cplx trapezoid_level(F& f, double h, double t_minus, double t_plus,
                     std::size_t& evals, bool odd_only)
{
    kahan_cplx acc;
    // odd_only sums only the new midpoints introduced by halving h.
    const double step = odd_only ? 2.0 * h : h;
    const double start = odd_only ? h : 0.0;
    for (double t = start; t <= t_plus; t += step) {
        acc.add(f(t));
        ++evals;
    }
    for (double t = odd_only ? -h : -step; t >= -t_minus; t -= step) {
        acc.add(f(t));
        ++evals;
    }
    return acc.value();
}

} // namespace detail

// Integral of f over the whole real line, for integrands with (at least)
// Gaussian-scale decay.  Trapezoidal sums converge geometrically for
// analytic integrands of this type; levels halve the spacing until the
// change is below tol.  The truncation point is expanded until the
// envelope bound |f(T)|*(1+T) drops below tol/10.
template <typename F>
QuadResult integrate_real_line(F&& f, double tol)
{
    if (!(tol > 0)) throw domain_error("integrate_real_line: tol must be positive");
    std::size_t evals = 0;

    auto tail_ok = [&](double t) {
        ++evals;
        return std::abs(f(t)) * (1.0 + std::abs(t)) < tol / 10.0;
    };
    double t_plus = 4.0, t_minus = 4.0;
    while (!tail_ok(t_plus)) {
        t_plus *= 1.3;
        if (t_plus > 1e5) throw quadrature_error("integrate_real_line: no Gaussian decay found", std::numeric_limits<double>::infinity());
    }
    while (!tail_ok(-t_minus)) {
        t_minus *= 1.3;
        if (t_minus > 1e5) throw quadrature_error("integrate_real_line: no Gaussian decay found", std::numeric_limits<double>::infinity());
    }

    double h = 0.5;
    cplx sum = detail::trapezoid_level(f, h, t_minus, t_plus, evals, false);
    cplx integral = h * sum;
    double err = std::numeric_limits<double>::infinity();
    while (true) {
        h *= 0.5;
        sum += detail::trapezoid_level(f, h, t_minus, t_plus, evals, true);
        cplx next = h * sum;
        err = std::abs(next - integral);
        integral = next;
        if (err <= tol) return {integral, err, evals};
        if (evals > quad_node_budget)
            throw quadrature_error("integrate_real_line: node budget exhausted", err);
    }
}

namespace detail {

// Shared driver for the double-exponential rules.  node(u) must fill in the
// abscissa and weight for parameter u; the driver runs the trapezoid-in-u
// levels with term-size cutoffs based on a running L1 scale.  With
// relative = true the tolerance is measured against the integral magnitude.
template <typename Node, typename F>
QuadResult de_levels(Node&& node, F&& f, double tol, bool relative)
{
    if (!(tol > 0)) throw domain_error("de quadrature: tol must be positive");
    std::size_t evals = 0;
    double l1 = 0.0;

    auto weighted = [&](double u, cplx& out) -> bool {
        double x, w;
        if (!node(u, x, w)) return false; // abscissa out of range / weight underflow
        ++evals;
        out = f(x) * w;
        if (!is_finite(out))
            throw quadrature_error("de quadrature: non-finite integrand sample", std::numeric_limits<double>::infinity());
        l1 += std::abs(out);
        return true;
    };

    // One trapezoid-in-u pass.  A full pass visits u = 0, +-h, +-2h, ...;
    // a refinement pass (after halving h) visits only the new odd multiples.
    // A wing is abandoned only after 1.5 u-units of consecutively negligible
    // terms: theta-type integrands can pass through deep interior valleys
    // before a cusp spike, and a fixed small count would stop inside one.
    auto sweep = [&](double h, bool odd_only) {
        kahan_cplx acc;
        const double step = odd_only ? 2.0 * h : h;
        const int run_needed = std::max(6, static_cast<int>(std::ceil(1.5 / step)));
        for (int dir : {+1, -1}) {
            const double u0 = odd_only ? dir * h : (dir > 0 ? 0.0 : -h);
            int small_run = 0;
            for (double u = u0;; u += dir * step) {
                cplx term;
                if (!weighted(u, term)) break;
                acc.add(term);
                const double cut =
                    1e-3 * tol * (relative ? std::max(l1, 1e-300) : 1.0);
                small_run = (std::abs(term) < cut) ? small_run + 1 : 0;
                if (small_run >= run_needed) break;
                if (evals > quad_node_budget)
                    throw quadrature_error("de quadrature: node budget exhausted",
                                           std::numeric_limits<double>::infinity());
            }
        }
        return acc.value();
    };

    double h = 0.5;
    cplx sum = sweep(h, false);
    cplx integral = h * sum;
    double err = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 14; ++level) {
        h *= 0.5;
        sum += sweep(h, true);
        cplx next = h * sum;
        err = std::abs(next - integral);
        integral = next;
        const double goal = relative ? tol * std::max(std::abs(integral), 1e-300) : tol;
        if (err <= goal) return {integral, err, evals};
        if (evals > quad_node_budget) break;
    }
    throw quadrature_error("de quadrature: did not reach tolerance", err);
}

} // namespace detail

// Integral of f over (0, infinity): exp-sinh rule t = exp((pi/2) sinh u).
// Tolerates an integrable endpoint singularity at 0 and requires
// exponential decay at infinity.
template <typename F>
QuadResult integrate_half_line(F&& f, double tol, bool relative = false)
{
    auto node = [](double u, double& x, double& w) {
        double s = (pi / 2.0) * std::sinh(u);
        if (s > 690.0 || s < -690.0) return false; // exp over/underflow
        x = std::exp(s);
        w = (pi / 2.0) * std::cosh(u) * x;
        return w > 0.0 && std::isfinite(w);
    };
    return detail::de_levels(node, std::forward<F>(f), tol, relative);
}

// Integral of f over the finite interval (a, b): tanh-sinh rule,
// tolerant of endpoint singularities.
template <typename F>
QuadResult integrate_finite(F&& f, double a, double b, double tol, bool relative = false)
{
    const double half = (b - a) / 2.0;
    const double mid = (a + b) / 2.0;
    auto node = [=](double u, double& x, double& w) {
        double s = (pi / 2.0) * std::sinh(u);
        if (std::abs(s) > 350.0) return false;
        double t = std::tanh(s);
        double sech = 1.0 / std::cosh(s);
        x = mid + half * t;
        if (x <= a || x >= b) return false; // rounded onto an endpoint
        w = half * (pi / 2.0) * std::cosh(u) * sech * sech;
        return w > 0.0 && std::isfinite(w);
    };
    return detail::de_levels(node, std::forward<F>(f), tol, relative);
}

// Integral along the vertical ray {base + i t : 0 < t < t_max} of a complex
// function; t_max defaults to infinity.  The contract asks for an endpoint
// singularity no worse than t^(-1/2) at the base and exponential decay
// upward, both of which the double-exponential nodes absorb.
template <typename F>
QuadResult quad_vertical_ray(F&& f, double base, double tol,
                             double t_max = std::numeric_limits<double>::infinity())
{
    auto g = [&](double t) { return f(cplx(base, t)); };
    QuadResult r = std::isinf(t_max) ? integrate_half_line(g, tol)
                                     : integrate_finite(g, 0.0, t_max, tol);
    r.value *= cplx(0.0, 1.0); // dz = i dt
    return r;
}

} // namespace qmrank

#endif
