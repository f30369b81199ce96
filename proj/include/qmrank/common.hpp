#ifndef QMRANK_COMMON_HPP
#define QMRANK_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace qmrank {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double sqrt_pi = 1.772453850905516027298167483341145183;

// e(x) := exp(2*pi*i*x)
inline cplx e_of(double x) { return std::polar(1.0, two_pi * x); }
inline cplx e_of(const cplx& z)
{
    // exp(2 pi i (x+iy)) = exp(-2 pi y) * e(x)
    return std::exp(-two_pi * z.imag()) * e_of(z.real());
}

// q = e(tau)
inline cplx q_of(const cplx& tau) { return e_of(tau); }

// e(n*x) with the product reduced mod 1 in doubled precision: n*x is split
// exactly into p + err by an FMA, and only frac(p) + err enters the
// exponential.  Without this, q^n for n ~ 1e7 loses ~1e-9 of phase, which
// is fatal for eta evaluations close to the real axis.
inline cplx e_of_product(double n, double x)
{
    const double p = n * x;
    const double err = std::fma(n, x, -p);
    const double frac = p - std::floor(p);
    return e_of(frac + err);
}

// e(n * tau) = q^n with the phase handled by e_of_product.
inline cplx q_power(const cplx& tau, double n)
{
    return std::exp(-two_pi * n * tau.imag()) * e_of_product(n, tau.real());
}

// zeta_n^k = e(k/n)
inline cplx root_of_unity(long long k, long long n)
{
    return e_of(static_cast<double>(k % n) / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Error taxonomy.  Everything derives from qmrank::error so callers can catch
// the library as a whole or pick the failure class they care about.
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside an operation's domain (e.g. |q| >= 1, point not in the
// quantum set, Im(tau) <= 0).
struct domain_error : error {
    using error::error;
};

// A denominator factor vanishes (or nearly so) at the requested input.
struct singular_error : error {
    using error::error;
};

// A series cannot reach the requested tolerance at this input.
struct precision_error : error {
    using error::error;
};

// Quadrature did not converge within the refinement budget; carries the last
// error estimate seen.
struct quadrature_error : error {
    double last_estimate;
    explicit quadrature_error(const std::string& what, double est)
        : error(what), last_estimate(est) {}
};

// A configured resource cap (truncation order, node budget) was exceeded.
struct resource_error : error {
    using error::error;
};

// An internal invariant that should be unreachable failed; indicates a bug.
struct invariant_error : error {
    using error::error;
};

// Two supposedly equal evaluation routes disagreed beyond tolerance.
struct identity_error : error {
    using error::error;
};

// Evaluation at (or too close to) a pole.
struct pole_error : error {
    using error::error;
};

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const cplx& z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline cplx require_finite(const cplx& z, const char* what)
{
    if (!is_finite(z)) throw invariant_error(std::string(what) + ": non-finite value");
    return z;
}

// ---------------------------------------------------------------------------
// Principal branches.  std::sqrt/std::log on std::complex already use the
// principal branch (argument in (-pi, pi]); these wrappers just name the
// convention at call sites that depend on it.
// ---------------------------------------------------------------------------

inline cplx sqrt_principal(const cplx& z) { return std::sqrt(z); }

inline cplx pow_principal(const cplx& z, double p)
{
    return std::exp(p * std::log(z));
}

// ---------------------------------------------------------------------------
// Neumaier compensated accumulator.  The finite multisums add millions of
// unit-modulus terms; plain summation loses several digits to cancellation.
// ---------------------------------------------------------------------------

class kahan_real {
public:
    void add(double x)
    {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class kahan_cplx {
public:
    void add(const cplx& z)
    {
        re_.add(z.real());
        im_.add(z.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    kahan_real re_, im_;
};

// A point in the upper half-plane; constructing one checks Im(tau) > 0.
struct UhPoint {
    cplx tau;
    explicit UhPoint(cplx t) : tau(t)
    {
        if (!(t.imag() > 0.0) || !is_finite(t))
            throw domain_error("UhPoint: Im(tau) must be positive");
    }
};

} // namespace qmrank

#endif
