#ifndef QMRANK_BIGFLOAT_HPP
#define QMRANK_BIGFLOAT_HPP

#include <mpfr.h>

#include <utility>

#include "common.hpp"

namespace qmrank {

// Thin RAII wrapper over mpfr_t, just enough for the high-precision
// summation kernels.  Precision is fixed at construction.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
    BigFloat& operator=(const BigFloat& o)
    {
        if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

private:
    mpfr_t v_;
};

// Complex number over BigFloat with the handful of operations the
// summation kernels use.  All operands of an expression must share the
// precision they were created with.
class BigComplex {
public:
    explicit BigComplex(mpfr_prec_t prec) : re_(prec), im_(prec), prec_(prec) {}

    static BigComplex from_cplx(const cplx& z, mpfr_prec_t prec)
    {
        BigComplex r(prec);
        mpfr_set_d(r.re_.raw(), z.real(), MPFR_RNDN);
        mpfr_set_d(r.im_.raw(), z.imag(), MPFR_RNDN);
        return r;
    }

    // e(num/den) computed at full precision from the exact rational phase.
    static BigComplex root_of_unity(long num, long den, mpfr_prec_t prec)
    {
        BigComplex r(prec);
        mpfr_t angle;
        mpfr_init2(angle, prec + 8);
        mpfr_const_pi(angle, MPFR_RNDN);
        mpfr_mul_si(angle, angle, 2 * num, MPFR_RNDN);
        mpfr_div_si(angle, angle, den, MPFR_RNDN);
        mpfr_sin_cos(r.im_.raw(), r.re_.raw(), angle, MPFR_RNDN);
        mpfr_clear(angle);
        return r;
    }

    void set_one()
    {
        mpfr_set_si(re_.raw(), 1, MPFR_RNDN);
        mpfr_set_zero(im_.raw(), 1);
    }

    // *this = 1 - *this
    void one_minus()
    {
        mpfr_si_sub(re_.raw(), 1, re_.raw(), MPFR_RNDN);
        mpfr_neg(im_.raw(), im_.raw(), MPFR_RNDN);
    }

    mpfr_prec_t precision() const { return prec_; }
    cplx to_cplx() const { return {re_.to_double(), im_.to_double()}; }

    mpfr_ptr re_raw() { return re_.raw(); }
    mpfr_ptr im_raw() { return im_.raw(); }

    // *this *= o, using the scratch registers.
    void mul_assign(const BigComplex& o, BigFloat& t1, BigFloat& t2)
    {
        // (a+bi)(c+di) = (ac - bd) + (ad + bc) i
        mpfr_mul(t1.raw(), re_.raw(), o.re_.raw(), MPFR_RNDN); // ac
        mpfr_mul(t2.raw(), im_.raw(), o.im_.raw(), MPFR_RNDN); // bd
        mpfr_mul(im_.raw(), im_.raw(), o.re_.raw(), MPFR_RNDN); // bc
        mpfr_fma(im_.raw(), re_.raw(), o.im_.raw(), im_.raw(), MPFR_RNDN); // ad + bc
        mpfr_sub(re_.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
    }

    // acc += *this * o, leaving *this untouched.
    void addmul_into(BigComplex& acc, const BigComplex& o, BigFloat& t1) const
    {
        mpfr_mul(t1.raw(), re_.raw(), o.re_.raw(), MPFR_RNDN);
        mpfr_add(acc.re_.raw(), acc.re_.raw(), t1.raw(), MPFR_RNDN);
        mpfr_mul(t1.raw(), im_.raw(), o.im_.raw(), MPFR_RNDN);
        mpfr_sub(acc.re_.raw(), acc.re_.raw(), t1.raw(), MPFR_RNDN);
        mpfr_mul(t1.raw(), re_.raw(), o.im_.raw(), MPFR_RNDN);
        mpfr_add(acc.im_.raw(), acc.im_.raw(), t1.raw(), MPFR_RNDN);
        mpfr_mul(t1.raw(), im_.raw(), o.re_.raw(), MPFR_RNDN);
        mpfr_add(acc.im_.raw(), acc.im_.raw(), t1.raw(), MPFR_RNDN);
    }

    void add_assign(const BigComplex& o)
    {
        mpfr_add(re_.raw(), re_.raw(), o.re_.raw(), MPFR_RNDN);
        mpfr_add(im_.raw(), im_.raw(), o.im_.raw(), MPFR_RNDN);
    }

    // *this = 1 / *this
    void invert(BigFloat& t1, BigFloat& t2)
    {
        // 1/(a+bi) = (a - bi) / (a^2 + b^2)
        mpfr_mul(t1.raw(), re_.raw(), re_.raw(), MPFR_RNDN);
        mpfr_fma(t1.raw(), im_.raw(), im_.raw(), t1.raw(), MPFR_RNDN);
        mpfr_div(re_.raw(), re_.raw(), t1.raw(), MPFR_RNDN);
        mpfr_div(t2.raw(), im_.raw(), t1.raw(), MPFR_RNDN);
        mpfr_neg(im_.raw(), t2.raw(), MPFR_RNDN);
    }

private:
    BigFloat re_, im_;
    mpfr_prec_t prec_;
};

} // namespace qmrank

#endif
