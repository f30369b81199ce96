#ifndef QMRANK_RATIONAL_HPP
#define QMRANK_RATIONAL_HPP

#include <gmpxx.h>

#include <optional>
#include <string>

#include "common.hpp"

namespace qmrank {

// Exact rational with arbitrary-precision integer parts, always stored
// reduced with positive denominator.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long num, long den = 1) : q_(num, den) { normalize(); }
    Rational(const mpz_class& num, const mpz_class& den) : q_(num, den) { normalize(); }
    explicit Rational(const mpq_class& q) : q_(q) { normalize(); }

    // Parses "h/k" or a bare integer.
    static Rational parse(const std::string& text)
    {
        auto slash = text.find('/');
        try {
            if (slash == std::string::npos) return Rational(mpz_class(text), 1);
            return Rational(mpz_class(text.substr(0, slash)),
                            mpz_class(text.substr(slash + 1)));
        } catch (const std::invalid_argument&) {
            throw domain_error("Rational::parse: malformed rational '" + text + "'");
        }
    }

    const mpz_class& num() const { return q_.get_num(); }
    const mpz_class& den() const { return q_.get_den(); }
    const mpq_class& raw() const { return q_; }

    double to_double() const { return q_.get_d(); }
    std::string str() const { return q_.get_str(); }

    bool is_integer() const { return q_.get_den() == 1; }
    bool is_zero() const { return q_ == 0; }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ + b.q_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ - b.q_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ * b.q_)); }
    friend Rational operator/(const Rational& a, const Rational& b)
    {
        if (b.is_zero()) throw domain_error("Rational: division by zero");
        return Rational(mpq_class(a.q_ / b.q_));
    }
    Rational operator-() const { return Rational(mpq_class(-q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

    Rational abs() const { return q_ < 0 ? -*this : *this; }

    mpz_class floor() const
    {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        return r;
    }

private:
    void normalize()
    {
        if (q_.get_den() == 0) throw domain_error("Rational: zero denominator");
        q_.canonicalize();
    }

    mpq_class q_;
};

// Closest integer [x], with exact half-integers rounded DOWN, i.e.
// [x] = ceil(x - 1/2).  Both half-integer conventions give the same
// distance |x - [x]| = 1/2; fixing one keeps results deterministic.
inline mpz_class closest_integer(const Rational& x)
{
    // ceil((2n - d) / (2d))
    mpz_class num = 2 * x.num() - x.den();
    mpz_class den = 2 * x.den();
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return r;
}

// |x - [x]|, exact.
inline Rational distance_to_nearest_integer(const Rational& x)
{
    return (x - Rational(closest_integer(x), 1)).abs();
}

} // namespace qmrank

#endif
