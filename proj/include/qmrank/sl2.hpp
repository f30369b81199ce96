#ifndef QMRANK_SL2_HPP
#define QMRANK_SL2_HPP

#include <gmpxx.h>

#include <optional>
#include <string>

#include "common.hpp"
#include "rational.hpp"

namespace qmrank {

// Integer 2x2 matrix with determinant 1, arbitrary-precision entries.
struct SL2Matrix {
    mpz_class a, b, c, d;

    SL2Matrix(mpz_class a_, mpz_class b_, mpz_class c_, mpz_class d_)
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_))
    {
        if (a * d - b * c != 1)
            throw invariant_error("SL2Matrix: determinant must be 1");
    }

    static SL2Matrix identity() { return {1, 0, 0, 1}; }

    // T = (1 1; 0 1), S_ell = (1 0; ell 1)
    static SL2Matrix shift_T() { return {1, 1, 0, 1}; }
    static SL2Matrix s_ell(long long ell)
    {
        return {1, 0, mpz_class(static_cast<long>(ell)), 1};
    }

    SL2Matrix inverse() const { return {d, -b, -c, a}; }
    SL2Matrix negated() const { return {-a, -b, -c, -d}; }

    friend SL2Matrix operator*(const SL2Matrix& x, const SL2Matrix& y)
    {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }

    friend bool operator==(const SL2Matrix& x, const SL2Matrix& y)
    {
        return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }

    std::string str() const
    {
        return "(" + a.get_str() + "," + b.get_str() + ";" + c.get_str() + "," +
               d.get_str() + ")";
    }
};

// Moebius action on Q: gamma * (h/k) = (a h + b k) / (c h + d k), reduced.
// Returns nullopt when the image is the cusp at infinity.
inline std::optional<Rational> apply_mobius(const SL2Matrix& g, const Rational& x)
{
    const mpz_class num = g.a * x.num() + g.b * x.den();
    const mpz_class den = g.c * x.num() + g.d * x.den();
    if (den == 0) return std::nullopt;
    return Rational(num, den);
}

// Moebius action on the upper half-plane.
inline cplx apply_mobius(const SL2Matrix& g, const cplx& tau)
{
    const cplx ca(g.a.get_d(), 0.0), cb(g.b.get_d(), 0.0);
    const cplx cc(g.c.get_d(), 0.0), cd(g.d.get_d(), 0.0);
    return (ca * tau + cb) / (cc * tau + cd);
}

// A formal word in the generators S_ell and T.  Letters: 'S', 'T' for the
// generators, 's', 't' for their inverses.  Words are never canonicalised;
// whether the group is free on S_ell, T is not something we rely on.
struct GroupWord {
    std::string letters;
    long long ell;

    GroupWord(std::string w, long long level) : letters(std::move(w)), ell(level)
    {
        if (ell <= 0) throw domain_error("GroupWord: level must be positive");
        for (char ch : letters)
            if (ch != 'S' && ch != 's' && ch != 'T' && ch != 't')
                throw domain_error("GroupWord: letters must be in {S, s, T, t}");
    }

    GroupWord inverted() const
    {
        std::string rev(letters.rbegin(), letters.rend());
        for (char& ch : rev) {
            if (ch == 'S') ch = 's';
            else if (ch == 's') ch = 'S';
            else if (ch == 'T') ch = 't';
            else ch = 'T';
        }
        return {rev, ell};
    }
};

inline SL2Matrix word_to_matrix(const GroupWord& w)
{
    SL2Matrix m = SL2Matrix::identity();
    const SL2Matrix S = SL2Matrix::s_ell(w.ell);
    const SL2Matrix T = SL2Matrix::shift_T();
    for (char ch : w.letters) {
        switch (ch) {
            case 'S': m = m * S; break;
            case 's': m = m * S.inverse(); break;
            case 'T': m = m * T; break;
            case 't': m = m * T.inverse(); break;
        }
    }
    return m;
}

} // namespace qmrank

#endif
