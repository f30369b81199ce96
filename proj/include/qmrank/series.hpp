#ifndef QMRANK_SERIES_HPP
#define QMRANK_SERIES_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "common.hpp"

namespace qmrank {

// Truncated power series sum_{i=0}^{N} c_i q^i.  The coefficient type is
// either an exact integer (int64) or cplx; arithmetic never produces
// coefficients beyond the smallest order of its inputs.
template <typename T>
class Series {
public:
    explicit Series(int order) : c_(static_cast<std::size_t>(order) + 1, T{})
    {
        if (order < 0) throw domain_error("Series: negative order");
    }

    static Series one(int order)
    {
        Series s(order);
        s.c_[0] = T{1};
        return s;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }

    T& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    const T& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

    const std::vector<T>& coefficients() const { return c_; }

    Series truncated(int new_order) const
    {
        Series s(std::min(new_order, order()));
        std::copy_n(c_.begin(), static_cast<std::size_t>(s.order()) + 1, s.c_.begin());
        return s;
    }

    friend Series operator+(const Series& a, const Series& b)
    {
        Series s(std::min(a.order(), b.order()));
        for (int i = 0; i <= s.order(); ++i) s[i] = a[i] + b[i];
        return s;
    }

    friend Series operator-(const Series& a, const Series& b)
    {
        Series s(std::min(a.order(), b.order()));
        for (int i = 0; i <= s.order(); ++i) s[i] = a[i] - b[i];
        return s;
    }

    // Cauchy product, truncated to the common valid order.
    friend Series operator*(const Series& a, const Series& b)
    {
        Series s(std::min(a.order(), b.order()));
        for (int i = 0; i <= s.order(); ++i) {
            T acc{};
            for (int j = std::max(0, i - b.order()); j <= i; ++j) acc += a[j] * b[i - j];
            s[i] = acc;
        }
        return s;
    }

    // In-place multiply by the binomial (1 + coef * q^shift).
    Series& mul_binomial(const T& coef, int shift)
    {
        if (shift <= 0) throw domain_error("Series::mul_binomial: shift must be positive");
        for (int i = order(); i >= shift; --i) c_[i] += coef * c_[i - shift];
        return *this;
    }

    // In-place divide by (1 - coef * q^shift); forward recurrence
    // r_i = a_i + coef * r_{i-shift}.
    Series& div_binomial(const T& coef, int shift)
    {
        if (shift <= 0) throw domain_error("Series::div_binomial: shift must be positive");
        for (int i = shift; i <= order(); ++i) c_[i] += coef * c_[i - shift];
        return *this;
    }

    // Multiplicative inverse; requires c_0 == 1 so integer series stay exact.
    Series inverse() const
    {
        if (!(c_[0] == T{1}))
            throw domain_error("Series::inverse: constant term must be 1");
        Series r(order());
        r[0] = T{1};
        for (int n = 1; n <= order(); ++n) {
            T acc{};
            for (int k = 1; k <= n; ++k) acc += c_[static_cast<std::size_t>(k)] * r[n - k];
            r[n] = -acc;
        }
        return r;
    }

    // Shift by q^m (coefficients past the order fall off).
    Series shifted(int m) const
    {
        Series s(order());
        for (int i = order(); i >= m; --i) s[i] = c_[static_cast<std::size_t>(i - m)];
        return s;
    }

    // Evaluate at a complex point by Horner's rule.
    cplx eval(const cplx& q) const
    {
        cplx acc{};
        for (int i = order(); i >= 0; --i) acc = acc * q + to_cplx(c_[static_cast<std::size_t>(i)]);
        return acc;
    }

private:
    static cplx to_cplx(const cplx& z) { return z; }
    static cplx to_cplx(std::int64_t v) { return cplx(static_cast<double>(v), 0.0); }

    std::vector<T> c_;
};

using IntSeries = Series<std::int64_t>;
using CxSeries = Series<cplx>;

} // namespace qmrank

#endif
