#ifndef QMRANK_QSERIES_HPP
#define QMRANK_QSERIES_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "common.hpp"
#include "partitions.hpp"
#include "series.hpp"

namespace qmrank {

// (a; q)_m = prod_{j=1}^{m} (1 - a q^{j-1}), exact finite product.
inline cplx pochhammer(const cplx& a, const cplx& q, int m)
{
    if (m < 0) throw domain_error("pochhammer: m must be >= 0");
    cplx prod = 1.0;
    cplx aq = a;
    for (int j = 0; j < m; ++j) {
        prod *= (1.0 - aq);
        aq *= q;
    }
    return prod;
}

// (a; q)_infinity, truncated once the remaining factors contribute below
// 1e-16 relatively.  Requires |q| < 1.
inline cplx pochhammer_inf(const cplx& a, const cplx& q)
{
    const double qa = std::abs(q);
    if (!(qa < 1.0)) throw domain_error("pochhammer_inf: |q| must be < 1");
    // Once |a q^{j-1}| < eps*(1-|q|), the leftover product is 1 + O(eps).
    const double cutoff = 1e-16 * (1.0 - qa);
    cplx prod = 1.0;
    cplx aq = a;
    while (std::abs(aq) >= cutoff) {
        prod *= (1.0 - aq);
        aq *= q;
    }
    return prod;
}

// Exact integer expansion of prod_{n>=1} (1 - q^n) through q^N.  This is
// q^{-1/24} eta(tau) as a q-series; by the pentagonal number theorem all
// coefficients are 0 or +-1.
inline IntSeries euler_product_series(int N)
{
    IntSeries s = IntSeries::one(N);
    for (int n = 1; n <= N; ++n) s.mul_binomial(std::int64_t{-1}, n);
    return s;
}

// eta as an exact integer q-expansion (without the q^{1/24} prefactor).
inline IntSeries eta_qexp(int N) { return euler_product_series(N); }

// prod (1 - q^n) at q = e(tau) via Euler's pentagonal identity
//   prod (1-q^n) = sum_{k in Z} (-1)^k q^{k(3k-1)/2},
// which needs O(sqrt N) terms instead of N factors and keeps every phase
// exact through e_of_product; both matter close to the real axis.
inline cplx euler_product_value(const cplx& tau)
{
    const double y = tau.imag();
    if (!(y > 0)) throw domain_error("euler_product_value: Im(tau) must be positive");
    kahan_cplx acc;
    acc.add(1.0); // k = 0
    for (long long k = 1; k < 100'000'000; ++k) {
        const double g1 = 0.5 * k * (3.0 * k - 1.0);
        const double g2 = 0.5 * k * (3.0 * k + 1.0);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        acc.add(sign * (q_power(tau, g1) + q_power(tau, g2)));
        if (two_pi * g1 * y > 42.0) return acc.value(); // |q^{g1}| < 1e-18
    }
    throw precision_error("euler_product_value: Im(tau) too small");
}

// eta(tau) = e(tau/24) * prod (1 - q^n).
inline cplx eta_value(const UhPoint& tau)
{
    return e_of(tau.tau / 24.0) * euler_product_value(tau.tau);
}

// R_1(w; q) = sum_{n>=0} q^{n^2} / ((wq; q)_n (w^{-1} q; q)_n) as a series
// through q^N.  The scalar type may be int64 (exact, for w = +-1) or cplx.
template <typename S>
Series<S> r1_series(const S& w, int N)
{
    if (w == S{}) throw singular_error("r1_series: w must be nonzero");
    const S winv = S{1} / w;
    Series<S> total(N);
    Series<S> inv_denom = Series<S>::one(N); // 1 / ((wq;q)_n (q/w;q)_n), running
    total = total + inv_denom;               // n = 0 term
    for (int n = 1; static_cast<long long>(n) * n <= N; ++n) {
        inv_denom.div_binomial(w, n);    // 1/(1 - w q^n)
        inv_denom.div_binomial(winv, n); // 1/(1 - q^n / w)
        total = total + inv_denom.shifted(n * n);
    }
    return total;
}

// Exact integer specialisation needs 1/w to stay integral.
template <>
inline Series<std::int64_t> r1_series(const std::int64_t& w, int N)
{
    if (w != 1 && w != -1)
        throw domain_error("r1_series<int64>: exact path only for w = +-1");
    Series<std::int64_t> total(N);
    Series<std::int64_t> inv_denom = Series<std::int64_t>::one(N);
    total = total + inv_denom;
    for (int n = 1; static_cast<long long>(n) * n <= N; ++n) {
        inv_denom.div_binomial(w, n);
        inv_denom.div_binomial(w, n); // w^{-1} = w for w = +-1
        total = total + inv_denom.shifted(n * n);
    }
    return total;
}

// R_2(1,1; q) = (1/(q;q)_inf) sum_{m != 0} (-1)^{m-1} q^{3m(m+1)/2} / (1-q^m)^2,
// exact integer coefficients through q^N.  For m < 0 the term is rewritten
// with positive powers via 1/(1-q^m)^2 = q^{-2m}/(1-q^{-m})^2.
inline IntSeries bringmann_r2_series(int N)
{
    IntSeries sum(N);
    for (int m = 1;; ++m) {
        const long long expo = 3LL * m * (m + 1) / 2;
        if (expo > N) break;
        const std::int64_t sign = (m % 2 == 1) ? 1 : -1;
        // (1 - q^m)^{-2} = sum_{i>=0} (i+1) q^{mi}
        for (long long i = 0; expo + i * m <= N; ++i)
            sum[static_cast<int>(expo + i * m)] += sign * (i + 1);
    }
    for (int mu = 1;; ++mu) {
        const long long expo = (3LL * mu * mu + mu) / 2;
        if (expo > N) break;
        const std::int64_t sign = (mu % 2 == 1) ? 1 : -1; // (-1)^{m-1}, m = -mu
        for (long long i = 0; expo + i * mu <= N; ++i)
            sum[static_cast<int>(expo + i * mu)] += sign * (i + 1);
    }
    return sum * euler_product_series(N).inverse();
}

// Recovers N(m, n) for n <= n_max from evaluations of R_1 at 2*n_max + 1
// roots of unity in w followed by an inverse DFT in m.  Each recovered
// count must sit within `guard` of an integer.
inline std::vector<std::vector<std::int64_t>> rank_counts_from_r1(int n_max,
                                                                  double guard = 1e-6)
{
    const int M = 2 * n_max + 1;
    std::vector<CxSeries> at_roots;
    at_roots.reserve(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j)
        at_roots.push_back(r1_series(root_of_unity(j, M), n_max));

    // result[n][m + n_max] = N(m, n)
    std::vector<std::vector<std::int64_t>> counts(
        static_cast<std::size_t>(n_max) + 1,
        std::vector<std::int64_t>(static_cast<std::size_t>(M), 0));
    for (int n = 0; n <= n_max; ++n) {
        for (int m = -n_max; m <= n_max; ++m) {
            cplx acc{};
            for (int j = 0; j < M; ++j)
                acc += at_roots[static_cast<std::size_t>(j)][n] *
                       root_of_unity(-static_cast<long long>(j) * m, M);
            acc /= static_cast<double>(M);
            const double rounded = std::round(acc.real());
            if (std::abs(acc.real() - rounded) > guard || std::abs(acc.imag()) > guard)
                throw precision_error("rank_counts_from_r1: DFT value too far from an integer");
            counts[static_cast<std::size_t>(n)][static_cast<std::size_t>(m + n_max)] =
                static_cast<std::int64_t>(rounded);
        }
    }
    return counts;
}

} // namespace qmrank

#endif
