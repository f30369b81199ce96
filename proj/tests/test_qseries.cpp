#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <qmrank/partitions.hpp>
#include <qmrank/qseries.hpp>

using namespace qmrank;

TEST_CASE("pochhammer: empty product, direct product, cycle identity")
{
    CHECK(pochhammer(cplx(0.3, 0.7), cplx(0.5, 0.0), 0) == cplx(1.0, 0.0));

    // (q;q)_3 at q = 1/2: (1-1/2)(1-1/4)(1-1/8) = 0.328125
    const cplx q(0.5, 0.0);
    CHECK(std::abs(pochhammer(q, q, 3) - cplx(0.328125, 0.0)) < 1e-15);

    // (x zeta^r; zeta)_{s+Mk} = (1 - x^k)^M (x zeta^r; zeta)_s at a root of
    // unity zeta of order k; here x = e(1/4), zeta = e(1/3), r=1, s=2, M=2, k=3.
    const cplx x = e_of(0.25), zeta = e_of(1.0 / 3.0);
    const cplx lhs = pochhammer(x * zeta, zeta, 2 + 2 * 3);
    const cplx xk = x * x * x;
    const cplx rhs = (1.0 - xk) * (1.0 - xk) * pochhammer(x * zeta, zeta, 2);
    CHECK(std::abs(lhs - rhs) < 1e-13);

    CHECK_THROWS_AS(pochhammer_inf(cplx(0.5, 0), cplx(1.2, 0)), domain_error);
    // (a;q)_inf via truncation vs a long finite product
    const cplx a(0.3, -0.2), q2(0.4, 0.3);
    CHECK(std::abs(pochhammer_inf(a, q2) - pochhammer(a, q2, 200)) < 1e-14);
}

TEST_CASE("partition counts: recurrence equals enumeration; paper values")
{
    CHECK(partition_count(0) == 1);
    CHECK(partition_count(4) == 5);
    CHECK(partition_count(7) == 15);
    for (int n = 0; n <= 30; ++n)
        CHECK(partition_count(n) == partition_count_by_enumeration(n));
}

TEST_CASE("rank counts: delta at n=0, the rank -2 partitions of 7, row sums")
{
    for (int m = -3; m <= 3; ++m)
        CHECK(rank_count(m, 0) == (m == 0 ? 1 : 0));
    CHECK(rank_count(-2, 7) == 2); // 2+2+2+1 and 3+1+1+1+1
    for (int n = 0; n <= 20; ++n) {
        std::int64_t total = 0;
        for (int m = -n - 1; m <= n + 1; ++m) total += rank_count(m, n);
        CHECK(total == partition_count(n));
    }
}

TEST_CASE("eta expansion: pentagonal coefficients and the partition inverse")
{
    const IntSeries eta = eta_qexp(200);
    CHECK(eta[0] == 1);
    CHECK(eta[1] == -1);
    for (int n = 0; n <= 200; ++n) CHECK(std::abs(eta[n]) <= 1);

    const IntSeries inv = eta_qexp(30).inverse();
    for (int n = 0; n <= 30; ++n) CHECK(inv[n] == partition_count(n));
}

TEST_CASE("eta value: q-shift law and series/product agreement")
{
    const UhPoint tau(cplx(0.0, 1.0));
    const cplx lhs = eta_value(UhPoint(tau.tau + 1.0));
    const cplx rhs = e_of(1.0 / 24.0) * eta_value(tau);
    CHECK(std::abs(lhs - rhs) < 1e-14);

    // pentagonal series against the raw product at a moderate |q|
    const cplx t2(0.3, 0.2);
    const cplx q = q_of(t2);
    cplx prod = 1.0;
    cplx qn = q;
    for (int n = 1; n <= 400; ++n) {
        prod *= (1.0 - qn);
        qn *= q;
    }
    CHECK(std::abs(euler_product_value(t2) - prod) < 1e-14);
}

TEST_CASE("r1 series: w=1 recovers p(n), w=-1 recovers the mock theta f(q)")
{
    const IntSeries at1 = r1_series(std::int64_t{1}, 25);
    for (int n = 0; n <= 25; ++n) CHECK(at1[n] == partition_count(n));

    // Independent expansion of f(q) = sum q^{n^2} / (-q;q)_n^2: build the
    // denominator polynomial explicitly and invert once per n.
    const int N = 25;
    IntSeries f(N);
    for (int n = 0; n * n <= N; ++n) {
        IntSeries denom = IntSeries::one(N);
        for (int j = 1; j <= n; ++j) {
            denom.mul_binomial(std::int64_t{1}, j);
            denom.mul_binomial(std::int64_t{1}, j);
        }
        f = f + denom.inverse().shifted(n * n);
    }
    const IntSeries atm1 = r1_series(std::int64_t{-1}, N);
    for (int n = 0; n <= N; ++n) CHECK(atm1[n] == f[n]);
}

TEST_CASE("r1 series: partial sums stabilize once n^2 exceeds the order")
{
    const cplx w = e_of(1.0 / 3.0);
    const CxSeries full = r1_series(w, 25);
    // Rebuild with the n-loop stopped at n = 3; coefficients below q^16 are final.
    CxSeries capped(25);
    CxSeries inv_denom = CxSeries::one(25);
    capped = capped + inv_denom;
    for (int n = 1; n <= 3; ++n) {
        inv_denom.div_binomial(w, n);
        inv_denom.div_binomial(1.0 / w, n);
        capped = capped + inv_denom.shifted(n * n);
    }
    for (int j = 0; j < 16; ++j) CHECK(std::abs(full[j] - capped[j]) < 1e-13);
}

TEST_CASE("rank extraction via roots of unity + inverse DFT")
{
    const auto counts = rank_counts_from_r1(12);
    for (int n = 0; n <= 12; ++n)
        for (int m = -12; m <= 12; ++m)
            CHECK(counts[static_cast<std::size_t>(n)][static_cast<std::size_t>(m + 12)] ==
                  rank_count(m, n));
}

TEST_CASE("bringmann series: leading zero and m-range bound")
{
    const IntSeries s = bringmann_r2_series(50);
    CHECK(s[0] == 0);
    // number of contributing m for N=50: 3m(m+1)/2 <= 50 or (3m^2+m)/2 <= 50
    int count = 0;
    for (int m = 1; 3 * m * (m + 1) / 2 <= 50; ++m) ++count;
    for (int mu = 1; (3 * mu * mu + mu) / 2 <= 50; ++mu) ++count;
    CHECK(count <= 11);
}
