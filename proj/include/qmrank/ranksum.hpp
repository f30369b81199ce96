#ifndef QMRANK_RANKSUM_HPP
#define QMRANK_RANKSUM_HPP

#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bigfloat.hpp"
#include "common.hpp"
#include "qseries.hpp"
#include "quantumset.hpp"
#include "series.hpp"
#include "zwegers.hpp"

namespace qmrank {

// ---------------------------------------------------------------------------
// The (n+1)-variable rank multisum
//
//   R_n(x; q) = sum_{m1 > 0, m2..mn >= 0}
//       q^{(m1+...+mn)^2 + (m1+...+m_{n-1}) + ... + m1}
//     / prod_j (x_j q^{s_{j-1}+[j=1]}; q)_{m_j + [j>1]} (q^{...}/x_j; q)_{...}
//
// with s_j = m1+...+mj.  Every summand has q-order >= (sum m)^2, which is
// what terminates all truncations below.  For n = 1 this is the classical
// two-variable rank generating function handled by r1_series.
// ---------------------------------------------------------------------------

namespace detail {

// Depth-first walk over multi-indices with (sum m)^2 <= order, maintaining
// the running inverse-denominator series one binomial pair at a time.
template <typename S>
void rn_series_walk(const std::vector<S>& x, int order, std::size_t level, int prefix_sum,
                    int prefix_weight, Series<S> inv_denom, Series<S>& total)
{
    const std::size_t n = x.size();
    const S& xj = x[level];
    const S xj_inv = S{1} / xj;
    if (level == 0) {
        // m1 >= 1; the first factor pair is (1 - x1 q)(1 - q/x1).
        for (int m1 = 1; static_cast<long long>(m1) * m1 <= order; ++m1) {
            inv_denom.div_binomial(xj, m1);
            inv_denom.div_binomial(xj_inv, m1);
            if (n == 1) {
                total = total + inv_denom.shifted(m1 * m1);
            } else {
                rn_series_walk(x, order, 1, m1, m1, inv_denom, total);
            }
        }
        return;
    }
    // levels j >= 2 (0-indexed >= 1): m_j >= 0 with m_j + 1 factor pairs
    // starting at exponent prefix_sum.
    Series<S> level_inv = std::move(inv_denom);
    for (int mj = 0;; ++mj) {
        const int total_m = prefix_sum + mj;
        if (static_cast<long long>(total_m) * total_m > order) break;
        level_inv.div_binomial(xj, prefix_sum + mj);
        level_inv.div_binomial(xj_inv, prefix_sum + mj);
        if (level + 1 == n) {
            const long long expo =
                static_cast<long long>(total_m) * total_m + prefix_weight;
            if (expo <= order) total = total + level_inv.shifted(static_cast<int>(expo));
        } else {
            rn_series_walk(x, order, level + 1, total_m, prefix_weight + total_m,
                           level_inv, total);
        }
    }
}

} // namespace detail

// Formal q-expansion of R_n through q^order.  Scalar type int64 demands
// every x_j = +-1 (exact arithmetic); cplx takes arbitrary nonzero x_j.
template <typename S>
Series<S> rn_multisum_series(const std::vector<S>& x, int order)
{
    if (x.empty()) throw domain_error("rn_multisum_series: empty vector");
    for (const S& xj : x)
        if (xj == S{}) throw singular_error("rn_multisum_series: x_j must be nonzero");
    if (x.size() == 1) return r1_series(x[0], order);
    Series<S> total(order);
    detail::rn_series_walk(x, order, 0, 0, 0, Series<S>::one(order), total);
    return total;
}

// ---------------------------------------------------------------------------
// Numeric evaluation of the multisum at a point |q| < 1.
// ---------------------------------------------------------------------------

struct MultisumValue {
    cplx value{};
    long long term_count = 0;
    int order_used = 0;           // terms with q-order <= this were summed
    double tail_estimate = 0.0;   // estimated |discarded tail| / |value|
};

namespace detail {

struct EvalFrame {
    kahan_cplx acc;
    std::vector<double> shell_abs; // sum of |term| per shell (sum m = s)
    long long count = 0;
};

// Same walk as the series version, with complex running products.
// Requires n >= 2 (n = 1 is r1_series territory).
inline void rn_eval_walk(const std::vector<cplx>& x, const cplx& q, int order,
                         std::size_t level, int prefix_sum, int prefix_weight,
                         const cplx& inv_denom, EvalFrame& frame)
{
    const std::size_t n = x.size();
    const cplx xj = x[level], xj_inv = 1.0 / xj;
    if (level == 0) {
        cplx qp = 1.0;
        cplx running = inv_denom;
        for (int m1 = 1; static_cast<long long>(m1) * m1 <= order; ++m1) {
            qp *= q; // q^{m1}
            const cplx f = (1.0 - xj * qp) * (1.0 - xj_inv * qp);
            if (std::abs(f) < 1e-14)
                throw singular_error("rn_multisum_eval: denominator vanishes at level 1, m=" +
                                     std::to_string(m1));
            running /= f;
            rn_eval_walk(x, q, order, 1, m1, m1, running, frame);
        }
        return;
    }
    cplx running = inv_denom;
    cplx qp = std::pow(q, static_cast<double>(prefix_sum)); // q^{prefix_sum + mj}, walked up
    for (int mj = 0;; ++mj) {
        const int total_m = prefix_sum + mj;
        if (static_cast<long long>(total_m) * total_m > order) break;
        const cplx f = (1.0 - xj * qp) * (1.0 - xj_inv * qp);
        if (std::abs(f) < 1e-14)
            throw singular_error("rn_multisum_eval: denominator vanishes at level " +
                                 std::to_string(level + 1) + ", m=" + std::to_string(mj));
        running /= f;
        if (level + 1 == n) {
            const long long expo = static_cast<long long>(total_m) * total_m + prefix_weight;
            if (expo <= order) {
                const cplx term = running * std::pow(q, static_cast<double>(expo));
                frame.acc.add(term);
                ++frame.count;
                const std::size_t shell = static_cast<std::size_t>(total_m);
                if (frame.shell_abs.size() <= shell) frame.shell_abs.resize(shell + 1, 0.0);
                frame.shell_abs[shell] += std::abs(term);
            }
        } else {
            rn_eval_walk(x, q, order, level + 1, total_m, prefix_weight + total_m, running,
                         frame);
        }
        qp *= q;
    }
}

} // namespace detail

// Numeric multisum truncated at q-order `order`; the tail estimate comes
// from the decay of the last two index shells.
inline MultisumValue rn_multisum_eval(const std::vector<cplx>& x, const cplx& q, int order)
{
    if (!(std::abs(q) < 1.0)) throw domain_error("rn_multisum_eval: |q| must be < 1");
    if (x.size() < 2) throw domain_error("rn_multisum_eval: need n >= 2 (use r1_series)");
    detail::EvalFrame frame;
    detail::rn_eval_walk(x, q, order, 0, 0, 0, cplx(1.0, 0.0), frame);
    MultisumValue out;
    out.value = frame.acc.value();
    out.term_count = frame.count;
    out.order_used = order;
    const std::size_t s = frame.shell_abs.size();
    if (s >= 2 && frame.shell_abs[s - 2] > 0.0) {
        double ratio = frame.shell_abs[s - 1] / frame.shell_abs[s - 2];
        ratio = std::min(ratio, 0.95);
        out.tail_estimate =
            frame.shell_abs[s - 1] * ratio / (1.0 - ratio) / std::max(std::abs(out.value), 1e-300);
    } else if (s >= 1) {
        out.tail_estimate = frame.shell_abs[s - 1] / std::max(std::abs(out.value), 1e-300);
    }
    return out;
}

namespace detail {

// Largest log|term| over the multisum walk, for sizing the precision of
// evaluations close to the real axis (the Pochhammer chains there dip far
// below unit size, exactly as in the finite sums).
inline void multisum_scan_walk(const std::vector<cplx>& x, const cplx& q, int order,
                               std::size_t level, int prefix_sum, int prefix_weight,
                               double log_running, double& max_log)
{
    const std::size_t n = x.size();
    const double lnq = std::log(std::abs(q));
    const cplx xj = x[level], xj_inv = 1.0 / xj;
    if (level == 0) {
        cplx qp = 1.0;
        double lr = log_running;
        for (int m1 = 1; static_cast<long long>(m1) * m1 <= order; ++m1) {
            qp *= q;
            lr -= std::log(std::abs((1.0 - xj * qp) * (1.0 - xj_inv * qp)));
            multisum_scan_walk(x, q, order, 1, m1, m1, lr, max_log);
        }
        return;
    }
    cplx qp = std::pow(q, static_cast<double>(prefix_sum));
    double lr = log_running;
    for (int mj = 0;; ++mj) {
        const int total_m = prefix_sum + mj;
        if (static_cast<long long>(total_m) * total_m > order) break;
        lr -= std::log(std::abs((1.0 - xj * qp) * (1.0 - xj_inv * qp)));
        if (level + 1 == n) {
            const long long expo = static_cast<long long>(total_m) * total_m + prefix_weight;
            if (expo <= order) max_log = std::max(max_log, expo * lnq + lr);
        } else {
            multisum_scan_walk(x, q, order, level + 1, total_m, prefix_weight + total_m, lr,
                               max_log);
        }
        qp *= q;
    }
}

// Shell-resolved version of the scan: largest log|term| per total index
// sum.  Near singular rationals the Pochhammer chains dip far below unit
// size, so the terms HUMP before the q-power quenches them; the shells
// tell us where the hump ends.
inline void multisum_shell_scan(const std::vector<cplx>& x, const cplx& q, int order,
                                std::size_t level, int prefix_sum, int prefix_weight,
                                double log_running, std::vector<double>& shell_max)
{
    const std::size_t n = x.size();
    const double lnq = std::log(std::abs(q));
    const cplx xj = x[level], xj_inv = 1.0 / xj;
    if (level == 0) {
        cplx qp = 1.0;
        double lr = log_running;
        for (int m1 = 1; static_cast<long long>(m1) * m1 <= order; ++m1) {
            qp *= q;
            lr -= std::log(std::abs((1.0 - xj * qp) * (1.0 - xj_inv * qp)));
            multisum_shell_scan(x, q, order, 1, m1, m1, lr, shell_max);
        }
        return;
    }
    cplx qp = std::pow(q, static_cast<double>(prefix_sum));
    double lr = log_running;
    for (int mj = 0;; ++mj) {
        const int total_m = prefix_sum + mj;
        if (static_cast<long long>(total_m) * total_m > order) break;
        lr -= std::log(std::abs((1.0 - xj * qp) * (1.0 - xj_inv * qp)));
        if (level + 1 == n) {
            const long long expo = static_cast<long long>(total_m) * total_m + prefix_weight;
            if (expo <= order) {
                if (shell_max.size() <= static_cast<std::size_t>(total_m))
                    shell_max.resize(static_cast<std::size_t>(total_m) + 1, -1e300);
                shell_max[static_cast<std::size_t>(total_m)] =
                    std::max(shell_max[static_cast<std::size_t>(total_m)], expo * lnq + lr);
            }
        } else {
            multisum_shell_scan(x, q, order, level + 1, total_m, prefix_weight + total_m, lr,
                                shell_max);
        }
        qp *= q;
    }
}

// Doubles the truncation order until the boundary shells sit 60 e-folds
// below the hump (and below e^-60 absolute), so the discarded tail is
// irrelevant at the working precision.
inline int multisum_choose_order(const std::vector<cplx>& x, const cplx& q, int order_hint,
                                 int order_cap = 4'000'000)
{
    int order = std::max(64, order_hint);
    for (;;) {
        std::vector<double> shell_max;
        multisum_shell_scan(x, q, order, 0, 0, 0, 0.0, shell_max);
        double peak = -1e300, boundary = -1e300;
        const std::size_t s_hi = shell_max.size();
        for (std::size_t s = 0; s < s_hi; ++s) peak = std::max(peak, shell_max[s]);
        for (std::size_t s = s_hi > 5 ? s_hi - 5 : 0; s < s_hi; ++s)
            boundary = std::max(boundary, shell_max[s]);
        if (boundary < std::min(peak, 0.0) - 60.0) return order;
        if (order >= order_cap)
            throw resource_error("multisum_choose_order: no convergent order below the cap");
        order *= 2;
    }
}

struct MultisumBig {
    mpfr_prec_t prec = 0;
    BigComplex q;
    BigFloat l_re; // ln|q| = -2 pi Im tau
    BigFloat l_im; // arg q =  2 pi Re tau
    std::vector<BigComplex> xs, xs_inv;
    MultisumBig(mpfr_prec_t p) : prec(p), q(p), l_re(p), l_im(p) {}
};

inline void multisum_big_walk(const MultisumBig& tb, int order, std::size_t level,
                              int prefix_sum, int prefix_weight,
                              std::vector<BigComplex>& running, std::vector<BigComplex>& qps,
                              BigComplex& acc, long long& count, BigFloat& t1, BigFloat& t2)
{
    const std::size_t n = tb.xs.size();
    BigComplex& r = running[level];
    BigComplex& qp = qps[level];
    r = running[level - 1];
    qp = qps[level - 1]; // q^{prefix_sum}, inherited from the parent step
    BigComplex f1(tb.prec), f2(tb.prec);
    for (int mj = 0;; ++mj) {
        const int total_m = prefix_sum + mj;
        if (static_cast<long long>(total_m) * total_m > order) break;
        f1 = tb.xs[level];
        f1.mul_assign(qp, t1, t2);
        f1.one_minus();
        f2 = tb.xs_inv[level];
        f2.mul_assign(qp, t1, t2);
        f2.one_minus();
        f1.mul_assign(f2, t1, t2);
        f1.invert(t1, t2);
        r.mul_assign(f1, t1, t2);
        if (level + 1 == n) {
            const long long expo = static_cast<long long>(total_m) * total_m + prefix_weight;
            if (expo <= order) {
                // q^{expo} = exp(expo l_re) cis(expo l_im)
                BigComplex qe(tb.prec);
                mpfr_mul_si(t1.raw(), tb.l_im.raw(), expo, MPFR_RNDN);
                mpfr_sin_cos(qe.im_raw(), qe.re_raw(), t1.raw(), MPFR_RNDN);
                mpfr_mul_si(t1.raw(), tb.l_re.raw(), expo, MPFR_RNDN);
                mpfr_exp(t2.raw(), t1.raw(), MPFR_RNDN);
                mpfr_mul(qe.re_raw(), qe.re_raw(), t2.raw(), MPFR_RNDN);
                mpfr_mul(qe.im_raw(), qe.im_raw(), t2.raw(), MPFR_RNDN);
                r.addmul_into(acc, qe, t1);
                ++count;
            }
        } else {
            multisum_big_walk(tb, order, level + 1, total_m, prefix_weight + total_m, running,
                              qps, acc, count, t1, t2);
        }
        qp.mul_assign(tb.q, t1, t2);
    }
}

} // namespace detail

// Multisum evaluation from tau (so phases stay exact), switching to MPFR
// when the scan finds terms too large for double cancellation.  The root
// vector is taken instead of raw complex values so the high-precision
// chain factors come from exact rational phases.
inline MultisumValue rn_multisum_eval_tau(const RootVector& zeta, const cplx& tau,
                                          int order)
{
    const std::vector<cplx> x = zeta.values();
    const cplx q = q_of(tau);
    double max_log = -1e300;
    detail::multisum_scan_walk(x, q, order, 0, 0, 0, 0.0, max_log);
    if (max_log < 23.0) return rn_multisum_eval(x, q, order);

    const auto bits = static_cast<mpfr_prec_t>(1.4427 * (max_log + 35.0)) + 64;
    detail::MultisumBig tb(bits);
    // l_im = 2 pi Re tau, l_re = -2 pi Im tau, from the exact doubles
    mpfr_const_pi(tb.l_im.raw(), MPFR_RNDN);
    mpfr_mul_d(tb.l_im.raw(), tb.l_im.raw(), 2.0 * tau.real(), MPFR_RNDN);
    mpfr_const_pi(tb.l_re.raw(), MPFR_RNDN);
    mpfr_mul_d(tb.l_re.raw(), tb.l_re.raw(), -2.0 * tau.imag(), MPFR_RNDN);
    {
        BigFloat mag(bits);
        mpfr_sin_cos(tb.q.im_raw(), tb.q.re_raw(), tb.l_im.raw(), MPFR_RNDN);
        mpfr_exp(mag.raw(), tb.l_re.raw(), MPFR_RNDN);
        mpfr_mul(tb.q.re_raw(), tb.q.re_raw(), mag.raw(), MPFR_RNDN);
        mpfr_mul(tb.q.im_raw(), tb.q.im_raw(), mag.raw(), MPFR_RNDN);
    }
    for (const auto& entry : zeta.entries()) {
        tb.xs.push_back(BigComplex::root_of_unity(entry.alpha, entry.beta, bits));
        tb.xs_inv.push_back(BigComplex::root_of_unity(-entry.alpha, entry.beta, bits));
    }

    BigComplex acc(bits);
    BigFloat t1(bits), t2(bits);
    std::vector<BigComplex> running(x.size(), BigComplex(bits));
    std::vector<BigComplex> qps(x.size(), BigComplex(bits));
    long long count = 0;
    // level 0 inline: m1 >= 1
    running[0].set_one();
    qps[0].set_one();
    BigComplex f1(bits), f2(bits);
    for (int m1 = 1; static_cast<long long>(m1) * m1 <= order; ++m1) {
        qps[0].mul_assign(tb.q, t1, t2); // q^{m1}
        f1 = tb.xs[0];
        f1.mul_assign(qps[0], t1, t2);
        f1.one_minus();
        f2 = tb.xs_inv[0];
        f2.mul_assign(qps[0], t1, t2);
        f2.one_minus();
        f1.mul_assign(f2, t1, t2);
        f1.invert(t1, t2);
        running[0].mul_assign(f1, t1, t2);
        detail::multisum_big_walk(tb, order, 1, m1, m1, running, qps, acc, count, t1, t2);
    }

    MultisumValue out;
    out.value = acc.to_cplx();
    out.term_count = count;
    out.order_used = order;
    out.tail_estimate = std::exp(static_cast<double>(order) * std::log(std::abs(q))) /
                        std::max(std::abs(out.value), 1e-300);
    return out;
}

// ---------------------------------------------------------------------------
// Exact finite-sum evaluation at a quantum rational.
// ---------------------------------------------------------------------------

struct RnEvaluation {
    cplx value{};
    enum class Mode { finite_sum, truncated_multisum } mode = Mode::finite_sum;
    long long term_count = 0;
    double error_estimate = 0.0;
};

namespace detail {

// Most negative windowed sum (any start, length <= k) of a circular
// log-magnitude profile; the running Pochhammer chains sweep exactly these
// windows, so this bounds how far below unit size a partial product dips.
inline double worst_window_dip(const std::vector<double>& lf)
{
    const std::size_t k = lf.size();
    std::vector<double> prefix(2 * k + 1, 0.0);
    for (std::size_t i = 0; i < 2 * k; ++i) prefix[i + 1] = prefix[i] + lf[i % k];
    double dip = 0.0;
    // monotonic deque over window of the last k prefix values
    std::vector<std::size_t> dq;
    std::size_t head = 0;
    for (std::size_t b = 1; b <= 2 * k; ++b) {
        const std::size_t a_min = b > k ? b - k : 0;
        while (dq.size() > head && dq[head] < a_min) ++head;
        while (dq.size() > head && prefix[dq.back()] <= prefix[b - 1]) dq.pop_back();
        dq.push_back(b - 1);
        dip = std::min(dip, prefix[b] - prefix[dq[head]]);
    }
    return dip;
}

// Worker summing the finite-sum leaves for m1 in [m1_lo, m1_hi].
// zpow[i] = zeta^i, pair_factor[j][i] = (1 - x_j zeta^i)(1 - zeta^i / x_j).
struct FiniteSumTables {
    long k = 0;
    std::vector<cplx> zpow;
    std::vector<std::vector<cplx>> pair_factor;
};

inline void finite_sum_walk(const FiniteSumTables& tb, std::size_t level, long prefix_sum,
                            long prefix_weight, const cplx& inv_denom, kahan_cplx& acc,
                            double& l1)
{
    const long k = tb.k;
    const std::size_t n = tb.pair_factor.size();
    cplx running = inv_denom;
    for (long mj = 0; mj < k; ++mj) {
        const long idx = (prefix_sum + mj) % k;
        running /= tb.pair_factor[level][static_cast<std::size_t>(idx)];
        const long total_m = prefix_sum + mj;
        if (level + 1 == n) {
            // exponent (sum m)^2 + sum of prefixes, mod k
            const long long sq = static_cast<long long>(total_m) * total_m;
            const long expo = static_cast<long>((sq + prefix_weight) % k);
            const cplx term = tb.zpow[static_cast<std::size_t>(expo)] * running;
            acc.add(term);
            l1 += std::abs(term);
        } else {
            finite_sum_walk(tb, level + 1, total_m, prefix_weight + total_m, running, acc, l1);
        }
    }
}

// High-precision twin of the tables: inverse pair factors and exponent
// phases at `prec` bits, built from exact rational phases.
struct FiniteSumBigTables {
    long k = 0;
    mpfr_prec_t prec = 0;
    std::vector<BigComplex> zpow;
    std::vector<std::vector<BigComplex>> inv_pair;
};

inline void finite_sum_big_walk(const FiniteSumBigTables& tb, std::size_t level,
                                long prefix_sum, long prefix_weight,
                                std::vector<BigComplex>& running, BigComplex& acc,
                                BigFloat& t1, BigFloat& t2)
{
    const long k = tb.k;
    const std::size_t n = tb.inv_pair.size();
    BigComplex& r = running[level];
    r = running[level - 1];
    for (long mj = 0; mj < k; ++mj) {
        const long idx = (prefix_sum + mj) % k;
        r.mul_assign(tb.inv_pair[level][static_cast<std::size_t>(idx)], t1, t2);
        const long total_m = prefix_sum + mj;
        if (level + 1 == n) {
            const long long sq = static_cast<long long>(total_m) * total_m;
            const long expo = static_cast<long>((sq + prefix_weight) % k);
            r.addmul_into(acc, tb.zpow[static_cast<std::size_t>(expo)], t1);
        } else {
            finite_sum_big_walk(tb, level + 1, total_m, prefix_weight + total_m, running,
                                acc, t1, t2);
        }
    }
}

} // namespace detail

// R_n(zeta_n; zeta_k^h) as the exact finite sum
//   prod_j [1 - ((1-x_j^k)(1-x_j^{-k}))^{-1}]^{-1}
//   * sum_{0 < m1 <= k, 0 <= m2..mn < k} zeta^{E(m)} / (Pochhammer factors),
// with O(1) table work per index.  The running Pochhammer chains dip as
// far as exp(0.16 k) below unit size, so the working precision is sized
// from a cheap scan of the chain profiles first: small denominators run in
// compensated double arithmetic, large ones switch to MPFR with exactly
// enough bits for the cancellation.  Threads partition the m1 range
// deterministically, so a fixed thread count reproduces bitwise; across
// different thread counts only the merge order changes, and results agree
// to 1e-12 relative.
inline RnEvaluation rn_finite_sum(const RootVector& zeta, const Rational& x, int threads = 1)
{
    const auto chk = check_quantum_set(zeta, x);
    if (!chk.member)
        throw domain_error("rn_finite_sum: not in the quantum set: " + chk.violated);
    if (!x.den().fits_slong_p())
        throw resource_error("rn_finite_sum: denominator too large");
    const long k = x.den().get_si();
    const long h = static_cast<long>(mpz_class(x.num() % x.den()).get_si());
    const std::size_t n = zeta.size();

    detail::FiniteSumTables tb;
    tb.k = k;
    tb.zpow.resize(static_cast<std::size_t>(k));
    for (long i = 0; i < k; ++i) {
        // zeta^i = e(h i / k), phase exact via integer reduction
        const long r = static_cast<long>((static_cast<long long>(h) * i) % k);
        tb.zpow[static_cast<std::size_t>(i)] = e_of(static_cast<double>(r) / k);
    }
    tb.pair_factor.resize(n);
    cplx prefactor = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& e = zeta[j];
        tb.pair_factor[j].resize(static_cast<std::size_t>(k));
        for (long i = 0; i < k; ++i) {
            // x_j zeta^i = e(alpha/beta + h i/k); exact rational phase
            const Rational ph = Rational(e.alpha, e.beta) + Rational(h, 1) * Rational(i, k);
            const Rational phm = Rational(-e.alpha, e.beta) + Rational(h, 1) * Rational(i, k);
            const cplx f1 = 1.0 - e_of(Rational(ph - Rational(ph.floor(), 1)).to_double());
            const cplx f2 = 1.0 - e_of(Rational(phm - Rational(phm.floor(), 1)).to_double());
            tb.pair_factor[j][static_cast<std::size_t>(i)] = f1 * f2;
        }
        // geometric prefactor: ratio must have modulus < 1 on the quantum set
        const long rk = ((e.alpha % e.beta) * (k % e.beta) % e.beta + e.beta) % e.beta;
        const cplx xk = e_of(static_cast<double>(rk) / e.beta);
        const cplx ratio = 1.0 / ((1.0 - xk) * (1.0 - std::conj(xk)));
        if (!(std::abs(ratio) < 1.0))
            throw invariant_error("rn_finite_sum: geometric ratio >= 1 inside the quantum set");
        prefactor /= (1.0 - ratio);
    }

    // Size the working precision from the chain-dip scan.
    double lg_max_term = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> lf(static_cast<std::size_t>(k));
        for (long i = 0; i < k; ++i)
            lf[static_cast<std::size_t>(i)] =
                std::log(std::abs(tb.pair_factor[j][static_cast<std::size_t>(i)]));
        lg_max_term -= detail::worst_window_dip(lf);
    }
    const auto bits = static_cast<mpfr_prec_t>(1.4427 * (lg_max_term + 35.0)) + 64;

    RnEvaluation out;
    out.mode = RnEvaluation::Mode::finite_sum;
    out.term_count = 1;
    for (std::size_t j = 0; j < n; ++j) out.term_count *= k;
    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(k)));

    if (bits > 128) {
        // ----- high-precision path -----
        detail::FiniteSumBigTables big;
        big.k = k;
        big.prec = bits;
        big.zpow.reserve(static_cast<std::size_t>(k));
        for (long i = 0; i < k; ++i)
            big.zpow.push_back(BigComplex::root_of_unity(
                static_cast<long>((static_cast<long long>(h) * i) % k), k, bits));
        big.inv_pair.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& e = zeta[j];
            std::vector<BigComplex> col;
            col.reserve(static_cast<std::size_t>(k));
            BigFloat t1(bits), t2(bits);
            for (long i = 0; i < k; ++i) {
                auto reduced = [&](long a_num, long a_den) {
                    Rational ph = Rational(a_num, a_den) + Rational(h, 1) * Rational(i, k);
                    ph = ph - Rational(ph.floor(), 1);
                    return BigComplex::root_of_unity(
                        static_cast<long>(ph.num().get_si()),
                        static_cast<long>(ph.den().get_si()), bits);
                };
                BigComplex f1 = reduced(e.alpha, e.beta);
                f1.one_minus();
                BigComplex f2 = reduced(-e.alpha, e.beta);
                f2.one_minus();
                f1.mul_assign(f2, t1, t2);
                f1.invert(t1, t2);
                col.push_back(std::move(f1));
            }
            big.inv_pair.push_back(std::move(col));
        }

        auto sum_block_big = [&](long m1_lo, long m1_hi, BigComplex& acc) {
            BigFloat t1(bits), t2(bits);
            std::vector<BigComplex> running(n, BigComplex(bits));
            running[0].set_one();
            for (long m1 = 1; m1 < m1_lo; ++m1)
                running[0].mul_assign(big.inv_pair[0][static_cast<std::size_t>(m1 % k)], t1, t2);
            for (long m1 = m1_lo; m1 <= m1_hi; ++m1) {
                running[0].mul_assign(big.inv_pair[0][static_cast<std::size_t>(m1 % k)], t1, t2);
                if (n == 1) {
                    const long long sq = static_cast<long long>(m1) * m1;
                    running[0].addmul_into(acc, big.zpow[static_cast<std::size_t>(sq % k)], t1);
                } else {
                    detail::finite_sum_big_walk(big, 1, m1, m1, running, acc, t1, t2);
                }
            }
        };

        std::vector<BigComplex> accs;
        accs.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) accs.emplace_back(bits);
        if (nthreads == 1) {
            sum_block_big(1, k, accs[0]);
        } else {
            std::vector<std::thread> pool;
            const long chunk = (k + nthreads - 1) / nthreads;
            for (int t = 0; t < nthreads; ++t) {
                const long lo = 1 + t * chunk;
                const long hi = std::min<long>(k, lo + chunk - 1);
                if (lo > hi) break;
                pool.emplace_back([&, t, lo, hi] { sum_block_big(lo, hi, accs[static_cast<std::size_t>(t)]); });
            }
            for (auto& th : pool) th.join();
            for (std::size_t t = 1; t < accs.size(); ++t) accs[0].add_assign(accs[t]);
        }
        out.value = prefactor * accs[0].to_cplx();
        out.error_estimate = std::exp(lg_max_term - 0.693 * static_cast<double>(bits)) *
                             static_cast<double>(out.term_count) /
                             std::max(std::abs(out.value), 1e-300);
        return out;
    }

    // ----- double path -----
    // m1 runs over 1..k; the recursion below uses mj in [0,k) at level 0,
    // shifted by one.
    auto sum_block = [&](long m1_lo, long m1_hi, kahan_cplx& acc, double& l1) {
        cplx running = 1.0;
        // catch up the running product for m1 < m1_lo
        for (long m1 = 1; m1 < m1_lo; ++m1)
            running /= tb.pair_factor[0][static_cast<std::size_t>(m1 % k)];
        for (long m1 = m1_lo; m1 <= m1_hi; ++m1) {
            running /= tb.pair_factor[0][static_cast<std::size_t>(m1 % k)];
            if (n == 1) {
                const long long sq = static_cast<long long>(m1) * m1;
                const cplx term = tb.zpow[static_cast<std::size_t>(sq % k)] * running;
                acc.add(term);
                l1 += std::abs(term);
            } else {
                detail::finite_sum_walk(tb, 1, m1, m1, running, acc, l1);
            }
        }
    };

    double l1_total = 0.0;
    cplx total;
    if (nthreads == 1) {
        kahan_cplx acc;
        sum_block(1, k, acc, l1_total);
        total = acc.value();
    } else {
        std::vector<kahan_cplx> accs(static_cast<std::size_t>(nthreads));
        std::vector<double> l1s(static_cast<std::size_t>(nthreads), 0.0);
        std::vector<std::thread> pool;
        const long chunk = (k + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const long lo = 1 + t * chunk;
            const long hi = std::min<long>(k, lo + chunk - 1);
            if (lo > hi) break;
            pool.emplace_back([&, t, lo, hi] { sum_block(lo, hi, accs[static_cast<std::size_t>(t)], l1s[static_cast<std::size_t>(t)]); });
        }
        for (auto& th : pool) th.join();
        kahan_cplx merged;
        for (std::size_t t = 0; t < accs.size(); ++t) {
            merged.add(accs[t].value());
            l1_total += l1s[t];
        }
        total = merged.value();
    }
    out.value = prefactor * total;
    out.error_estimate = 1e-16 * l1_total * std::abs(prefactor) /
                         std::max(std::abs(out.value), 1e-300);
    return out;
}

// ---------------------------------------------------------------------------
// Radial (Abel) probe: the multisum along q = t e(h/k) as t -> 1.
// ---------------------------------------------------------------------------

inline constexpr int radial_probe_order_cap = 4000;

// Evaluates the multisum at q = t e(h/k) for each height t, choosing the
// truncation order so the estimated tail is below tail_target relative.
// When the order cap bites first, the achieved tail estimate is reported in
// the result; only a tail too large to mean anything (>1%) is an error.
inline std::vector<RnEvaluation> radial_limit_probe(const RootVector& zeta, const Rational& x,
                                                    const std::vector<double>& heights,
                                                    double tail_target = 1e-10)
{
    if (!is_in_quantum_set(zeta, x))
        throw domain_error("radial_limit_probe: " + check_quantum_set(zeta, x).violated);
    const std::vector<cplx> xv = zeta.values();
    const double angle = Rational(x - Rational(x.floor(), 1)).to_double();

    std::vector<RnEvaluation> out;
    for (double t : heights) {
        if (!(t > 0.0 && t < 1.0))
            throw domain_error("radial_limit_probe: heights must lie in (0,1)");
        const cplx q = t * e_of(angle);
        MultisumValue mv;
        for (int order = 256;; order *= 2) {
            if (order > radial_probe_order_cap) order = radial_probe_order_cap;
            mv = rn_multisum_eval(xv, q, order);
            if (mv.tail_estimate <= tail_target || order == radial_probe_order_cap) break;
        }
        if (mv.tail_estimate > 1e-2)
            throw resource_error("radial_limit_probe: order cap leaves tail estimate " +
                                 std::to_string(mv.tail_estimate));
        RnEvaluation ev;
        ev.mode = RnEvaluation::Mode::truncated_multisum;
        ev.value = mv.value;
        ev.term_count = mv.term_count;
        ev.error_estimate = mv.tail_estimate;
        out.push_back(ev);
    }
    return out;
}

// ---------------------------------------------------------------------------
// A_n = q^{-1/24} R_n and the Appell decomposition constants.
// ---------------------------------------------------------------------------

inline cplx a_n(const UhPoint& tau, const RootVector& zeta)
{
    const double y = tau.tau.imag();
    // the hint covers q-power decay alone; near singular rationals the
    // shell scan pushes the order past the Pochhammer hump
    const int hint = std::max(64, static_cast<int>(44.0 / (two_pi * y)) + 8);
    if (hint > 2'000'000) throw resource_error("a_n: tau too close to the real axis");
    const int order = detail::multisum_choose_order(zeta.values(), q_of(tau.tau), hint);
    const MultisumValue mv = rn_multisum_eval_tau(zeta, tau.tau, order);
    return e_of(-tau.tau / 24.0) * mv.value;
}

inline cplx a_n_at_rational(const RootVector& zeta, const Rational& x, int threads = 1)
{
    const RnEvaluation ev = rn_finite_sum(zeta, x, threads);
    const Rational ph = -x / Rational(24);
    return e_of(Rational(ph - Rational(ph.floor(), 1)).to_double()) * ev.value;
}

// Least-squares determination of the coefficients c_j in
//   (q)_inf R_n(zeta_n; q) = sum_j c_j A_3(alpha_j/beta_j, -tau; tau),
// from which Pi_j^dagger = (zeta_{2 beta_j}^{-3 alpha_j} - zeta_{2 beta_j}^{-alpha_j}) / c_j.
// The fit is overdetermined and validated on held-out tau samples.
//
// On the second Appell argument: conventions with v = -tau and v = -2 tau
// circulate, related by A_3(u,-tau;tau) = e(-u) A_3(u,-2tau;tau)
// - e(u/2) q^{-1/24} eta(tau).  Only v = -tau closes exactly on the
// combinatorial series (held-out defects at the 1e-20 scale, and the
// resulting Pi^dagger come out real); the other choice leaves an additive
// multiple of (q)_inf behind.
struct PiDaggerSolution {
    std::vector<cplx> c;          // c_j, the combined coefficients
    std::vector<cplx> pi_dagger;  // the normalising constants themselves
    double residual = 0.0;        // max relative defect on held-out samples
    int sample_count = 0;
    bool usable = false;
};

namespace detail {

inline cplx rn_times_euler(const RootVector& zeta, const cplx& tau)
{
    const int hint = std::max(64, static_cast<int>(44.0 / (two_pi * tau.imag())) + 8);
    const int order = multisum_choose_order(zeta.values(), q_of(tau), hint);
    const MultisumValue mv = rn_multisum_eval_tau(zeta, tau, order);
    return euler_product_value(tau) * mv.value;
}

} // namespace detail

inline PiDaggerSolution solve_pi_dagger(const RootVector& zeta, const std::vector<cplx>& fit_taus,
                                        const std::vector<cplx>& holdout_taus,
                                        double unusable_threshold = 1e-6)
{
    const std::size_t n = zeta.size();
    const std::size_t m = fit_taus.size();
    if (m < 2 * n)
        throw domain_error("solve_pi_dagger: need at least 2n tau samples");

    // Build the design matrix A[i][j] = A_3(alpha_j/beta_j, -2 tau_i; tau_i)
    // and the right side b_i = (q)_inf R_n.
    std::vector<std::vector<cplx>> A(m, std::vector<cplx>(n));
    std::vector<cplx> b(m);
    for (std::size_t i = 0; i < m; ++i) {
        const cplx tau = fit_taus[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double u = Rational(zeta[j].alpha, zeta[j].beta).to_double();
            A[i][j] = appell_a3(cplx(u, 0.0), -tau, tau);
        }
        b[i] = detail::rn_times_euler(zeta, tau);
    }

    // Modified Gram-Schmidt QR on the m x n system.
    std::vector<std::vector<cplx>> Q = A;
    std::vector<std::vector<cplx>> R(n, std::vector<cplx>(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < j; ++p) {
            cplx dot{};
            for (std::size_t i = 0; i < m; ++i) dot += std::conj(Q[i][p]) * Q[i][j];
            R[p][j] = dot;
            for (std::size_t i = 0; i < m; ++i) Q[i][j] -= dot * Q[i][p];
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) norm += std::norm(Q[i][j]);
        norm = std::sqrt(norm);
        R[j][j] = norm;
        if (norm == 0.0) throw domain_error("solve_pi_dagger: rank-deficient sample set");
        for (std::size_t i = 0; i < m; ++i) Q[i][j] /= norm;
    }
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        rmax = std::max(rmax, std::abs(R[j][j]));
        rmin = std::min(rmin, std::abs(R[j][j]));
    }
    if (!(rmin > 0.0) || rmax / rmin > 1e8)
        throw domain_error("solve_pi_dagger: ill-conditioned sample set; "
                           "spread the tau samples further");

    PiDaggerSolution sol;
    sol.c.assign(n, cplx{});
    // back-substitute R c = Q^H b
    std::vector<cplx> qtb(n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx dot{};
        for (std::size_t i = 0; i < m; ++i) dot += std::conj(Q[i][j]) * b[i];
        qtb[j] = dot;
    }
    for (std::size_t j = n; j-- > 0;) {
        cplx acc = qtb[j];
        for (std::size_t p = j + 1; p < n; ++p) acc -= R[j][p] * sol.c[p];
        sol.c[j] = acc / R[j][j];
    }

    // Held-out validation: max relative defect.
    double worst = 0.0;
    for (const cplx& tau : holdout_taus) {
        cplx fit{};
        for (std::size_t j = 0; j < n; ++j) {
            const double u = Rational(zeta[j].alpha, zeta[j].beta).to_double();
            fit += sol.c[j] * appell_a3(cplx(u, 0.0), -tau, tau);
        }
        const cplx truth = detail::rn_times_euler(zeta, tau);
        worst = std::max(worst, std::abs(fit - truth) / std::max(std::abs(truth), 1e-300));
    }
    sol.residual = worst;
    sol.sample_count = static_cast<int>(m + holdout_taus.size());
    sol.usable = worst < unusable_threshold;
    if (!sol.usable)
        throw precision_error("solve_pi_dagger: held-out residual " + std::to_string(worst) +
                              " exceeds the usable threshold");

    sol.pi_dagger.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& e = zeta[j];
        const cplx numer = root_of_unity(-3LL * e.alpha, 2LL * e.beta) -
                           root_of_unity(-e.alpha, 2LL * e.beta);
        sol.pi_dagger[j] = numer / sol.c[j];
    }
    return sol;
}

// Convenience wrapper drawing the tau samples from a seeded generator:
// `samples` fit points plus ceil(samples/2) held-out points, heights in
// [0.4, 1.5].
inline PiDaggerSolution solve_pi_dagger(const RootVector& zeta, int samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    // heights capped below 1: higher up the series value shrinks to the
    // rounding floor and the relative holdout defect turns into noise
    std::uniform_real_distribution<double> re(-0.45, 0.45), im(0.4, 0.95);
    std::vector<cplx> fit, holdout;
    for (int i = 0; i < samples; ++i) fit.emplace_back(re(rng), im(rng));
    for (int i = 0; i < (samples + 1) / 2; ++i) holdout.emplace_back(re(rng), im(rng));
    return solve_pi_dagger(zeta, fit, holdout);
}

} // namespace qmrank

#endif
