// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail.  Tolerances are fixed here, in code; each line reports the measured
// quantity next to its bound.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <qmrank/qmrank.hpp>

using namespace qmrank;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int number, const std::string& name, bool pass, const std::string& detail,
            double seconds)
{
    std::printf("%s  criterion %2d: %s (%s, %.1fs)\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

const RootVector& v45()
{
    static const RootVector v{{{1, 4}, {1, 5}}};
    return v;
}
const RootVector& v35()
{
    static const RootVector v{{{1, 3}, {1, 5}}};
    return v;
}

const PiDaggerSolution& pi45()
{
    static const PiDaggerSolution p = solve_pi_dagger(v45(), 8, 424242);
    return p;
}

// A_n values at rationals are reused across the cocycle checks; the big
// finite sums dominate the runtime, so cache them by (h mod k, k).
cplx a_n_cached(const RootVector& zeta, const Rational& x)
{
    static std::map<std::string, cplx> memo;
    const Rational frac = x - Rational(x.floor(), 1);
    const std::string key = zeta.str() + "|" + frac.str();
    auto it = memo.find(key);
    cplx r_value;
    if (it != memo.end()) {
        r_value = it->second;
    } else {
        r_value = rn_finite_sum(zeta, x, 2).value;
        memo.emplace(key, r_value);
    }
    const Rational ph = -x / Rational(24);
    return e_of(Rational(ph - Rational(ph.floor(), 1)).to_double()) * r_value;
}

cplx h_direct_cached(const RootVector& zeta, const GroupWord& gamma, const Rational& x)
{
    const SL2Matrix m = word_to_matrix(gamma);
    const auto image = apply_mobius(m, x);
    if (!image) throw pole_error("h_direct_cached: image at infinity");
    const Rational jx = Rational(m.c, 1) * x + Rational(m.d, 1);
    const cplx jfac(jx.to_double(), m.c < 0 ? -0.0 : +0.0);
    return a_n_cached(zeta, x) -
           chi_eta(m) * (1.0 / sqrt_principal(jfac)) * a_n_cached(zeta, *image);
}

// ---------------------------------------------------------------------------

void criterion1()
{
    Timer t;
    bool ok = true;
    std::string detail;
    for (int n = 0; n <= 30 && ok; ++n)
        ok = partition_count(n) == partition_count_by_enumeration(n);
    if (!ok) detail = "p(n) recurrence/enumeration mismatch";
    if (ok && rank_count(-2, 7) != 2) { ok = false; detail = "rank -2 count of 7"; }
    for (int m = -3; m <= 3 && ok; ++m)
        if (rank_count(m, 0) != (m == 0 ? 1 : 0)) { ok = false; detail = "N(m,0)"; }

    const IntSeries at1 = r1_series(std::int64_t{1}, 25);
    for (int n = 0; n <= 25 && ok; ++n)
        if (at1[n] != partition_count(n)) { ok = false; detail = "R_1(1;q) vs p(n)"; }

    // independent expansion of the third-order mock theta f(q)
    IntSeries f(25);
    for (int n = 0; n * n <= 25; ++n) {
        IntSeries denom = IntSeries::one(25);
        for (int j = 1; j <= n; ++j) {
            denom.mul_binomial(std::int64_t{1}, j);
            denom.mul_binomial(std::int64_t{1}, j);
        }
        f = f + denom.inverse().shifted(n * n);
    }
    const IntSeries atm1 = r1_series(std::int64_t{-1}, 25);
    for (int n = 0; n <= 25 && ok; ++n)
        if (atm1[n] != f[n]) { ok = false; detail = "R_1(-1;q) vs f(q)"; }

    if (ok) detail = "exact integer equality throughout";
    report(1, "combinatorial exactness", ok && t.seconds() < 10.0, detail, t.seconds());
}

void criterion2()
{
    Timer t;
    const IntSeries lhs = rn_multisum_series(std::vector<std::int64_t>{1, 1}, 20);
    const IntSeries rhs = bringmann_r2_series(20);
    bool ok = true;
    for (int n = 0; n <= 20; ++n)
        if (lhs[n] != rhs[n]) ok = false;
    report(2, "n=2 multisum equals the quasimock series", ok && t.seconds() < 30.0,
           "exact agreement through q^20", t.seconds());
}

void criterion3()
{
    Timer t;
    const auto table = verify_zwegers_battery(25, 20250809, /*all_shifts=*/true);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu residuals, max/tol ratio %.2e", table.size(),
                  [&] {
                      double w = 0;
                      for (const auto& e : table) w = std::max(w, e.residual / e.tolerance);
                      return w;
                  }());
    report(3, "theta/R/g/Appell transformation battery", all_pass(table) && t.seconds() < 120.0,
           buf, t.seconds());
}

void criterion4()
{
    Timer t;
    const auto table = verify_eta_battery(2400, 100, 20, 20250809);
    int transforms = 0;
    for (const auto& e : table)
        if (e.name.rfind("eta transform", 0) == 0) ++transforms;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu entries (%d transform pairs), max residual %.2e",
                  table.size(), transforms, max_residual(table));
    report(4, "eta multiplier consistency", all_pass(table) && transforms >= 350 &&
           t.seconds() < 60.0, buf, t.seconds());
}

void criterion5()
{
    Timer t;
    bool ok = true;
    long total_violations = 0;
    for (const RootVector* v : {&v45(), &v35()}) {
        const auto rep = closure_fuzz(*v, 500, 8, 42);
        total_violations += static_cast<long>(rep.violations.size());
        ok = ok && rep.trials == 500 && rep.violations.empty();
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "2x500 trials, %ld violations", total_violations);
    report(5, "quantum-set closure fuzz", ok && t.seconds() < 5.0, buf, t.seconds());
}

void criterion6()
{
    Timer t;
    // Every pool member with k <= 8 (canonical representatives h in [0, k)).
    std::vector<Rational> pool;
    for (long k = 1; k <= 8; ++k)
        for (long h = 0; h < k; ++h) {
            if (std::gcd(h, k) != 1 && !(h == 0 && k == 1)) continue;
            const Rational x(h, k);
            if (is_in_quantum_set(v45(), x)) pool.push_back(x);
        }
    std::vector<double> heights;
    for (int m = 3; m <= 10; ++m) heights.push_back(1.0 - std::pow(2.0, -m));

    bool ok = true;
    double worst_gap = 0.0, worst_richardson = 0.0;
    bool monotone = true;
    for (const auto& x : pool) {
        const cplx target = rn_finite_sum(v45(), x).value;
        const auto probe = radial_limit_probe(v45(), x, heights);
        std::vector<double> gaps;
        for (const auto& ev : probe) gaps.push_back(std::abs(ev.value - target));
        worst_gap = std::max(worst_gap, gaps.back());
        const cplx extrapolated =
            2.0 * probe[probe.size() - 1].value - probe[probe.size() - 2].value;
        worst_richardson = std::max(worst_richardson, std::abs(extrapolated - target));
        for (std::size_t i = 3; i + 1 < gaps.size(); ++i) // m >= 6
            if (!(gaps[i + 1] < gaps[i])) monotone = false;
        if (gaps.back() >= 1e-3) ok = false;
    }
    ok = ok && monotone;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%zu pool points; monotone gaps (m>=6): %s; worst final gap %.3e vs 1e-3 "
                  "(first-order approach, gap ~ C 2^-m; Richardson-extrapolated gap %.1e)",
                  pool.size(), monotone ? "yes" : "no", worst_gap, worst_richardson);
    report(6, "Abel/radial consistency", ok && t.seconds() < 300.0, buf, t.seconds());
}

void criterion7()
{
    Timer t;
    bool ok = true;
    double worst = 0.0;
    for (const RootVector* v : {&v45(), &v35()}) {
        const PiDaggerSolution base = solve_pi_dagger(*v, 8, 424242);
        const PiDaggerSolution doubled = solve_pi_dagger(*v, 16, 424242);
        worst = std::max(worst, base.residual);
        ok = ok && base.usable && base.residual < 1e-7;
        for (std::size_t j = 0; j < base.c.size(); ++j) {
            const double drift = std::abs(doubled.c[j] - base.c[j]) / std::abs(base.c[j]);
            worst = std::max(worst, drift);
            ok = ok && drift < 1e-7;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst held-out residual / coefficient drift %.2e", worst);
    report(7, "Appell decomposition constants", ok && t.seconds() < 60.0, buf, t.seconds());
}

void criterion8()
{
    Timer t;
    const long long ell = ell_of(v45());
    bool ok = true;
    double worst = 0.0;
    // T at ordinary heights
    for (double y : {0.5, 0.7, 0.9, 1.1, 1.3}) {
        const double r = a_hat_modularity_residual(v45(), UhPoint(cplx(0.13, y)), pi45(),
                                                   GroupWord("T", ell));
        worst = std::max(worst, r);
        ok = ok && r < 1e-6;
    }
    // S_ell on the accessible band: both tau and S_ell tau sit at height
    // ~1/ell, where the high-precision multisum kernel takes over.
    for (double c : {0.8, 1.0, 1.25, 1.6, 2.0}) {
        const cplx tau(-1.0 / ell, c / ell);
        const double r = a_hat_modularity_residual(v45(), UhPoint(tau), pi45(),
                                                   GroupWord("S", ell));
        worst = std::max(worst, r);
        ok = ok && r < 1e-6;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "10 points, worst residual %.2e vs 1e-6", worst);
    report(8, "completed-form modularity in H", ok && t.seconds() < 120.0, buf, t.seconds());
}

void criterion9()
{
    Timer t;
    const long long ell = ell_of(v45());
    bool ok = true;
    std::string detail;

    // two-way Theorem verification at x = 0 and x = 1/3 (the gate), plus
    // the other pooled rationals whose S_ell-image denominator stays near
    // ell (h*ell + k <= 2500; larger h scales the high-precision sums out
    // of the time budget without changing what is being tested)
    double worst_two_way = 0.0;
    std::vector<Rational> two_way_points{Rational(0), Rational(1, 3)};
    for (long k = 2; k <= 8; ++k) {
        const Rational x(1, k);
        if (x == Rational(1, 3) || !is_in_quantum_set(v45(), x)) continue;
        two_way_points.push_back(x);
    }
    for (const Rational& x : two_way_points) {
        const cplx direct = h_direct_cached(v45(), GroupWord("S", ell), x);
        const HClosedForm cf = h_closed_form_s_ell(v45(), cplx(x.to_double(), 0.0), pi45(), 1e-9);
        worst_two_way = std::max(worst_two_way, std::abs(direct - cf.value));
    }
    ok = ok && worst_two_way < 1e-5;

    // H_T vanishes at every pooled rational with k <= 8
    double worst_t = 0.0;
    for (long k = 1; k <= 8; ++k)
        for (long h = 0; h < k; ++h) {
            if (std::gcd(h, k) != 1 && !(h == 0 && k == 1)) continue;
            const Rational x(h, k);
            if (!is_in_quantum_set(v45(), x)) continue;
            worst_t = std::max(worst_t,
                               std::abs(h_direct_cached(v45(), GroupWord("T", ell), x)));
        }
    ok = ok && worst_t < 1e-12;

    // cocycle composition on ten word pairs chosen to keep the image
    // denominators near ell (the finite sums stay tractable there)
    struct Pair { const char* g; const char* gp; Rational x; };
    const std::vector<Pair> pairs{
        {"S", "T", Rational(0)},  {"T", "S", Rational(0)},  {"S", "S", Rational(0)},
        {"T", "T", Rational(1, 3)}, {"T", "S", Rational(1, 3)}, {"s", "S", Rational(1, 3)},
        {"T", "t", Rational(0)},  {"t", "T", Rational(1, 3)}, {"S", "t", Rational(0)},
        {"TT", "T", Rational(0)}};
    double worst_comp = 0.0;
    for (const auto& p : pairs) {
        const GroupWord g(p.g, ell), gp(p.gp, ell);
        const GroupWord composite(g.letters + gp.letters, ell);
        const SL2Matrix mp = word_to_matrix(gp);
        const auto image = apply_mobius(mp, p.x);
        const Rational jx = Rational(mp.c, 1) * p.x + Rational(mp.d, 1);
        const cplx jfac(jx.to_double(), mp.c < 0 ? -0.0 : +0.0);
        const cplx lhs = h_direct_cached(v45(), composite, p.x);
        const cplx rhs = h_direct_cached(v45(), gp, p.x) +
                         chi_eta(mp) * (1.0 / sqrt_principal(jfac)) *
                             h_direct_cached(v45(), g, *image);
        worst_comp = std::max(worst_comp, std::abs(lhs - rhs));
    }
    ok = ok && worst_comp < 1e-6;

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "two-way %.2e vs 1e-5; H_T %.2e vs 1e-12; composition %.2e vs 1e-6",
                  worst_two_way, worst_t, worst_comp);
    report(9, "two-way cocycle verification (S_2400)", ok && t.seconds() < 600.0, buf,
           t.seconds());
}

void criterion10()
{
    Timer t;
    const long long ell = ell_of(v45());
    const auto xs = continuity_grid(ell, 50);
    const auto scan = continuity_scan(v45(), pi45(), xs, 1e-8);
    bool ok = scan.size() == 50;
    double worst_ratio = 0.0;
    for (const auto& s : scan) {
        const double bound = 10.0 * std::max(s.quad_error, 1e-9);
        worst_ratio = std::max(worst_ratio, s.jump / bound);
        if (!(s.jump < bound)) ok = false;
        if (!is_finite(s.value)) ok = false;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "50 points, worst jump/bound %.3f", worst_ratio);
    report(10, "continuity witness for the closed form", ok && t.seconds() < 300.0, buf,
           t.seconds());
}

} // namespace

int main()
{
    std::printf("acceptance suite: zeta = (e(1/4), e(1/5)) and (e(1/3), e(1/5))\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (failures) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
