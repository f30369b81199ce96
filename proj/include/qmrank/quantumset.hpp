#ifndef QMRANK_QUANTUMSET_HPP
#define QMRANK_QUANTUMSET_HPP

#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "common.hpp"
#include "rational.hpp"
#include "sl2.hpp"

namespace qmrank {

// One component zeta_beta^alpha = e(alpha/beta) of the root-of-unity vector.
struct RootEntry {
    long alpha;
    long beta;

    Rational fraction() const { return Rational(alpha, beta); }
    cplx value() const { return e_of(Rational(alpha, beta).to_double()); }
};

// The vector (zeta_{beta_1}^{alpha_1}, ..., zeta_{beta_n}^{alpha_n}) of
// distinct primitive roots of unity.  Construction validates and rejects
// rather than normalising: entries must arrive reduced, with beta >= 3,
// and no two entries may satisfy alpha_r/beta_r +- alpha_s/beta_s in Z.
class RootVector {
public:
    explicit RootVector(std::vector<RootEntry> entries) : entries_(std::move(entries))
    {
        if (entries_.size() < 2)
            throw domain_error("RootVector: need at least two entries");
        for (const auto& e : entries_) {
            if (e.beta < 3)
                throw domain_error("RootVector: beta must be >= 3 (beta | 2*alpha otherwise)");
            if (std::gcd(e.alpha, e.beta) != 1)
                throw domain_error("RootVector: alpha/beta must be reduced");
        }
        for (std::size_t r = 0; r < entries_.size(); ++r)
            for (std::size_t s = r + 1; s < entries_.size(); ++s) {
                const Rational fr = entries_[r].fraction(), fs = entries_[s].fraction();
                if ((fr + fs).is_integer() || (fr - fs).is_integer())
                    throw domain_error("RootVector: entries " + std::to_string(r) + "," +
                                       std::to_string(s) + " are not independent");
            }
    }

    // Parses "a1/b1,a2/b2,...".
    static RootVector parse(const std::string& text)
    {
        std::vector<RootEntry> entries;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto comma = text.find(',', pos);
            if (comma == std::string::npos) comma = text.size();
            const Rational f = Rational::parse(text.substr(pos, comma - pos));
            if (!f.num().fits_slong_p() || !f.den().fits_slong_p())
                throw domain_error("RootVector: entry out of range");
            entries.push_back({f.num().get_si(), f.den().get_si()});
            pos = comma + 1;
        }
        return RootVector(std::move(entries));
    }

    std::size_t size() const { return entries_.size(); }
    const RootEntry& operator[](std::size_t j) const { return entries_[j]; }
    const std::vector<RootEntry>& entries() const { return entries_; }

    std::vector<cplx> values() const
    {
        std::vector<cplx> v;
        v.reserve(entries_.size());
        for (const auto& e : entries_) v.push_back(e.value());
        return v;
    }

    std::string str() const
    {
        std::string s;
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            if (j) s += ",";
            s += std::to_string(entries_[j].alpha) + "/" + std::to_string(entries_[j].beta);
        }
        return s;
    }

private:
    std::vector<RootEntry> entries_;
};

// Membership in the quantum set: h/k (reduced, k >= 1) belongs iff
//   beta_j does not divide k, and |(alpha_j/beta_j) k - [.]| > 1/6
// for every entry.  Entirely exact rational arithmetic.  The distance
// condition is equivalent to 6 * min(r, beta - r) > beta where
// r = alpha*k mod beta, so the half-integer rounding convention never
// matters here.
struct QuantumSetCheck {
    bool member = true;
    std::string violated; // first violated condition, for reporting
};

inline QuantumSetCheck check_quantum_set(const RootVector& zeta, const Rational& x)
{
    const mpz_class& k = x.den();
    for (std::size_t j = 0; j < zeta.size(); ++j) {
        const auto& e = zeta[j];
        if (mpz_divisible_ui_p(k.get_mpz_t(), static_cast<unsigned long>(e.beta)))
            return {false, "beta_" + std::to_string(j + 1) + " divides k"};
    }
    for (std::size_t j = 0; j < zeta.size(); ++j) {
        const auto& e = zeta[j];
        mpz_class r = e.alpha * k;
        mpz_mod_ui(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(e.beta));
        const mpz_class dist = std::min(mpz_class(r), mpz_class(e.beta - r));
        if (!(6 * dist > e.beta))
            return {false, "distance condition fails at entry " + std::to_string(j + 1)};
    }
    return {};
}

inline bool is_in_quantum_set(const RootVector& zeta, const Rational& x)
{
    return check_quantum_set(zeta, x).member;
}

// The level ell: 6*lcm(beta_1..beta_n)^2, or 2*lcm(...)^2 when some beta is
// divisible by 3.
inline long long ell_of(const RootVector& zeta)
{
    mpz_class l = 1;
    bool div3 = false;
    for (const auto& e : zeta.entries()) {
        mpz_class b(e.beta);
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), b.get_mpz_t());
        if (e.beta % 3 == 0) div3 = true;
    }
    const mpz_class res = (div3 ? 2 : 6) * l * l;
    if (!res.fits_slong_p())
        throw resource_error("ell_of: level does not fit in a machine word");
    return res.get_si();
}

// All pool rationals h/k with 1 <= k <= kmax, |h| <= hmax, gcd(h,k)=1 that
// pass the quantum-set predicate.
inline std::vector<Rational> quantum_pool(const RootVector& zeta, long kmax, long hmax)
{
    std::vector<Rational> pool;
    for (long k = 1; k <= kmax; ++k)
        for (long h = -hmax; h <= hmax; ++h) {
            if (std::gcd(std::abs(h), k) != 1) continue;
            Rational x(h, k);
            if (is_in_quantum_set(zeta, x)) pool.push_back(x);
        }
    return pool;
}

// Randomised closure check: the quantum set should be carried into itself
// by every word in S_ell and T whenever the image is finite.  A violation
// would contradict the closure property and is reported as a bug.
struct ClosureCounterexample {
    std::string word;
    Rational x;
    Rational image;
};

struct ClosureFuzzReport {
    long trials = 0;
    long infinite_images = 0;
    std::vector<ClosureCounterexample> violations;
};

inline ClosureFuzzReport closure_fuzz(const RootVector& zeta, long trials,
                                      int max_word_len, std::uint64_t seed)
{
    const long long ell = ell_of(zeta);
    const std::vector<Rational> pool = quantum_pool(zeta, 200, 200);
    if (pool.empty()) throw invariant_error("closure_fuzz: empty quantum pool");

    ClosureFuzzReport report;
    report.trials = trials;
    static constexpr char alphabet[] = {'S', 's', 'T', 't'};
    for (long trial = 0; trial < trials; ++trial) {
        // Seeding per trial keeps the run order-independent.
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1));
        std::uniform_int_distribution<int> len_dist(1, max_word_len);
        std::uniform_int_distribution<int> letter_dist(0, 3);
        std::uniform_int_distribution<std::size_t> pool_dist(0, pool.size() - 1);

        std::string letters;
        const int len = len_dist(rng);
        for (int i = 0; i < len; ++i) letters.push_back(alphabet[letter_dist(rng)]);
        const GroupWord word(letters, ell);
        const Rational x = pool[pool_dist(rng)];

        const auto image = apply_mobius(word_to_matrix(word), x);
        if (!image) {
            ++report.infinite_images;
            continue;
        }
        if (!is_in_quantum_set(zeta, *image))
            report.violations.push_back({letters, x, *image});
    }
    return report;
}

} // namespace qmrank

#endif
