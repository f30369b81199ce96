#ifndef QMRANK_PARTITIONS_HPP
#define QMRANK_PARTITIONS_HPP

#include <cstdint>
#include <vector>

#include "common.hpp"

namespace qmrank {

// Iterates over all partitions of n (parts non-increasing), reverse
// lexicographically, starting from {n}.  Iterative on purpose: memory stays
// linear in n.  n = 0 visits the empty partition once.
template <typename Visit>
void for_each_partition(int n, Visit&& visit)
{
    if (n < 0) throw domain_error("for_each_partition: n must be >= 0");
    std::vector<int> a;
    if (n == 0) {
        visit(a);
        return;
    }
    a.push_back(n);
    visit(a);
    while (!(a[0] == 1)) {
        // Strip trailing 1s, decrement the rightmost part > 1, then refill
        // greedily with parts no larger than it.
        int rem = 0;
        while (a.back() == 1) {
            ++rem;
            a.pop_back();
        }
        a.back() -= 1;
        ++rem;
        const int v = a.back();
        while (rem > v) {
            a.push_back(v);
            rem -= v;
        }
        if (rem > 0) a.push_back(rem);
        visit(a);
    }
}

// p(n) by Euler's pentagonal-number recurrence:
//   p(n) = sum_{k>=1} (-1)^{k-1} [ p(n - k(3k-1)/2) + p(n - k(3k+1)/2) ].
// int64 holds p(n) up to n = 400; beyond that we refuse rather than wrap.
inline std::int64_t partition_count(int n)
{
    if (n < 0) throw domain_error("partition_count: n must be >= 0");
    if (n > 400) throw resource_error("partition_count: int64 overflow past n = 400");
    static thread_local std::vector<std::int64_t> memo{1};
    for (int m = static_cast<int>(memo.size()); m <= n; ++m) {
        std::int64_t total = 0;
        for (int k = 1;; ++k) {
            const int g1 = k * (3 * k - 1) / 2;
            const int g2 = k * (3 * k + 1) / 2;
            if (g1 > m) break;
            const std::int64_t sign = (k % 2 == 1) ? 1 : -1;
            total += sign * memo[m - g1];
            if (g2 <= m) total += sign * memo[m - g2];
        }
        memo.push_back(total);
    }
    return memo[static_cast<std::size_t>(n)];
}

// p(n) by direct enumeration; the independent cross-check for the
// recurrence (and deliberately naive).
inline std::int64_t partition_count_by_enumeration(int n)
{
    std::int64_t count = 0;
    for_each_partition(n, [&](const std::vector<int>&) { ++count; });
    return count;
}

// N(m, n): number of partitions of n with rank (largest part minus number
// of parts) equal to m.  The empty partition has rank 0, so N(m,0) is the
// Kronecker delta.
inline std::int64_t rank_count(int m, int n)
{
    if (n < 0) throw domain_error("rank_count: n must be >= 0");
    std::int64_t count = 0;
    for_each_partition(n, [&](const std::vector<int>& a) {
        const int rank = a.empty() ? 0 : a[0] - static_cast<int>(a.size());
        if (rank == m) ++count;
    });
    return count;
}

} // namespace qmrank

#endif
