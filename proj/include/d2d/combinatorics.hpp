#pragma once

// Small combinatorics toolbox: exact binomials (overflow-checked), log-space
// binomials for large n, lexicographic enumeration and ranking of k-subsets
// of {1..n}. Subset ranks give subpacket labels a canonical position, which
// pins down transcript layouts and cache indexing.

#include <cmath>
#include <vector>

#include "d2d/common.hpp"

namespace d2d {

inline i64 binomial_i64(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    i128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;  // exact: product of i consecutive ints divisible by i!
        if (acc > i128(INT64_MAX)) throw std::overflow_error("binomial overflow past 64 bits");
    }
    return static_cast<i64>(acc);
}

inline double log_binomial(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Advances a sorted k-subset of {1..n} to its lexicographic successor.
// Returns false when `subset` was the last one (n-k+1, ..., n).
inline bool next_subset(std::vector<int>& subset, int n) {
    int k = static_cast<int>(subset.size());
    for (int i = k - 1; i >= 0; --i) {
        if (subset[i] < n - (k - 1 - i)) {
            ++subset[i];
            for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
            return true;
        }
    }
    return false;
}

inline std::vector<int> first_subset(int k) {
    std::vector<int> s(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) s[i] = i + 1;
    return s;
}

// Lexicographic rank (0-based) of a sorted k-subset of {1..n}.
inline i64 subset_rank(const std::vector<int>& subset, int n) {
    i64 rank = 0;
    int k = static_cast<int>(subset.size());
    int prev = 0;
    for (int i = 0; i < k; ++i) {
        for (int v = prev + 1; v < subset[i]; ++v) rank += binomial_i64(n - v, k - 1 - i);
        prev = subset[i];
    }
    return rank;
}

}  // namespace d2d
