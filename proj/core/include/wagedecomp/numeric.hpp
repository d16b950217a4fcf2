#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace wagedecomp {

namespace detail {

template <typename F>
double pairwise_sum_impl(std::size_t lo, std::size_t hi, F &term) {
    const std::size_t n = hi - lo;
    if (n <= 16) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            acc += term(i);
        return acc;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum_impl(lo, mid, term) + pairwise_sum_impl(mid, hi, term);
}

} // namespace detail

/// Pairwise (tree) reduction of term(0) + ... + term(n-1). All reductions in
/// the index code funnel through this so results are deterministic and
/// insensitive to accumulation order at the 1e-13 level, which plain
/// left-to-right summation does not guarantee for n in the 1e5+ range.
template <typename F>
double pairwise_sum(std::size_t n, F &&term) {
    if (n == 0)
        return 0.0;
    return detail::pairwise_sum_impl(0, n, term);
}

inline double pairwise_sum(std::span<const double> xs) {
    return pairwise_sum(xs.size(), [&](std::size_t i) { return xs[i]; });
}

/// SplitMix64 step; used to derive independent seed streams from a master
/// seed. Fixed algorithm, identical output on every platform.
inline std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Inverse of the standard normal CDF (Wichura's PPND16 rational
/// approximations, accurate to ~1e-15). Deterministic alternative to
/// std::normal_distribution, whose output is implementation-defined.
double inverse_normal_cdf(double p);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation. Absolute accuracy better than 1e-13 over the parameter
/// ranges exercised here (a, b up to ~1e6).
double regularized_incomplete_beta(double a, double b, double x);

} // namespace wagedecomp
