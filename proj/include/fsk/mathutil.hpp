#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <vector>

namespace fsk {

// exp() for hot tile loops. Cephes-style argument reduction with a two-part
// ln2 constant so the reduced argument is exact; the rational approximation is
// good to ~1.5 ulp over the full range. Written branch-free so the compiler
// can vectorize a loop of calls. Inputs below -708 saturate to a denormal-range
// value (~3e-308), which is indistinguishable from 0 at our tolerances.
inline double fast_exp(double x) {
    x = std::min(std::max(x, -708.0), 709.0);
    double k = std::floor(x * 1.4426950408889634074 + 0.5);
    double r = x - k * 6.93145751953125e-1;
    r -= k * 1.42860682030941723212e-6;
    double rr = r * r;
    double p = r * (9.99999999999999999910e-1 +
                    rr * (3.02994407707441961300e-2 + rr * 1.26177193074810590878e-4));
    double q = 2.00000000000000000005e0 +
               rr * (2.27265548208155028766e-1 +
                     rr * (2.52448340349684104192e-3 + rr * 3.00198505138664455042e-6));
    double e = 1.0 + 2.0 * p / (q - p);
    uint64_t bits;
    std::memcpy(&bits, &e, 8);
    bits += static_cast<uint64_t>(static_cast<int64_t>(k)) << 52;
    std::memcpy(&e, &bits, 8);
    return e;
}

// float flavor for the opt-in single-precision benchmark path
inline float fast_exp(float x) {
    x = std::min(std::max(x, -87.0f), 88.0f);
    float k = std::floor(x * 1.44269504088896341f + 0.5f);
    float r = x - k * 0.693359375f;
    r -= k * -2.12194440e-4f;
    float p = 1.9875691500e-4f;
    p = p * r + 1.3981999507e-3f;
    p = p * r + 8.3334519073e-3f;
    p = p * r + 4.1665795894e-2f;
    p = p * r + 1.6666665459e-1f;
    p = p * r + 5.0000001201e-1f;
    p = p * r * r + r + 1.0f;
    uint32_t bits;
    std::memcpy(&bits, &p, 4);
    bits += static_cast<uint32_t>(static_cast<int32_t>(k)) << 23;
    std::memcpy(&p, &bits, 4);
    return p;
}

// Pairwise (cascade) summation; deterministic and more accurate than a
// running sum. `f(i)` yields the i-th term.
template <typename T, typename F>
T pairwise_sum(std::size_t n, F&& f) {
    if (n == 0) return T(0);
    if (n <= 8) {
        T s = f(std::size_t{0});
        for (std::size_t i = 1; i < n; ++i) s += f(i);
        return s;
    }
    std::size_t h = n / 2;
    auto g = [&](std::size_t i) { return f(h + i); };
    return pairwise_sum<T>(h, f) + pairwise_sum<T>(n - h, g);
}

template <typename T>
T pairwise_sum(std::span<const T> xs) {
    return pairwise_sum<T>(xs.size(), [&](std::size_t i) { return xs[i]; });
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l1_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

inline double linf_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

inline double l2_norm(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

inline bool all_finite(std::span<const double> a) {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

// Direct (non-streaming) LSE of a full row, used by reference paths and tests.
inline double lse(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : xs) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = pairwise_sum<double>(xs.size(), [&](std::size_t i) { return std::exp(xs[i] - m); });
    return m + std::log(s);
}

}  // namespace fsk
