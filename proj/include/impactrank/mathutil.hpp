#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impactrank/error.hpp"

namespace impactrank {

// ---------------------------------------------------------------------------
// Seeding and deterministic random draws.
//
// std::mt19937_64 is fully specified by the standard; the distribution
// adapters in <random> are not. Every stochastic routine in this library
// therefore draws through the helpers below so that a given seed produces the
// same stream on every platform.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    return fnv1a64(std::string_view(static_cast<const char*>(data), n));
}

/// Derive an operation-specific sub-seed from one master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view op_name) {
    return splitmix64(master ^ fnv1a64(op_name));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_below: n must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

/// Standard normal via Box-Muller (one value per call, cache-free for determinism).
inline double normal01(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double lognormal(Rng& rng, double mu, double sigma) {
    return std::exp(mu + sigma * normal01(rng));
}

/// Poisson draw. Knuth's product method below 30, rounded normal above
/// (adequate for synthetic-data generation, not inference).
inline long poisson(Rng& rng, double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 30.0) {
        const double threshold = std::exp(-lambda);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01(rng);
        } while (p > threshold);
        return k - 1;
    }
    const double v = lambda + std::sqrt(lambda) * normal01(rng);
    return v > 0.0 ? static_cast<long>(std::llround(v)) : 0;
}

/// Deterministic in-place Fisher-Yates shuffle.
template <typename T>
void shuffle_inplace(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// ---------------------------------------------------------------------------
// Elementary statistics.
// ---------------------------------------------------------------------------

inline double mean(std::span<const double> x) {
    if (x.empty()) throw DomainError("mean of empty range");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Population variance (divides by n).
inline double variance(std::span<const double> x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

inline double median_of_sorted(std::span<const double> sorted) {
    if (sorted.empty()) throw DomainError("median of empty range");
    const std::size_t n = sorted.size();
    return (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

inline double median(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    return median_of_sorted(x);
}

/// Linear-interpolation quantile of a sorted sample, q in [0,1]
/// (index h = q*(n-1), the convention most stats packages default to).
inline double quantile_of_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile of empty range");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> x, double q) {
    std::sort(x.begin(), x.end());
    return quantile_of_sorted(x, q);
}

// ---------------------------------------------------------------------------
// Distribution functions.
// ---------------------------------------------------------------------------

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Continued-fraction evaluation of the regularized incomplete beta function.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 200;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

inline double student_t_cdf(double t, double df) {
    const double p = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return t > 0.0 ? 1.0 - p : p;
}

inline double student_t_two_sided_p(double t, double df) {
    return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

// ---------------------------------------------------------------------------
// Small dense least squares (for test regressions with a handful of columns).
// ---------------------------------------------------------------------------

struct LsqFit {
    std::vector<double> coef;
    std::vector<double> se;     // classical homoskedastic standard errors
    std::vector<double> residuals;
    double sse = 0.0;
};

/// Gauss-Jordan inverse with partial pivoting. Throws on (near-)singular input.
inline std::vector<std::vector<double>> invert_matrix(std::vector<std::vector<double>> a) {
    const std::size_t k = a.size();
    std::vector<std::vector<double>> inv(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-12) throw DegenerateInputError("singular design matrix");
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < k; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < k; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

/// Least squares of y on the given columns (no implicit intercept; pass a
/// column of ones if one is wanted). Standard errors use sigma^2 (X'X)^-1
/// with sigma^2 = SSE / (n - k).
inline LsqFit least_squares(const std::vector<std::vector<double>>& columns,
                            std::span<const double> y) {
    const std::size_t k = columns.size();
    if (k == 0) throw DomainError("least_squares: no columns");
    const std::size_t n = y.size();
    for (const auto& c : columns)
        if (c.size() != n) throw DomainError("least_squares: column length mismatch");
    if (n <= k) throw DegenerateInputError("least_squares: need more rows than columns");

    std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
    std::vector<double> xty(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += columns[i][r] * columns[j][r];
            xtx[i][j] = xtx[j][i] = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += columns[i][r] * y[r];
        xty[i] = s;
    }

    const auto inv = invert_matrix(xtx);
    LsqFit fit;
    fit.coef.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) fit.coef[i] += inv[i][j] * xty[j];

    fit.residuals.assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        double pred = 0.0;
        for (std::size_t i = 0; i < k; ++i) pred += columns[i][r] * fit.coef[i];
        fit.residuals[r] = y[r] - pred;
        fit.sse += fit.residuals[r] * fit.residuals[r];
    }
    const double sigma2 = fit.sse / static_cast<double>(n - k);
    fit.se.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) fit.se[i] = std::sqrt(std::max(0.0, sigma2 * inv[i][i]));
    return fit;
}

}  // namespace impactrank
