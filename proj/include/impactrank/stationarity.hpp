#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "impactrank/error.hpp"
#include "impactrank/mathutil.hpp"
#include "impactrank/percentile.hpp"

namespace impactrank {

enum class StationarityTestKind { adf, kpss };

/// 5% critical values for the drift-no-trend test equations used here.
/// Short series make asymptotic tables rough, so both constants are pinned
/// against a 50,000-replication Monte Carlo quantile in the acceptance suite.
inline constexpr double kAdfDriftCritical5 = -2.89;
inline constexpr double kKpssLevelCritical5 = 0.463;

struct StationarityResult {
    StationarityTestKind test = StationarityTestKind::adf;
    double statistic = 0.0;
    double critical_5pct = 0.0;
    bool reject_null = false;   // ADF null: unit root; KPSS null: stationary
    std::size_t series_length = 0;
    bool degenerate = false;
};

/// Dickey-Fuller regression with drift and no trend:
///   dx_t = a + rho * x_{t-1} + sum_i phi_i * dx_{t-i} + e_t
/// The statistic is the t-ratio of rho. More negative means stronger
/// rejection of the unit-root null; reject at 5% when it falls below the
/// critical value. The lag order defaults to 1, which is all the short
/// series handled here can support.
inline StationarityResult adf_test(std::span<const double> x, int lags = 1) {
    const std::size_t n = x.size();
    if (n < 10) throw DomainError("adf_test: need at least 10 observations");
    if (lags < 0) throw DomainError("adf_test: negative lag order");
    bool constant = true;
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] != x[0]) {
            constant = false;
            break;
        }
    if (constant) throw DegenerateInputError("adf_test: constant series");

    std::vector<double> dx(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = x[i + 1] - x[i];

    const std::size_t first = static_cast<std::size_t>(lags) + 1;  // index into x
    if (n <= first + static_cast<std::size_t>(lags) + 3)
        throw DomainError("adf_test: series too short for the requested lag order");
    const std::size_t rows = n - first;

    std::vector<std::vector<double>> cols(2 + static_cast<std::size_t>(lags),
                                          std::vector<double>(rows));
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;
        y[r] = dx[t - 1];          // dx_t
        cols[0][r] = 1.0;          // drift
        cols[1][r] = x[t - 1];     // lagged level
        for (int l = 1; l <= lags; ++l)
            cols[1 + static_cast<std::size_t>(l)][r] = dx[t - 1 - static_cast<std::size_t>(l)];
    }

    const LsqFit fit = least_squares(cols, y);
    if (fit.se[1] == 0.0) throw DegenerateInputError("adf_test: degenerate regression");
    StationarityResult res;
    res.test = StationarityTestKind::adf;
    res.statistic = fit.coef[1] / fit.se[1];
    res.critical_5pct = kAdfDriftCritical5;
    res.reject_null = res.statistic < res.critical_5pct;
    res.series_length = n;
    return res;
}

/// KPSS level-stationarity statistic with a Bartlett-window Newey-West
/// long-run variance, bandwidth floor(4 * (n/100)^(1/4)). More positive means
/// stronger rejection of the stationarity null; reject at 5% when above the
/// critical value. A constant series yields statistic 0, flagged degenerate.
inline StationarityResult kpss_test(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 10) throw DomainError("kpss_test: need at least 10 observations");
    bool constant = true;
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] != x[0]) {
            constant = false;
            break;
        }
    const double m = mean(x);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = x[i] - m;

    double cumulative = 0.0, s2_sum = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cumulative += e[i];
        s2_sum += cumulative * cumulative;
        e2 += e[i] * e[i];
    }

    StationarityResult res;
    res.test = StationarityTestKind::kpss;
    res.critical_5pct = kKpssLevelCritical5;
    res.series_length = n;
    if (constant || e2 == 0.0) {
        res.degenerate = true;
        res.statistic = 0.0;
        res.reject_null = false;
        return res;
    }

    const int bandwidth = static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    double long_run = e2;
    for (int lag = 1; lag <= bandwidth; ++lag) {
        double gamma = 0.0;
        for (std::size_t t = static_cast<std::size_t>(lag); t < n; ++t)
            gamma += e[t] * e[t - static_cast<std::size_t>(lag)];
        const double w = 1.0 - static_cast<double>(lag) / (static_cast<double>(bandwidth) + 1.0);
        long_run += 2.0 * w * gamma;
    }
    long_run /= static_cast<double>(n);
    if (long_run <= 0.0) {
        // heavy negative autocorrelation can push the Bartlett estimate to
        // zero on tiny samples; fall back to the plain variance
        long_run = e2 / static_cast<double>(n);
    }

    res.statistic = s2_sum / (static_cast<double>(n) * static_cast<double>(n) * long_run);
    res.reject_null = res.statistic > res.critical_5pct;
    return res;
}

/// Differenced percentile series relative to age t1: d(t2) = v(t2) - v(t1)
/// for every t2 > t1 the series holds.
inline std::map<int, double> difference(const PercentileSeries& series, int t1) {
    auto base = series.values.find(t1);
    if (base == series.values.end())
        throw EligibilityError("series " + series.entity_id + " lacks age " + std::to_string(t1));
    std::map<int, double> out;
    for (auto it = series.values.upper_bound(t1); it != series.values.end(); ++it)
        out[it->first] = it->second - base->second;
    return out;
}

}  // namespace impactrank
