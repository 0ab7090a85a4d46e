#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "impactrank/error.hpp"
#include "impactrank/mathutil.hpp"
#include "impactrank/percentile.hpp"

namespace impactrank {

/// Sample Pearson correlation. Requires two or more observations and nonzero
/// variance on both sides.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("pearson: length mismatch");
    if (x.size() < 2) throw DegenerateInputError("pearson: need at least two observations");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// Simple linear regression with intercept. slope_se is the classical
/// homoskedastic standard error; r2 = 1 - SSE/SST, defined as 0 for a
/// constant response.
inline OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("ols_fit: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw DegenerateInputError("ols_fit: need at least three observations");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DegenerateInputError("ols_fit: constant regressor");
    OlsFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        sse += r * r;
    }
    const double sigma2 = sse / static_cast<double>(n - 2);
    fit.slope_se = std::sqrt(std::max(0.0, sigma2 / sxx));
    fit.r2 = syy == 0.0 ? 0.0 : 1.0 - sse / syy;
    return fit;
}

/// Two-sided slope test of y against x at the given level. Used to make the
/// cohort-stationarity check explicit instead of visual.
struct TrendTest {
    OlsFit fit;
    double t_stat = 0.0;
    double p_value = 1.0;
    bool significant = false;
};

inline TrendTest trend_test(std::span<const double> x, std::span<const double> y,
                            double alpha = 0.05) {
    TrendTest t;
    t.fit = ols_fit(x, y);
    if (t.fit.slope_se == 0.0) {
        t.t_stat = t.fit.slope == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        t.p_value = t.fit.slope == 0.0 ? 1.0 : 0.0;
    } else {
        t.t_stat = t.fit.slope / t.fit.slope_se;
        t.p_value = student_t_two_sided_p(t.t_stat, static_cast<double>(t.fit.n - 2));
    }
    t.significant = t.p_value < alpha;
    return t;
}

// ---------------------------------------------------------------------------
// Stability matrices over age pairs.
// ---------------------------------------------------------------------------

/// Cells are defined for t1 < t2 only.
struct AgePairMatrix {
    std::vector<int> t1_values;
    std::vector<int> t2_values;
    std::map<std::pair<int, int>, double> cells;
    std::size_t n_entities = 0;

    double at(int t1, int t2) const {
        auto it = cells.find({t1, t2});
        if (it == cells.end()) throw DomainError("no cell for the requested age pair");
        return it->second;
    }
};

/// Pearson correlation between percentiles at t1 and t2 across entities, for
/// every requested pair with t1 < t2. Restricted to entities holding values
/// at all requested ages so every cell sees the same population.
inline AgePairMatrix stability_matrix(const SeriesSet& series, const std::vector<int>& t1_list,
                                      const std::vector<int>& t2_list) {
    std::vector<int> all_ages;
    for (int t : t1_list) all_ages.push_back(t);
    for (int t : t2_list) all_ages.push_back(t);
    std::sort(all_ages.begin(), all_ages.end());
    all_ages.erase(std::unique(all_ages.begin(), all_ages.end()), all_ages.end());

    std::vector<const PercentileSeries*> complete;
    for (const auto& [id, s] : series.by_entity)
        if (s.has_ages(all_ages)) complete.push_back(&s);
    if (complete.size() < 2)
        throw DegenerateInputError("stability_matrix: fewer than two entities with full series");

    AgePairMatrix m;
    m.t1_values = t1_list;
    m.t2_values = t2_list;
    m.n_entities = complete.size();
    for (int t1 : t1_list) {
        std::vector<double> x;
        x.reserve(complete.size());
        for (const auto* s : complete) x.push_back(s->values.at(t1));
        for (int t2 : t2_list) {
            if (t1 >= t2) continue;
            std::vector<double> y;
            y.reserve(complete.size());
            for (const auto* s : complete) y.push_back(s->values.at(t2));
            m.cells[{t1, t2}] = pearson(x, y);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Agreement classes.
// ---------------------------------------------------------------------------

/// Quartile class of a percentile: 1 on [0,0.25), 2 on [0.25,0.5),
/// 3 on [0.5,0.75), 4 on [0.75,1].
inline int classify_percentile(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("percentile outside [0,1]");
    if (v < 0.25) return 1;
    if (v < 0.5) return 2;
    if (v < 0.75) return 3;
    return 4;
}

struct AgreementResult {
    double fraction = 0.0;
    std::size_t n = 0;
    // table[i][j]: entities with class i+1 under the first series and class
    // j+1 under the second
    std::array<std::array<std::size_t, 4>, 4> table{};
};

inline AgreementResult agreement(const std::map<std::string, double>& a,
                                 const std::map<std::string, double>& b) {
    AgreementResult res;
    std::size_t agree = 0;
    for (const auto& [id, va] : a) {
        auto it = b.find(id);
        if (it == b.end()) continue;
        const int ca = classify_percentile(va);
        const int cb = classify_percentile(it->second);
        ++res.table[ca - 1][cb - 1];
        ++res.n;
        if (ca == cb) ++agree;
    }
    if (res.n == 0) throw DegenerateInputError("agreement: no common entities");
    res.fraction = static_cast<double>(agree) / static_cast<double>(res.n);
    return res;
}

struct ThreeWayAgreement {
    double fraction = 0.0;  // all three classes coincide
    std::size_t n = 0;
    AgreementResult ab, ac, bc;
};

inline ThreeWayAgreement agreement(const std::map<std::string, double>& a,
                                   const std::map<std::string, double>& b,
                                   const std::map<std::string, double>& c) {
    ThreeWayAgreement res;
    res.ab = agreement(a, b);
    res.ac = agreement(a, c);
    res.bc = agreement(b, c);
    std::size_t agree = 0, n = 0;
    for (const auto& [id, va] : a) {
        auto itb = b.find(id);
        auto itc = c.find(id);
        if (itb == b.end() || itc == c.end()) continue;
        ++n;
        const int ca = classify_percentile(va);
        if (ca == classify_percentile(itb->second) && ca == classify_percentile(itc->second))
            ++agree;
    }
    if (n == 0) throw DegenerateInputError("agreement: no common entities");
    res.n = n;
    res.fraction = static_cast<double>(agree) / static_cast<double>(n);
    return res;
}

// ---------------------------------------------------------------------------
// Wilcoxon paired signed-rank test.
// ---------------------------------------------------------------------------

struct WilcoxonResult {
    double statistic = 0.0;  // W+, the positive-difference rank sum
    double p_value = 1.0;    // two-sided
    std::size_t n_used = 0;  // pairs remaining after zero differences dropped
    bool exact = false;
    bool degenerate = false;  // all differences were zero
};

namespace detail {

/// Exact two-sided p-value for W+ given the (midrank-tied) ranks, via a
/// subset-sum count over doubled ranks. Doubled midranks are integers, so the
/// distribution under random signs is computed without rounding.
inline double wilcoxon_exact_p(const std::vector<double>& ranks, double w_plus) {
    const std::size_t n = ranks.size();
    std::vector<long> doubled(n);
    long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = std::lround(2.0 * ranks[i]);
        total += doubled[i];
    }
    // count[s]: number of sign assignments whose positive doubled-rank sum is s
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    long reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
        reach += doubled[i];
        for (long s = reach; s >= doubled[i]; --s) count[s] += count[s - doubled[i]];
    }
    const double denom = std::pow(2.0, static_cast<double>(n));
    const long w2 = std::lround(2.0 * w_plus);
    double below = 0.0, above = 0.0;
    for (long s = 0; s <= total; ++s) {
        if (s <= w2) below += count[s];
        if (s >= w2) above += count[s];
    }
    return std::min(1.0, 2.0 * std::min(below, above) / denom);
}

}  // namespace detail

/// Two-sided paired signed-rank test. Zero differences are dropped before
/// ranking. Exact distribution for 25 or fewer remaining pairs, normal
/// approximation with tie correction and continuity correction above that.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("wilcoxon: length mismatch");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult res;
    if (diffs.empty()) {
        res.degenerate = true;
        res.p_value = 1.0;
        return res;
    }
    const std::size_t n = diffs.size();
    res.n_used = n;
    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::fabs(diffs[i]);
    const std::vector<double> ranks = hazen_average_ranks(abs_d);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (diffs[i] > 0.0) w_plus += ranks[i];
    res.statistic = w_plus;

    if (n <= 25) {
        res.exact = true;
        res.p_value = detail::wilcoxon_exact_p(ranks, w_plus);
        return res;
    }

    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    double tie_correction = 0.0;
    {
        std::vector<double> sorted = abs_d;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_correction += (t * t * t - t) / 48.0;
            i = j + 1;
        }
    }
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_correction;
    if (var <= 0.0) {
        res.degenerate = true;
        res.p_value = 1.0;
        return res;
    }
    const double z = (std::fabs(w_plus - mu) - 0.5) / std::sqrt(var);
    res.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::max(0.0, z))));
    return res;
}

// ---------------------------------------------------------------------------
// Log-binned averages.
// ---------------------------------------------------------------------------

/// Entities are grouped by their late value into n_bins equal intervals on
/// the log scale over the positive range; zero late values occupy a dedicated
/// first bin. Returns (mean early, mean late) per populated bin, bins ordered
/// low to high.
inline std::vector<std::pair<double, double>> log_binned_average(
    const std::map<std::string, double>& values_early,
    const std::map<std::string, double>& values_late, int n_bins) {
    if (n_bins < 1) throw DomainError("log_binned_average: need at least one bin");
    std::vector<std::pair<double, double>> points;  // (early, late) per entity
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& [id, late] : values_late) {
        auto it = values_early.find(id);
        if (it == values_early.end()) continue;
        if (late < 0.0) throw DomainError("log_binned_average: negative late value");
        points.emplace_back(it->second, late);
        if (late > 0.0) {
            lo = std::min(lo, late);
            hi = std::max(hi, late);
        }
    }
    if (points.empty()) throw DegenerateInputError("log_binned_average: no common entities");

    const bool has_positive = hi > 0.0;
    const double log_lo = has_positive ? std::log(lo) : 0.0;
    const double log_hi = has_positive ? std::log(hi) : 0.0;
    const double width = (log_hi - log_lo) / static_cast<double>(n_bins);

    // bin 0 holds zeros; bins 1..n_bins split [log lo, log hi]
    std::vector<double> sum_early(static_cast<std::size_t>(n_bins) + 1, 0.0);
    std::vector<double> sum_late(static_cast<std::size_t>(n_bins) + 1, 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(n_bins) + 1, 0);
    for (const auto& [early, late] : points) {
        std::size_t bin = 0;
        if (late > 0.0) {
            if (width == 0.0) {
                bin = 1;
            } else {
                const int idx = static_cast<int>((std::log(late) - log_lo) / width);
                bin = 1 + static_cast<std::size_t>(std::clamp(idx, 0, n_bins - 1));
            }
        }
        sum_early[bin] += early;
        sum_late[bin] += late;
        ++count[bin];
    }
    std::vector<std::pair<double, double>> out;
    for (std::size_t b = 0; b < count.size(); ++b) {
        if (count[b] == 0) continue;
        const double k = static_cast<double>(count[b]);
        out.emplace_back(sum_early[b] / k, sum_late[b] / k);
    }
    return out;
}

}  // namespace impactrank
