// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Run through ctest or directly:
//
//   ./acceptance_tests [--only <substring>] [--dataset <corpus.jsonl>]
//
// --dataset enables the replication checks against the full public corpus,
// which is not shipped with the repository.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "impactrank/analysis.hpp"
#include "impactrank/io.hpp"
#include "impactrank/mathutil.hpp"
#include "impactrank/metrics.hpp"
#include "impactrank/percentile.hpp"
#include "impactrank/predict.hpp"
#include "impactrank/stationarity.hpp"
#include "impactrank/synth.hpp"

using namespace impactrank;

namespace {

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

using CriterionFn = std::function<void(Check&)>;

// ---------------------------------------------------------------------------
// 1. Percentile-engine property suite.
// ---------------------------------------------------------------------------

std::vector<double> random_values_with_ties(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) {
        if (uniform01(rng) < 0.5) x = static_cast<double>(uniform_below(rng, 25));
        else x = std::round(uniform01(rng) * 1e6) / 1e6 * 40.0 - 20.0;
    }
    return v;
}

void percentile_property_suite(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = make_rng(20260808);
    for (int trial = 0; trial < 1000 && c.pass; ++trial) {
        const std::size_t n = 1 + uniform_below(rng, 500);
        const auto v = random_values_with_ties(rng, n);
        const auto ranks = hazen_average_ranks(v);
        const auto pct = hazen_percentiles(v);

        double rank_sum = 0.0, pct_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rank_sum += ranks[i];
            pct_sum += pct[i];
        }
        c.require(rank_sum == 0.5 * static_cast<double>(n) * static_cast<double>(n + 1),
                  "rank sum != n(n+1)/2 at n=" + std::to_string(n));
        c.require(std::fabs(pct_sum / static_cast<double>(n) - 0.5) <= 1e-12,
                  "mean percentile differs from 0.5");

        const double lo = 0.5 / static_cast<double>(n);
        const double hi = (static_cast<double>(n) - 0.5) / static_cast<double>(n);
        for (double p : pct)
            if (p < lo || p > hi) {
                c.require(false, "percentile outside [0.5/N, (N-0.5)/N]");
                break;
            }

        std::vector<double> affine(n), cubed(n), exped(n);
        for (std::size_t i = 0; i < n; ++i) {
            affine[i] = 3.25 * v[i] + 11.0;
            cubed[i] = v[i] * v[i] * v[i];
            exped[i] = std::exp(0.4 * v[i]);
        }
        c.require(hazen_percentiles(affine) == pct, "affine transform changed percentiles");
        c.require(hazen_percentiles(cubed) == pct, "cube transform changed percentiles");
        c.require(hazen_percentiles(exped) == pct, "exp transform changed percentiles");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 10.0, "runtime exceeded 10 s");
    c.note("1000 vectors in " + std::to_string(secs).substr(0, 5) + " s");
}

// ---------------------------------------------------------------------------
// 2. Brute-force oracle equivalence for the ranking engine.
// ---------------------------------------------------------------------------

std::vector<double> pairwise_rank_oracle(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double smaller = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] < v[i]) smaller += 1.0;
            else if (v[j] == v[i]) equal += 1.0;
        }
        out[i] = (1.0 + smaller + 0.5 * (equal - 1.0) - 0.5) / static_cast<double>(n);
    }
    return out;
}

void hazen_brute_force(Check& c) {
    std::size_t cases = 0;
    for (std::size_t len = 1; len <= 8 && c.pass; ++len) {
        std::vector<int> digits(len, 0);
        while (true) {
            std::vector<double> v(len);
            for (std::size_t i = 0; i < len; ++i) v[i] = static_cast<double>(digits[i]);
            ++cases;
            if (hazen_percentiles(v) != pairwise_rank_oracle(v)) {
                c.require(false, "mismatch at a length-" + std::to_string(len) + " input");
                break;
            }
            std::size_t pos = 0;
            while (pos < len && digits[pos] == 2) digits[pos++] = 0;
            if (pos == len) break;
            ++digits[pos];
        }
    }
    c.note(std::to_string(cases) + " inputs checked exactly");
}

// ---------------------------------------------------------------------------
// 3. h/g-index oracle.
// ---------------------------------------------------------------------------

std::int64_t h_oracle(const std::vector<std::int64_t>& counts) {
    std::int64_t best = 0;
    for (std::int64_t h = 0; h <= static_cast<std::int64_t>(counts.size()); ++h) {
        std::int64_t at_least = 0;
        for (auto v : counts)
            if (v >= h) ++at_least;
        if (at_least >= h) best = h;
    }
    return best;
}

std::int64_t g_oracle(std::vector<std::int64_t> counts) {
    std::sort(counts.begin(), counts.end(), std::greater<>());
    std::int64_t best = 0;
    for (std::size_t g = 1; g <= counts.size(); ++g) {
        std::int64_t top = 0;
        for (std::size_t i = 0; i < g; ++i) top += counts[i];
        if (top >= static_cast<std::int64_t>(g) * static_cast<std::int64_t>(g))
            best = static_cast<std::int64_t>(g);
    }
    return best;
}

void h_g_oracle(Check& c) {
    Rng rng = make_rng(31337);
    for (int trial = 0; trial < 10000 && c.pass; ++trial) {
        std::vector<std::int64_t> counts(uniform_below(rng, 21));
        for (auto& v : counts) v = static_cast<std::int64_t>(uniform_below(rng, 51));
        const auto h = h_index(counts);
        const auto g = g_index(counts);
        c.require(h == h_oracle(counts), "h-index oracle mismatch");
        c.require(g == g_oracle(counts), "g-index oracle mismatch");
        c.require(g >= h, "g < h");
    }
    c.note("10000 random citation lists");
}

// ---------------------------------------------------------------------------
// 4. Stationarity Monte Carlo.
// ---------------------------------------------------------------------------

void stationarity_monte_carlo(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = make_rng(424242);
    const int n = 200;

    int adf_wn_reject = 0, adf_rw_keep = 0, kpss_wn_keep = 0, kpss_rw_reject = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> noise(n), walk(n);
        double level = 0.0;
        for (int i = 0; i < n; ++i) {
            noise[i] = normal01(rng);
            level += normal01(rng);
            walk[i] = level;
        }
        if (adf_test(noise).reject_null) ++adf_wn_reject;
        if (!adf_test(walk).reject_null) ++adf_rw_keep;
        if (!kpss_test(noise).reject_null) ++kpss_wn_keep;
        if (kpss_test(walk).reject_null) ++kpss_rw_reject;
    }
    c.require(adf_wn_reject >= 450, "ADF power on white noise below 90% (" +
                                        std::to_string(adf_wn_reject) + "/500)");
    c.require(adf_rw_keep >= 450, "ADF size on random walks above 10% (" +
                                      std::to_string(500 - adf_rw_keep) + "/500 rejected)");
    c.require(kpss_wn_keep >= 450, "KPSS size on white noise above 10% (" +
                                       std::to_string(500 - kpss_wn_keep) + "/500 rejected)");
    c.require(kpss_rw_reject >= 450, "KPSS power on random walks below 90% (" +
                                         std::to_string(kpss_rw_reject) + "/500)");

    const int reps = 50000;
    std::vector<double> adf_stats, kpss_stats;
    adf_stats.reserve(reps);
    kpss_stats.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        std::vector<double> noise(n), walk(n);
        double level = 0.0;
        for (int i = 0; i < n; ++i) {
            noise[i] = normal01(rng);
            level += normal01(rng);
            walk[i] = level;
        }
        adf_stats.push_back(adf_test(walk).statistic);
        kpss_stats.push_back(kpss_test(noise).statistic);
    }
    std::sort(adf_stats.begin(), adf_stats.end());
    std::sort(kpss_stats.begin(), kpss_stats.end());
    const double adf_q = quantile_of_sorted(adf_stats, 0.05);
    const double kpss_q = quantile_of_sorted(kpss_stats, 0.95);
    c.require(std::fabs(adf_q - kAdfDriftCritical5) <= 0.05,
              "ADF critical value off: MC " + std::to_string(adf_q));
    c.require(std::fabs(kpss_q - kKpssLevelCritical5) <= 0.05,
              "KPSS critical value off: MC " + std::to_string(kpss_q));

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 120.0, "runtime exceeded 2 min");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "MC 5%% quantiles: ADF %.3f (pinned %.2f), KPSS %.3f (pinned %.3f), %.1f s",
                  adf_q, kAdfDriftCritical5, kpss_q, kKpssLevelCritical5, secs);
    c.note(buf);
}

// ---------------------------------------------------------------------------
// 5. Penalized-solver oracles.
// ---------------------------------------------------------------------------

FeatureMatrix solver_matrix(const std::vector<std::vector<double>>& rows,
                            const std::vector<double>& target) {
    FeatureMatrix m;
    for (std::size_t cidx = 0; cidx < rows[0].size(); ++cidx)
        m.column_names.push_back("f" + std::to_string(cidx));
    m.rows = rows;
    m.target = target;
    m.autoregressive_col = m.column_names.front();
    m.delta_col = m.column_names.back();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        m.row_ids.push_back("r" + std::to_string(i));
        m.autoregressive.push_back(rows[i][0]);
    }
    return m;
}

void solver_oracles(Check& c) {
    Rng rng = make_rng(555);
    // orthonormal design from a Hadamard matrix
    static const int h8[8][8] = {
        {1, 1, 1, 1, 1, 1, 1, 1},     {1, -1, 1, -1, 1, -1, 1, -1},
        {1, 1, -1, -1, 1, 1, -1, -1}, {1, -1, -1, 1, 1, -1, -1, 1},
        {1, 1, 1, 1, -1, -1, -1, -1}, {1, -1, 1, -1, -1, 1, -1, 1},
        {1, 1, -1, -1, -1, -1, 1, 1}, {1, -1, -1, 1, -1, 1, 1, -1}};
    std::vector<std::vector<double>> rows(8, std::vector<double>(4));
    std::vector<double> target(8);
    const std::vector<double> beta = {1.2, -0.6, 0.25, 0.0};
    for (int r = 0; r < 8; ++r) {
        double y = 0.0;
        for (int k = 0; k < 4; ++k) {
            rows[r][k] = static_cast<double>(h8[r][k + 1]);
            y += beta[k] * rows[r][k];
        }
        target[r] = y + 0.02 * normal01(rng);
    }
    const FeatureMatrix ortho = solver_matrix(rows, target);
    std::vector<std::size_t> all(8);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double ym = mean(ortho.target);
    for (double lambda : {0.05, 0.2, 0.5, 0.9}) {
        const TrainedModel fit = fit_penalized_at(ortho, all, ModelKind::lasso, 1.0, lambda);
        for (std::size_t k = 0; k < 4; ++k) {
            double ols = 0.0;
            for (int r = 0; r < 8; ++r) ols += ortho.rows[r][k] * (ortho.target[r] - ym);
            ols /= 8.0;
            const double soft = ols > lambda ? ols - lambda : (ols < -lambda ? ols + lambda : 0.0);
            c.require(std::fabs(fit.coef[k] - soft) <= 1e-6,
                      "soft-threshold mismatch at lambda=" + std::to_string(lambda));
        }
    }

    // zero-penalty limit against ordinary least squares
    std::vector<std::vector<double>> wrows;
    std::vector<double> wtarget;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> r = {normal01(rng), normal01(rng), normal01(rng)};
        wtarget.push_back(0.7 - 0.4 * r[0] + 0.9 * r[1] - 0.1 * r[2] + 0.05 * normal01(rng));
        wrows.push_back(std::move(r));
    }
    const FeatureMatrix well = solver_matrix(wrows, wtarget);
    std::vector<std::size_t> wall(well.n_rows());
    std::iota(wall.begin(), wall.end(), std::size_t{0});
    for (ModelKind kind : {ModelKind::ridge, ModelKind::lasso}) {
        const TrainedModel fit =
            fit_penalized_at(well, wall, kind, kind == ModelKind::lasso ? 1.0 : 0.0, 0.0);
        std::vector<std::vector<double>> cols(4, std::vector<double>(well.n_rows(), 1.0));
        for (std::size_t r = 0; r < well.n_rows(); ++r)
            for (int k = 0; k < 3; ++k) cols[k + 1][r] = well.rows[r][k];
        const LsqFit ols = least_squares(cols, well.target);
        c.require(std::fabs(fit.intercept - ols.coef[0]) <= 1e-6, "zero-penalty intercept != OLS");
        for (int k = 0; k < 3; ++k)
            c.require(std::fabs(fit.coef[k] - ols.coef[k + 1]) <= 1e-6,
                      "zero-penalty coefficient != OLS");
    }

    // objective monotonicity across a spread of penalties and mixings
    std::size_t sweeps_checked = 0;
    for (double lambda : {0.0, 0.01, 0.1, 0.7}) {
        for (double alpha : {0.0, 0.3, 1.0}) {
            const TrainedModel fit = fit_penalized_at(well, wall, ModelKind::enet, alpha, lambda);
            for (std::size_t i = 1; i < fit.objective_history.size(); ++i) {
                ++sweeps_checked;
                if (fit.objective_history[i] > fit.objective_history[i - 1] + 1e-12) {
                    c.require(false, "objective increased during a sweep");
                    break;
                }
            }
        }
    }
    c.note("soft-threshold, zero-penalty, and " + std::to_string(sweeps_checked) +
           " monotone sweeps");
}

// ---------------------------------------------------------------------------
// 6. Statistical-test oracles.
// ---------------------------------------------------------------------------

double wilcoxon_enumeration_p(const std::vector<double>& diffs) {
    std::vector<double> abs_d;
    for (double d : diffs)
        if (d != 0.0) abs_d.push_back(std::fabs(d));
    const std::size_t n = abs_d.size();
    const auto ranks = hazen_average_ranks(abs_d);
    double observed = 0.0;
    {
        std::size_t k = 0;
        for (double d : diffs)
            if (d != 0.0) {
                if (d > 0.0) observed += ranks[k];
                ++k;
            }
    }
    double below = 0.0, above = 0.0;
    const std::size_t total = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) w += ranks[i];
        if (w <= observed + 1e-9) below += 1.0;
        if (w >= observed - 1e-9) above += 1.0;
    }
    return std::min(1.0, 2.0 * std::min(below, above) / static_cast<double>(total));
}

void statistical_tests(Check& c) {
    Rng rng = make_rng(606);
    // exact signed-rank distribution vs full enumeration, ties included
    for (int trial = 0; trial < 400 && c.pass; ++trial) {
        const std::size_t n = 2 + uniform_below(rng, 9);
        std::vector<double> x(n), y(n), diffs(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = normal01(rng);
            const double d = uniform01(rng) < 0.4
                                 ? static_cast<double>(static_cast<long>(uniform_below(rng, 7)) - 3)
                                 : normal01(rng);
            x[i] = y[i] + d;
            diffs[i] = x[i] - y[i];
            if (diffs[i] != 0.0) any = true;
        }
        if (!any) continue;
        const WilcoxonResult r = wilcoxon_signed_rank(x, y);
        c.require(r.exact, "expected the exact path at small n");
        c.require(std::fabs(r.p_value - wilcoxon_enumeration_p(diffs)) <= 1e-12,
                  "exact p differs from 2^n enumeration");
    }

    // null uniformity at n=30 over 2000 trials
    std::vector<double> pvals;
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> x(30), y(30);
        for (std::size_t i = 0; i < 30; ++i) {
            x[i] = normal01(rng);
            y[i] = normal01(rng);
        }
        pvals.push_back(wilcoxon_signed_rank(x, y).p_value);
    }
    std::sort(pvals.begin(), pvals.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < pvals.size(); ++i) {
        const double nlo = static_cast<double>(i) / static_cast<double>(pvals.size());
        const double nhi = static_cast<double>(i + 1) / static_cast<double>(pvals.size());
        ks = std::max(ks, std::max(std::fabs(nhi - pvals[i]), std::fabs(nlo - pvals[i])));
    }
    c.require(ks < 0.05, "null p-value KS distance " + std::to_string(ks));

    // OLS against the tabulated hand computations
    {
        const OlsFit f = ols_fit(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6});
        c.require(std::fabs(f.slope - 2.0) <= 1e-12 && std::fabs(f.intercept) <= 1e-12 &&
                      std::fabs(f.slope_se) <= 1e-12 && std::fabs(f.r2 - 1.0) <= 1e-12,
                  "exact-line fit off");
    }
    {
        const OlsFit f = ols_fit(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4});
        c.require(std::fabs(f.slope) <= 1e-12 && f.r2 == 0.0, "flat-response fit off");
    }
    {
        const OlsFit f = ols_fit(std::vector<double>{0, 1, 2, 3}, std::vector<double>{1, 2, 2, 4});
        // SSE = 0.7 on 2 dof over Sxx = 5
        c.require(std::fabs(f.slope - 0.9) <= 1e-12 && std::fabs(f.intercept - 0.9) <= 1e-12 &&
                      std::fabs(f.slope_se - std::sqrt(0.07)) <= 1e-12,
                  "normal-equation fit off");
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "enumeration matched; null KS %.4f", ks);
    c.note(buf);
}

// ---------------------------------------------------------------------------
// 7. Artificial scholars A/B/C.
// ---------------------------------------------------------------------------

void fig2_artificial_scholars(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    SynthConfig cfg;
    cfg.n_scholars = 2000;
    cfg.career_span = 12;
    cfg.first_cohort = 1988;
    cfg.n_cohorts = 4;
    cfg.seed = 101;
    const Corpus corpus = inject_artificial_scholars(generate(cfg), 1990);
    const auto bench = BenchmarkSpec::all().with_cohort(CohortFilter::Key::career_start, 1990);
    const int max_age = std::min(30, corpus.end_year() - 1990 + 1);
    std::vector<int> ages;
    for (int t = 1; t <= max_age; ++t) ages.push_back(t);

    const SeriesSet sp5 = scholar_percentile_series(corpus, bench, MetricSpec::p5_sum(), ages);
    const SeriesSet sh =
        scholar_percentile_series(corpus, bench, MetricSpec::scholar_h_index(), ages);
    const SeriesSet sc =
        scholar_percentile_series(corpus, bench, MetricSpec::scholar_citations(), ages);

    for (int t : ages) {
        c.require(sp5.by_entity.at("synthB").values.at(t) >
                      sp5.by_entity.at("synthC").values.at(t),
                  "S_P5(B) <= S_P5(C) at age " + std::to_string(t));
        c.require(sh.by_entity.at("synthB").values.at(t) ==
                      sh.by_entity.at("synthC").values.at(t),
                  "S_h(B) != S_h(C) at age " + std::to_string(t));
    }
    c.require(sc.by_entity.at("synthA").values.at(1) > sp5.by_entity.at("synthA").values.at(1),
              "S_c(A,1) <= S_P5(A,1)");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 60.0, "runtime exceeded 1 min");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "ages 1..%d, Sc(A,1)=%.3f vs Sp5(A,1)=%.3f, %.1f s", max_age,
                  sc.by_entity.at("synthA").values.at(1), sp5.by_entity.at("synthA").values.at(1),
                  secs);
    c.note(buf);
}

// ---------------------------------------------------------------------------
// 8. Cohort stationarity analogue.
// ---------------------------------------------------------------------------

TrendTest cohort_trend(const Corpus& corpus, const MetricSpec& metric) {
    const auto buckets = cohort_distribution(corpus, BenchmarkSpec::all(), metric, 5);
    std::vector<double> years, medians;
    for (const auto& [year, values] : buckets) {
        years.push_back(static_cast<double>(year));
        medians.push_back(median(values));
    }
    return trend_test(years, medians);
}

void fig3_cohort_trend(Check& c) {
    SynthConfig cfg;
    cfg.n_scholars = 2000;
    cfg.career_span = 15;
    cfg.first_cohort = 1975;
    cfg.n_cohorts = 16;
    cfg.yearly_noise_sigma = 0.3;
    cfg.seed = 11;
    const TrendTest flat = cohort_trend(generate(cfg), MetricSpec::p5_sum());
    c.require(!flat.significant,
              "homogeneous corpus shows a cohort trend (p=" + std::to_string(flat.p_value) + ")");

    SynthConfig inflated_cfg = cfg;
    inflated_cfg.yearly_inflation = 0.08;
    const auto median_agg =
        MetricSpec::p_aggregate(PercentileWindow::fixed_age, 5, Aggregator::median);
    const TrendTest inflated = cohort_trend(generate(inflated_cfg), median_agg);
    c.require(inflated.significant, "inflated corpus: median-aggregation trend did not fire");
    c.require(inflated.fit.slope > 0.0, "inflated corpus: trend not upward");

    char buf[160];
    std::snprintf(buf, sizeof(buf), "flat p=%.2f; inflated median slope=%+.4f p=%.1e", flat.p_value,
                  inflated.fit.slope, inflated.p_value);
    c.note(buf);
}

// ---------------------------------------------------------------------------
// 9. Stability and forecastability shapes.
// ---------------------------------------------------------------------------

void fig5_fig7_shapes(Check& c) {
    SynthConfig cfg;
    cfg.n_scholars = 2000;
    cfg.career_span = 30;
    cfg.first_cohort = 1975;
    cfg.n_cohorts = 5;
    cfg.pubs_per_year = 1.0;
    cfg.decay = 0.95;           // late years keep moving ranks
    cfg.yearly_noise_sigma = 1.0;  // decaying autocorrelation of the series
    cfg.seed = 5;
    const Corpus corpus = generate(cfg);

    std::vector<int> ages;
    for (int t = 1; t <= 30; ++t) ages.push_back(t);
    const SeriesSet series = publication_percentile_series(corpus, BenchmarkSpec::all(), ages);
    const std::vector<int> t2s = {10, 15, 20, 25, 30};
    const AgePairMatrix matrix = stability_matrix(series, {5, 10, 15}, t2s);
    for (int t1 : {5, 10, 15}) {
        double prev = 2.0;
        for (int t2 : t2s) {
            if (t1 >= t2) continue;
            const double v = matrix.at(t1, t2);
            c.require(v < prev, "correlation not decreasing at (" + std::to_string(t1) + "," +
                                    std::to_string(t2) + ")");
            prev = v;
        }
    }
    // at a fixed horizon, older entities are easier to forecast
    c.require(matrix.at(5, 10) < matrix.at(10, 15) && matrix.at(10, 15) < matrix.at(15, 20),
              "correlation does not rise with t1 at a fixed five-year horizon");

    const auto results = run_grid(corpus, BenchmarkSpec::all(), PredictionTask::publication,
                                  {ModelKind::baseline, ModelKind::markov}, 42);
    const auto r2_of = [&](ModelKind k, int t1, int t2) {
        for (const auto& r : results)
            if (r.model == k && r.t1 == t1 && r.t2 == t2) return r.err.r2;
        return -99.0;
    };
    // past the short-horizon bump window (t2 > t1+5)
    for (ModelKind kind : {ModelKind::baseline, ModelKind::markov}) {
        for (int t1 : {5, 10, 15}) {
            double prev = 2.0;
            for (int t2 = t1 + 5; t2 <= 30; t2 += 5) {
                const double v = r2_of(kind, t1, t2);
                c.require(v < prev, model_name(kind) + " R2 not decreasing at t1=" +
                                        std::to_string(t1) + ", t2=" + std::to_string(t2));
                prev = v;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "corr(5,10)=%.3f..corr(5,30)=%.3f; baseline R2(5,10)=%.3f..(5,30)=%.3f",
                  matrix.at(5, 10), matrix.at(5, 30), r2_of(ModelKind::baseline, 5, 10),
                  r2_of(ModelKind::baseline, 5, 30));
    c.note(buf);
}

// ---------------------------------------------------------------------------
// 10. Optional replication against the full public dataset.
// ---------------------------------------------------------------------------

void dataset_replication(Check& c, const std::string& path) {
    const Corpus corpus = load_corpus(path);
    c.require(corpus.publications().size() == 801239,
              "publication count " + std::to_string(corpus.publications().size()) +
                  " != 801239");
    c.require(corpus.scholars().size() == 14358,
              "scholar count " + std::to_string(corpus.scholars().size()) + " != 14358");
    const Corpus biology = filter_benchmark(
        corpus, BenchmarkSpec::field({"biology", "genetic", "neuroscience", "cell"}));
    c.require(biology.scholars().size() == 3410,
              "biology scholars " + std::to_string(biology.scholars().size()) + " != 3410");
    const Corpus tenured = filter_benchmark(corpus, BenchmarkSpec::tenured());
    c.require(tenured.scholars().size() == 2706,
              "tenured scholars " + std::to_string(tenured.scholars().size()) + " != 2706");

    const FeatureMatrix pub_rows =
        assemble(corpus, BenchmarkSpec::all(), PredictionTask::publication, 5, 6);
    c.require(pub_rows.n_rows() == 36372,
              "publication-task rows " + std::to_string(pub_rows.n_rows()) + " != 36372");
    const FeatureMatrix sch_rows =
        assemble(corpus, BenchmarkSpec::all(), PredictionTask::scholar, 5, 6);
    c.require(sch_rows.n_rows() == 1457,
              "scholar-task rows " + std::to_string(sch_rows.n_rows()) + " != 1457");

    ScholarRankContext ctx(corpus, BenchmarkSpec::all(), MetricSpec::p5_sum());
    const auto corr_against_future = [&](int t1, int t2) {
        const auto now = ctx.at_age(t1);
        const auto future = ctx.future_works(t1, t2);
        std::vector<double> x, y;
        for (const auto& [id, v] : now) {
            auto it = future.find(id);
            if (it == future.end()) continue;
            x.push_back(v);
            y.push_back(it->second);
        }
        return pearson(x, y);
    };
    const double c5 = corr_against_future(5, 10);
    const double c10 = corr_against_future(10, 15);
    c.require(std::fabs(c5 - 0.65) <= 0.05, "corr(S_P5(5), S_P5(10|5)) = " + std::to_string(c5));
    c.require(std::fabs(c10 - 0.70) <= 0.05,
              "corr(S_P5(10), S_P5(15|10)) = " + std::to_string(c10));

    const auto agreement_at = [&](int age) {
        const auto a = scholar_percentile(biology, BenchmarkSpec::all(), MetricSpec::p5_sum(), age);
        const auto b =
            scholar_percentile(biology, BenchmarkSpec::all(), MetricSpec::scholar_citations(), age);
        const auto d =
            scholar_percentile(biology, BenchmarkSpec::all(), MetricSpec::scholar_h_index(), age);
        return agreement(a, b, d).fraction;
    };
    const double agr5 = agreement_at(5);
    const double agr30 = agreement_at(30);
    c.require(std::fabs(agr5 - 0.51) <= 0.03, "three-way agreement at 5 = " + std::to_string(agr5));
    c.require(std::fabs(agr30 - 0.68) <= 0.03,
              "three-way agreement at 30 = " + std::to_string(agr30));
    char buf[160];
    std::snprintf(buf, sizeof(buf), "corr %.3f/%.3f, agreement %.3f/%.3f", c5, c10, agr5, agr30);
    c.note(buf);
}

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    std::string dataset;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = argv[++i];
        else if (std::strcmp(argv[i], "--dataset") == 0 && i + 1 < argc) dataset = argv[++i];
    }

    std::vector<std::pair<std::string, CriterionFn>> criteria = {
        {"percentile-property-suite", percentile_property_suite},
        {"hazen-brute-force-oracle", hazen_brute_force},
        {"h-g-index-oracle", h_g_oracle},
        {"stationarity-monte-carlo", stationarity_monte_carlo},
        {"solver-oracles", solver_oracles},
        {"statistical-test-oracles", statistical_tests},
        {"fig2-artificial-scholars", fig2_artificial_scholars},
        {"fig3-cohort-trend", fig3_cohort_trend},
        {"fig5-fig7-shape-properties", fig5_fig7_shapes},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && name.find(only) == std::string::npos) continue;
        Check check;
        try {
            fn(check);
        } catch (const std::exception& e) {
            check.pass = false;
            check.note(std::string("exception: ") + e.what());
        }
        std::printf("[%s] %s%s%s\n", check.pass ? "PASS" : "FAIL", name.c_str(),
                    check.detail.empty() ? "" : " - ", check.detail.c_str());
        std::fflush(stdout);
        if (!check.pass) ++failures;
    }

    if (only.empty() || std::string("dataset-replication").find(only) != std::string::npos) {
        if (dataset.empty()) {
            std::printf("[SKIP] dataset-replication - pass --dataset <corpus.jsonl> with the "
                        "public corpus to enable\n");
        } else {
            Check check;
            try {
                dataset_replication(check, dataset);
            } catch (const std::exception& e) {
                check.pass = false;
                check.note(std::string("exception: ") + e.what());
            }
            std::printf("[%s] dataset-replication%s%s\n", check.pass ? "PASS" : "FAIL",
                        check.detail.empty() ? "" : " - ", check.detail.c_str());
            if (!check.pass) ++failures;
        }
    }

    return failures;
}
