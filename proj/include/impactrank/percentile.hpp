#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "impactrank/corpus.hpp"
#include "impactrank/error.hpp"
#include "impactrank/metrics.hpp"
#include "impactrank/parallel.hpp"

namespace impactrank {

// ---------------------------------------------------------------------------
// Hazen rank percentiles.
//
// Entities are ranked ascending by metric value; tied entities share the
// average rank of their block. The percentile is (rank - 0.5) / N, which puts
// the median entity at the 50th percentile and treats both tails
// symmetrically. Outputs are aligned with the input order.
// ---------------------------------------------------------------------------

inline std::vector<double> hazen_average_ranks(const std::vector<double>& values) {
    if (values.empty()) throw DomainError("cannot rank an empty list");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("cannot rank non-finite values");
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // average of ranks i+1 .. j+1; (first+last)/2 stays exact in doubles
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline std::vector<double> hazen_percentiles(const std::vector<double>& values) {
    std::vector<double> out = hazen_average_ranks(values);
    const double n = static_cast<double>(values.size());
    for (double& r : out) r = (r - 0.5) / n;
    return out;
}

namespace detail {

inline std::map<std::string, double> rank_to_map(const std::vector<std::string>& ids,
                                                 const std::vector<double>& metric_values) {
    const std::vector<double> pct = hazen_percentiles(metric_values);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = pct[i];
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Publication rankings.
// ---------------------------------------------------------------------------

/// True when the benchmark keeps the corpus unchanged, in which case callers
/// can rank against the input directly instead of copying it.
inline bool benchmark_is_identity(const BenchmarkSpec& spec) {
    return spec.kind == BenchmarkKind::all && !spec.cohort;
}


/// Rank percentile of every benchmark publication with at least t observed
/// years, by cumulative citations at age t. The corpus passed here is already
/// benchmark-filtered (see the *_percentile overloads taking a BenchmarkSpec).
inline std::map<std::string, double> publication_percentile_filtered(const Corpus& filtered, int t) {
    const auto eligible = eligible_publication_indices(filtered, t);
    if (eligible.empty())
        throw EligibilityError("no publication has " + std::to_string(t) + " observed years");
    std::vector<std::string> ids;
    std::vector<double> values;
    ids.reserve(eligible.size());
    values.reserve(eligible.size());
    for (std::size_t pi : eligible) {
        const Publication& p = filtered.publications()[pi];
        ids.push_back(p.pub_id);
        values.push_back(static_cast<double>(p.citations_by_age(t)));
    }
    return detail::rank_to_map(ids, values);
}

inline std::map<std::string, double> publication_percentile(const Corpus& corpus,
                                                            const BenchmarkSpec& bench, int t) {
    if (benchmark_is_identity(bench)) return publication_percentile_filtered(corpus, t);
    return publication_percentile_filtered(filter_benchmark(corpus, bench), t);
}

/// Same pool as publication_percentile, ranked by citations received in the
/// single age-t calendar year. Used for the *_yearly feature columns.
inline std::map<std::string, double> publication_yearly_percentile_filtered(const Corpus& filtered,
                                                                            int t) {
    const auto eligible = eligible_publication_indices(filtered, t);
    if (eligible.empty())
        throw EligibilityError("no publication has " + std::to_string(t) + " observed years");
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t pi : eligible) {
        const Publication& p = filtered.publications()[pi];
        const int year = p.pub_year + t - 1;
        ids.push_back(p.pub_id);
        values.push_back(static_cast<double>(p.history.in_window(year, year)));
    }
    return detail::rank_to_map(ids, values);
}

// ---------------------------------------------------------------------------
// Scholar rankings.
// ---------------------------------------------------------------------------

namespace detail {

/// Per-publication percentile summaries that feed scholar aggregates, built
/// once per (benchmark, metric) and reused across ages.
inline std::map<std::string, double> publication_summaries(const Corpus& filtered,
                                                           const MetricSpec& spec,
                                                           int max_age = 30) {
    if (spec.window == PercentileWindow::fixed_age)
        return publication_percentile_filtered(filtered, spec.fixed_age);

    // max / mean / median of the publication's percentile series over ages
    // 1..min(max_age, observed years)
    std::map<std::string, std::vector<double>> per_pub;
    for (int age = 1; age <= max_age; ++age) {
        std::vector<std::size_t> eligible;
        try {
            eligible = eligible_publication_indices(filtered, age);
        } catch (const DomainError&) {
            break;
        }
        if (eligible.empty()) break;
        const auto pct = publication_percentile_filtered(filtered, age);
        for (const auto& [id, v] : pct) per_pub[id].push_back(v);
    }
    std::map<std::string, double> out;
    for (auto& [id, series] : per_pub) {
        if (series.empty()) continue;
        double v = 0.0;
        switch (spec.window) {
            case PercentileWindow::max: v = *std::max_element(series.begin(), series.end()); break;
            case PercentileWindow::mean: {
                double s = 0.0;
                for (double x : series) s += x;
                v = s / static_cast<double>(series.size());
                break;
            }
            case PercentileWindow::median: {
                std::sort(series.begin(), series.end());
                const std::size_t n = series.size();
                v = (n % 2 == 1) ? series[n / 2] : 0.5 * (series[n / 2 - 1] + series[n / 2]);
                break;
            }
            case PercentileWindow::fixed_age: break;  // handled above
        }
        out[id] = v;
    }
    return out;
}

}  // namespace detail

/// Ranking context for scholar metrics: the benchmark-filtered corpus plus
/// whatever publication-level rankings the metric needs. Build once, then
/// evaluate any number of ages against it. The input corpus must outlive the
/// context (an identity benchmark ranks against it in place).
class ScholarRankContext {
public:
    ScholarRankContext(const Corpus& corpus, const BenchmarkSpec& bench, MetricSpec metric)
        : metric_(std::move(metric)) {
        if (benchmark_is_identity(bench)) {
            corpus_ = &corpus;
        } else {
            owned_ = filter_benchmark(corpus, bench);
            corpus_ = &*owned_;
        }
        metric_.validate();
        if (metric_.kind == MetricKind::pub_percentile_aggregate)
            pub_summaries_ = detail::publication_summaries(*corpus_, metric_);
    }

    const Corpus& corpus() const { return *corpus_; }
    const MetricSpec& metric() const { return metric_; }
    const std::map<std::string, double>& pub_summaries() const { return pub_summaries_; }

    /// Scholar percentiles at age t. Scholars younger than t, or with no
    /// aggregable publications at t, are excluded from the ranking.
    std::map<std::string, double> at_age(int t) const {
        if (t < 1) throw DomainError("scholar age must be at least 1");
        std::vector<std::string> ids;
        std::vector<double> values;
        const Corpus& c = *corpus_;
        for (const Scholar& s : c.scholars()) {
            if (s.observed_years(c.end_year()) < t) continue;
            double v = 0.0;
            switch (metric_.kind) {
                case MetricKind::citations:
                    v = static_cast<double>(scholar_citations_at_age(s, c, t));
                    break;
                case MetricKind::h_index:
                case MetricKind::g_index: {
                    const auto counts = scholar_pub_citations(s, c, t);
                    v = static_cast<double>(metric_.kind == MetricKind::h_index ? h_index(counts)
                                                                                : g_index(counts));
                    break;
                }
                case MetricKind::pub_percentile_aggregate: {
                    try {
                        v = scholar_percentile_aggregate(s, c, pub_summaries_, metric_, t);
                    } catch (const EligibilityError&) {
                        continue;
                    }
                    break;
                }
            }
            ids.push_back(s.scholar_id);
            values.push_back(v);
        }
        if (ids.empty())
            throw EligibilityError("no scholar is rankable at age " + std::to_string(t));
        return detail::rank_to_map(ids, values);
    }

    /// Future-works percentiles: the P5-sum metric restricted to papers the
    /// scholar publishes at ages in (t1, t2]. Scholars with no rankable paper
    /// in that window are excluded.
    std::map<std::string, double> future_works(int t1, int t2) const {
        if (t1 < 1) throw DomainError("t1 must be at least 1");
        if (t2 <= t1) throw DomainError("t2 must exceed t1");
        if (metric_.kind != MetricKind::pub_percentile_aggregate)
            throw DomainError("future-works ranking requires a percentile-aggregate metric");
        std::vector<std::string> ids;
        std::vector<double> values;
        const Corpus& c = *corpus_;
        for (const Scholar& s : c.scholars()) {
            if (s.observed_years(c.end_year()) < t2) continue;
            const int first = s.career_start + t1;      // first year strictly after age t1
            const int last = s.career_start + t2 - 1;   // last year inside age t2
            double sum = 0.0;
            bool any = false;
            for (std::size_t pi : c.pubs_of(c.scholar_idx(s.scholar_id))) {
                const Publication& p = c.publications()[pi];
                if (p.pub_year < first || p.pub_year > last) continue;
                auto it = pub_summaries_.find(p.pub_id);
                if (it == pub_summaries_.end()) continue;
                sum += it->second;
                any = true;
            }
            if (!any) continue;
            ids.push_back(s.scholar_id);
            values.push_back(sum);
        }
        if (ids.empty())
            throw EligibilityError("no scholar has rankable publications in the (" +
                                   std::to_string(t1) + ", " + std::to_string(t2) + "] window");
        return detail::rank_to_map(ids, values);
    }

private:
    std::optional<Corpus> owned_;
    const Corpus* corpus_ = nullptr;
    MetricSpec metric_;
    std::map<std::string, double> pub_summaries_;
};

inline std::map<std::string, double> scholar_percentile(const Corpus& corpus,
                                                        const BenchmarkSpec& bench,
                                                        const MetricSpec& metric, int t) {
    return ScholarRankContext(corpus, bench, metric).at_age(t);
}

inline std::map<std::string, double> future_works_percentile(const Corpus& corpus,
                                                             const BenchmarkSpec& bench, int t1,
                                                             int t2) {
    return ScholarRankContext(corpus, bench, MetricSpec::p5_sum()).future_works(t1, t2);
}

/// Scholar percentiles at age t bucketed by career start year, for box-plot
/// style cohort views. Buckets that would be empty are omitted.
inline std::map<int, std::vector<double>> cohort_distribution(const Corpus& corpus,
                                                              const BenchmarkSpec& bench,
                                                              const MetricSpec& metric, int t) {
    ScholarRankContext ctx(corpus, bench, metric);
    const auto pct = ctx.at_age(t);
    std::map<int, std::vector<double>> out;
    for (const auto& [id, v] : pct) out[ctx.corpus().scholar(id).career_start].push_back(v);
    return out;
}

// ---------------------------------------------------------------------------
// Percentile series over an age range.
// ---------------------------------------------------------------------------

/// An entity's percentile as a function of age under one benchmark/metric,
/// with the benchmark size recorded per age.
struct PercentileSeries {
    std::string entity_id;
    FlatMap<int, double> values;        // age -> percentile
    FlatMap<int, int> benchmark_size;   // age -> N

    bool has_ages(const std::vector<int>& ages) const {
        for (int a : ages)
            if (!values.count(a)) return false;
        return true;
    }
};

struct SeriesSet {
    std::string benchmark_label;
    std::string metric_label;
    std::map<std::string, PercentileSeries> by_entity;
};

/// Future-works indicator S(t2|t1) for one scholar across target ages t2.
struct FutureWorksSeries {
    std::string scholar_id;
    int t1 = 0;
    std::map<int, double> values;  // t2 -> percentile
};

namespace detail {

inline void merge_age_map(SeriesSet& set, int age, const std::map<std::string, double>& pct) {
    const int n = static_cast<int>(pct.size());
    for (const auto& [id, v] : pct) {
        auto& series = set.by_entity[id];
        series.entity_id = id;
        series.values[age] = v;
        series.benchmark_size[age] = n;
    }
}

}  // namespace detail

/// P_c series for every benchmark publication over the given ages. Ages with
/// no eligible publication are skipped.
inline SeriesSet publication_percentile_series(const Corpus& corpus, const BenchmarkSpec& bench,
                                               const std::vector<int>& ages, unsigned jobs = 1) {
    std::optional<Corpus> owned;
    if (!benchmark_is_identity(bench)) owned = filter_benchmark(corpus, bench);
    const Corpus& filtered = owned ? *owned : corpus;
    std::vector<std::map<std::string, double>> per_age(ages.size());
    parallel_for(ages.size(), jobs, [&](std::size_t i) {
        try {
            per_age[i] = publication_percentile_filtered(filtered, ages[i]);
        } catch (const EligibilityError&) {
        }
    });
    SeriesSet set;
    set.benchmark_label = bench.label();
    set.metric_label = "citations";
    for (std::size_t i = 0; i < ages.size(); ++i) detail::merge_age_map(set, ages[i], per_age[i]);
    return set;
}

/// Scholar percentile series under any scholar metric.
inline SeriesSet scholar_percentile_series(const Corpus& corpus, const BenchmarkSpec& bench,
                                           const MetricSpec& metric, const std::vector<int>& ages,
                                           unsigned jobs = 1) {
    ScholarRankContext ctx(corpus, bench, metric);
    std::vector<std::map<std::string, double>> per_age(ages.size());
    parallel_for(ages.size(), jobs, [&](std::size_t i) {
        try {
            per_age[i] = ctx.at_age(ages[i]);
        } catch (const EligibilityError&) {
        }
    });
    SeriesSet set;
    set.benchmark_label = bench.label();
    set.metric_label = metric.label();
    for (std::size_t i = 0; i < ages.size(); ++i) detail::merge_age_map(set, ages[i], per_age[i]);
    return set;
}

/// S(t2|t1) series for every scholar, keyed by t2 in the series' age slot.
inline SeriesSet future_works_percentile_series(const Corpus& corpus, const BenchmarkSpec& bench,
                                                int t1, const std::vector<int>& t2_ages,
                                                unsigned jobs = 1) {
    ScholarRankContext ctx(corpus, bench, MetricSpec::p5_sum());
    std::vector<std::map<std::string, double>> per_age(t2_ages.size());
    parallel_for(t2_ages.size(), jobs, [&](std::size_t i) {
        try {
            per_age[i] = ctx.future_works(t1, t2_ages[i]);
        } catch (const EligibilityError&) {
        }
    });
    SeriesSet set;
    set.benchmark_label = bench.label();
    set.metric_label = "p5-sum-future-t1=" + std::to_string(t1);
    for (std::size_t i = 0; i < t2_ages.size(); ++i)
        detail::merge_age_map(set, t2_ages[i], per_age[i]);
    return set;
}

}  // namespace impactrank
