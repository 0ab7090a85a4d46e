#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "impactrank/corpus.hpp"
#include "impactrank/error.hpp"

namespace impactrank {

enum class MetricTarget { publication, scholar };
enum class MetricKind { citations, h_index, g_index, pub_percentile_aggregate };

/// How a publication's percentile series is summarized before aggregation.
enum class PercentileWindow { fixed_age, max, mean, median };
enum class Aggregator { sum, median };

struct MetricSpec {
    MetricTarget target = MetricTarget::scholar;
    MetricKind kind = MetricKind::citations;
    PercentileWindow window = PercentileWindow::fixed_age;
    int fixed_age = 5;  // the k in a fixed-age percentile window
    Aggregator aggregator = Aggregator::sum;

    static MetricSpec publication_citations() {
        return {MetricTarget::publication, MetricKind::citations, PercentileWindow::fixed_age, 5,
                Aggregator::sum};
    }
    static MetricSpec scholar_citations() { return {MetricTarget::scholar, MetricKind::citations}; }
    static MetricSpec scholar_h_index() { return {MetricTarget::scholar, MetricKind::h_index}; }
    static MetricSpec scholar_g_index() { return {MetricTarget::scholar, MetricKind::g_index}; }
    static MetricSpec p_aggregate(PercentileWindow w, int k, Aggregator agg) {
        MetricSpec s{MetricTarget::scholar, MetricKind::pub_percentile_aggregate, w, k, agg};
        s.validate();
        return s;
    }
    static MetricSpec p5_sum() { return p_aggregate(PercentileWindow::fixed_age, 5, Aggregator::sum); }

    void validate() const {
        if (kind == MetricKind::pub_percentile_aggregate && target != MetricTarget::scholar)
            throw DomainError("percentile-aggregate metrics apply to scholars only");
        if (window == PercentileWindow::fixed_age && fixed_age < 1)
            throw DomainError("fixed-age window must be at least 1");
    }

    std::string label() const {
        switch (kind) {
            case MetricKind::citations:
                return target == MetricTarget::publication ? "citations" : "s-citations";
            case MetricKind::h_index: return "h-index";
            case MetricKind::g_index: return "g-index";
            case MetricKind::pub_percentile_aggregate: break;
        }
        std::string w;
        switch (window) {
            case PercentileWindow::fixed_age: w = "p" + std::to_string(fixed_age); break;
            case PercentileWindow::max: w = "pmax"; break;
            case PercentileWindow::mean: w = "pmean"; break;
            case PercentileWindow::median: w = "pmedian"; break;
        }
        return w + (aggregator == Aggregator::sum ? "-sum" : "-median");
    }
};

/// Cumulative citations of a publication by age t (calendar years
/// [pub_year, pub_year + t - 1]). The publication must have t fully observed
/// years in the corpus.
inline std::int64_t citations_at_age(const Publication& p, int t, int end_year) {
    if (t < 1) throw DomainError("publication age must be at least 1");
    if (p.observed_years(end_year) < t)
        throw EligibilityError("publication " + p.pub_id + " has fewer than " + std::to_string(t) +
                               " observed years");
    return p.citations_by_age(t);
}

/// Citations a scholar receives by scholar age t: the sum over the scholar's
/// publications of citations falling in [career_start, career_start + t - 1].
inline std::int64_t scholar_citations_at_age(const Scholar& s, const Corpus& corpus, int t) {
    if (t < 1) throw DomainError("scholar age must be at least 1");
    if (s.observed_years(corpus.end_year()) < t)
        throw EligibilityError("scholar " + s.scholar_id + " is younger than age " + std::to_string(t));
    const int last = s.career_start + t - 1;
    std::int64_t total = 0;
    for (std::size_t pi : corpus.pubs_of(corpus.scholar_idx(s.scholar_id)))
        total += corpus.publications()[pi].history.in_window(s.career_start, last);
    return total;
}

/// Largest h such that at least h of the counts are >= h.
inline std::int64_t h_index(std::span<const std::int64_t> citation_counts) {
    std::vector<std::int64_t> sorted(citation_counts.begin(), citation_counts.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::int64_t h = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] >= static_cast<std::int64_t>(i + 1)) h = static_cast<std::int64_t>(i + 1);
        else break;
    }
    return h;
}

/// Largest g (capped at the number of papers) whose top-g papers hold at
/// least g^2 citations in total.
inline std::int64_t g_index(std::span<const std::int64_t> citation_counts) {
    std::vector<std::int64_t> sorted(citation_counts.begin(), citation_counts.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::int64_t g = 0;
    std::int64_t cumulative = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        const std::int64_t candidate = static_cast<std::int64_t>(i + 1);
        if (cumulative >= candidate * candidate) g = candidate;
    }
    return g;
}

/// Per-publication citation counts visible within a scholar's age-t window,
/// restricted to publications written by that age. Feeds h/g-index metrics.
inline std::vector<std::int64_t> scholar_pub_citations(const Scholar& s, const Corpus& corpus,
                                                       int t) {
    const int last = s.career_start + t - 1;
    std::vector<std::int64_t> counts;
    for (std::size_t pi : corpus.pubs_of(corpus.scholar_idx(s.scholar_id))) {
        const Publication& p = corpus.publications()[pi];
        if (p.pub_year > last) continue;
        counts.push_back(p.history.in_window(p.pub_year, last));
    }
    return counts;
}

/// Aggregate a scholar's per-publication percentile summaries at scholar age
/// t. pub_percentiles maps pub_id to the publication's summary value; entries
/// absent from the map (typically publications with too short a history) are
/// skipped. Throws EligibilityError when nothing is aggregable, which callers
/// treat as "exclude this scholar at this age".
inline double scholar_percentile_aggregate(const Scholar& s, const Corpus& corpus,
                                           const std::map<std::string, double>& pub_percentiles,
                                           const MetricSpec& spec, int t) {
    spec.validate();
    if (spec.kind != MetricKind::pub_percentile_aggregate)
        throw DomainError("metric is not a percentile aggregate");
    const int last = s.career_start + t - 1;
    // pubs_of() is ordered by pub_id, which fixes the summation order and
    // makes tie detection on the aggregates well-defined.
    std::vector<double> values;
    for (std::size_t pi : corpus.pubs_of(corpus.scholar_idx(s.scholar_id))) {
        const Publication& p = corpus.publications()[pi];
        if (p.pub_year > last) continue;
        auto it = pub_percentiles.find(p.pub_id);
        if (it == pub_percentiles.end()) continue;
        values.push_back(it->second);
    }
    if (values.empty())
        throw EligibilityError("scholar " + s.scholar_id + " has no rankable publications at age " +
                               std::to_string(t));
    if (spec.aggregator == Aggregator::sum) {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum;
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace impactrank
