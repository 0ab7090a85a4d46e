#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "impactrank/corpus.hpp"
#include "impactrank/error.hpp"
#include "impactrank/mathutil.hpp"

namespace impactrank {

/// Configuration of the synthetic corpus generator. Scholars are assigned
/// round-robin to career-start cohorts; each publishes a Poisson number of
/// papers per year over its career span. A paper published in year y draws a
/// lifetime citation total from lognormal(mu, sigma), optionally inflated by
/// (1 + yearly_inflation)^(y - first_cohort), and spreads it over subsequent
/// years with geometric decay; yearly_noise_sigma adds multiplicative
/// lognormal shocks so ranks keep churning with age.
struct SynthConfig {
    std::size_t n_scholars = 2000;
    int career_span = 30;
    double pubs_per_year = 2.0;
    double lognormal_mu = 3.0;
    double lognormal_sigma = 1.0;
    double decay = 0.85;                 // geometric aging factor, in (0,1)
    double yearly_noise_sigma = 0.0;
    double yearly_inflation = 0.0;
    int first_cohort = 1980;
    int n_cohorts = 10;
    double tenured_fraction = 0.5;
    std::uint64_t seed = 7;

    int last_cohort() const { return first_cohort + n_cohorts - 1; }
    /// Observation horizon: the latest possible publication still gets a full
    /// five years of history.
    int end_year() const { return last_cohort() + career_span + 3; }

    void validate() const {
        if (career_span < 1) throw DomainError("career_span must be positive");
        if (pubs_per_year <= 0.0) throw DomainError("pubs_per_year must be positive");
        if (!(decay > 0.0 && decay < 1.0)) throw DomainError("decay must lie in (0,1)");
        if (n_cohorts < 1) throw DomainError("n_cohorts must be positive");
        if (lognormal_sigma < 0.0 || yearly_noise_sigma < 0.0)
            throw DomainError("sigma parameters must be non-negative");
        if (yearly_inflation < 0.0) throw DomainError("yearly_inflation must be non-negative");
    }
};

namespace detail {

inline const std::vector<std::string>& synth_interest_pool() {
    static const std::vector<std::string> pool = {
        "biology", "genetics", "neuroscience", "cell biology",
        "physics", "chemistry", "mathematics", "computer science"};
    return pool;
}

/// Spread a lifetime citation total over [pub_year, end_year] with geometric
/// decay and optional yearly shocks, as integer Poisson counts.
inline CitationHistory spread_citations(Rng& rng, double lifetime, int pub_year, int end_year,
                                        double decay, double noise_sigma) {
    CitationHistory h;
    double share = 1.0 - decay;
    for (int year = pub_year; year <= end_year; ++year) {
        double lambda = lifetime * share;
        if (noise_sigma > 0.0)
            lambda *= std::exp(noise_sigma * normal01(rng) - 0.5 * noise_sigma * noise_sigma);
        const long n = poisson(rng, lambda);
        if (n > 0) h.counts[year] = n;
        share *= decay;
    }
    return h;
}

}  // namespace detail

/// Deterministic synthetic corpus: the same config (seed included) always
/// serializes to the same bytes. Each scholar consumes an independent
/// sub-seed, so the per-scholar streams do not interleave.
inline Corpus generate(const SynthConfig& config) {
    config.validate();
    std::vector<Scholar> scholars;
    std::vector<Publication> pubs;
    for (std::size_t i = 0; i < config.n_scholars; ++i) {
        Rng rng = make_rng(splitmix64(config.seed ^ (0x5eed0000ULL + i)));
        Scholar s;
        s.scholar_id = "s" + std::to_string(i);
        s.career_start = config.first_cohort + static_cast<int>(i % static_cast<std::size_t>(config.n_cohorts));
        const auto& pool = detail::synth_interest_pool();
        s.interests = {pool[uniform_below(rng, pool.size())]};
        s.tenured = uniform01(rng) < config.tenured_fraction;

        int pub_counter = 0;
        for (int y = 0; y < config.career_span; ++y) {
            const int year = s.career_start + y;
            if (year > config.end_year()) break;
            long n = poisson(rng, config.pubs_per_year);
            if (y == 0) n = std::max(n, 1L);  // the first year defines career_start
            for (long k = 0; k < n; ++k) {
                Publication p;
                p.pub_id = s.scholar_id + "_p" + std::to_string(pub_counter++);
                p.scholar_ids = {s.scholar_id};
                p.pub_year = year;
                double lifetime = lognormal(rng, config.lognormal_mu, config.lognormal_sigma);
                if (config.yearly_inflation > 0.0)
                    lifetime *= std::pow(1.0 + config.yearly_inflation,
                                         static_cast<double>(year - config.first_cohort));
                p.history = detail::spread_citations(rng, lifetime, year, config.end_year(),
                                                     config.decay, config.yearly_noise_sigma);
                pubs.push_back(std::move(p));
            }
        }
        scholars.push_back(std::move(s));
    }
    return Corpus::build(std::move(scholars), std::move(pubs), config.end_year());
}

/// The three hand-crafted careers added to a cohort for the indicator
/// comparison experiment:
///   A floods papers: the cohort's 90th-percentile yearly output, each paper
///     at the 10th percentile of lifetime citations.
///   B publishes one early paper at the 99th citation percentile.
///   C publishes one early paper at the cohort median.
/// The thresholds are fixed constants of this artifact; citation paths use
/// the same geometric spread as the generator, deterministically rounded.
inline Corpus inject_artificial_scholars(const Corpus& corpus, int cohort_year,
                                         double decay = 0.85) {
    std::vector<const Scholar*> cohort;
    for (const auto& s : corpus.scholars())
        if (s.career_start == cohort_year) cohort.push_back(&s);
    if (cohort.empty())
        throw EligibilityError("no scholar starts a career in " + std::to_string(cohort_year));

    // cohort statistics: per-scholar yearly output and per-paper lifetime totals
    std::vector<double> yearly_output;
    std::vector<double> paper_totals;
    for (const Scholar* s : cohort) {
        const auto& pub_idx = corpus.pubs_of(corpus.scholar_idx(s->scholar_id));
        std::map<int, int> per_year;
        for (std::size_t pi : pub_idx) {
            const Publication& p = corpus.publications()[pi];
            ++per_year[p.pub_year];
            paper_totals.push_back(static_cast<double>(p.history.total()));
        }
        for (const auto& [year, n] : per_year) yearly_output.push_back(static_cast<double>(n));
    }
    std::sort(yearly_output.begin(), yearly_output.end());
    std::sort(paper_totals.begin(), paper_totals.end());
    const int papers_per_year =
        std::max(1, static_cast<int>(std::llround(quantile_of_sorted(yearly_output, 0.90))));
    const double low_impact = quantile_of_sorted(paper_totals, 0.10);
    const double high_impact = quantile_of_sorted(paper_totals, 0.99);
    const double median_impact = quantile_of_sorted(paper_totals, 0.50);

    const int end_year = corpus.end_year();
    const auto spread_rounded = [&](double lifetime, int pub_year) {
        CitationHistory h;
        double share = 1.0 - decay;
        for (int year = pub_year; year <= end_year; ++year) {
            const long n = std::llround(lifetime * share);
            if (n > 0) h.counts[year] = n;
            share *= decay;
        }
        return h;
    };

    std::vector<Scholar> scholars(corpus.scholars());
    std::vector<Publication> pubs(corpus.publications());

    Scholar a;
    a.scholar_id = "synthA";
    a.interests = {"synthetic"};
    scholars.push_back(a);
    int counter = 0;
    for (int year = cohort_year; year <= end_year - 4; ++year) {
        for (int k = 0; k < papers_per_year; ++k) {
            Publication p;
            p.pub_id = "synthA_p" + std::to_string(counter++);
            p.scholar_ids = {"synthA"};
            p.pub_year = year;
            p.history = spread_rounded(low_impact, year);
            pubs.push_back(std::move(p));
        }
    }

    for (const auto& [id, impact] :
         std::vector<std::pair<std::string, double>>{{"synthB", high_impact},
                                                     {"synthC", median_impact}}) {
        Scholar s;
        s.scholar_id = id;
        s.interests = {"synthetic"};
        scholars.push_back(s);
        Publication p;
        p.pub_id = id + "_p0";
        p.scholar_ids = {id};
        p.pub_year = cohort_year;
        p.history = spread_rounded(impact, cohort_year);
        pubs.push_back(std::move(p));
    }

    return Corpus::build(std::move(scholars), std::move(pubs), end_year);
}

}  // namespace impactrank
