#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "impactrank/error.hpp"
#include "impactrank/flatmap.hpp"

namespace impactrank {

/// Yearly citation counts keyed by calendar year. Years absent from the map
/// mean zero citations in that year.
struct CitationHistory {
    FlatMap<int, std::int64_t> counts;

    /// Citations received in calendar years [first, last], inclusive.
    std::int64_t in_window(int first, int last) const {
        std::int64_t total = 0;
        for (auto it = counts.lower_bound(first); it != counts.end() && it->first <= last; ++it)
            total += it->second;
        return total;
    }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& [year, n] : counts) t += n;
        return t;
    }

    bool operator==(const CitationHistory&) const = default;
};

struct Publication {
    std::string pub_id;
    std::vector<std::string> scholar_ids;  // owning scholars, sorted, non-empty
    int pub_year = 0;
    CitationHistory history;

    /// Age convention: the publication year itself is age 1, so the age-t
    /// window covers calendar years [pub_year, pub_year + t - 1].
    std::int64_t citations_by_age(int t) const {
        return history.in_window(pub_year, pub_year + t - 1);
    }

    int observed_years(int end_year) const { return end_year - pub_year + 1; }

    bool operator==(const Publication&) const = default;
};

struct Scholar {
    std::string scholar_id;
    int career_start = 0;                 // calendar year of the first publication
    std::vector<std::string> interests;   // lowercase keyword strings
    bool tenured = false;

    int age_at(int year) const { return year - career_start + 1; }
    int observed_years(int end_year) const { return end_year - career_start + 1; }

    bool operator==(const Scholar&) const = default;
};

/// Immutable, validated collection of scholars and publications. Build once
/// via Corpus::build (or the io module); all downstream reads are
/// thread-safe without coordination.
class Corpus {
public:
    Corpus() = default;

    /// Validates and indexes the raw records:
    ///  - sorts scholars and publications by id, rejects duplicates
    ///  - rejects publications with empty or dangling scholar references
    ///  - rejects negative citation counts and citation years before pub_year
    ///  - rejects publications dated after end_year, and scholars owning none
    ///  - recomputes each scholar's career_start as the minimum pub_year
    static Corpus build(std::vector<Scholar> scholars, std::vector<Publication> publications,
                        int end_year) {
        return build_impl(std::move(scholars), std::move(publications), end_year, true);
    }

    /// Rebuild preserving the provided career_start values. Cohort filters
    /// need this: a pub_year-restricted publication set no longer determines
    /// the scholars' true career starts.
    static Corpus rebuild_with_career_starts(std::vector<Scholar> scholars,
                                             std::vector<Publication> publications,
                                             int end_year) {
        return build_impl(std::move(scholars), std::move(publications), end_year, false);
    }

private:
    static Corpus build_impl(std::vector<Scholar> scholars, std::vector<Publication> publications,
                             int end_year, bool recompute_career_start) {
        Corpus c;
        c.end_year_ = end_year;
        c.scholars_ = std::move(scholars);
        c.publications_ = std::move(publications);

        std::sort(c.scholars_.begin(), c.scholars_.end(),
                  [](const Scholar& a, const Scholar& b) { return a.scholar_id < b.scholar_id; });
        std::sort(c.publications_.begin(), c.publications_.end(),
                  [](const Publication& a, const Publication& b) { return a.pub_id < b.pub_id; });

        for (std::size_t i = 0; i < c.scholars_.size(); ++i) {
            const auto& s = c.scholars_[i];
            if (i > 0 && s.scholar_id == c.scholars_[i - 1].scholar_id)
                throw ValidationError("duplicate scholar_id: " + s.scholar_id);
            c.scholar_index_[s.scholar_id] = i;
        }

        for (std::size_t i = 0; i < c.publications_.size(); ++i) {
            auto& p = c.publications_[i];
            if (i > 0 && p.pub_id == c.publications_[i - 1].pub_id)
                throw ValidationError("duplicate pub_id: " + p.pub_id);
            if (p.scholar_ids.empty())
                throw ValidationError("publication without scholars: " + p.pub_id);
            std::sort(p.scholar_ids.begin(), p.scholar_ids.end());
            p.scholar_ids.erase(std::unique(p.scholar_ids.begin(), p.scholar_ids.end()),
                                p.scholar_ids.end());
            if (p.pub_year > end_year)
                throw ValidationError("publication " + p.pub_id + " dated after end year");
            for (const auto& [year, n] : p.history.counts) {
                if (n < 0)
                    throw ValidationError("negative citation count for " + p.pub_id);
                if (year < p.pub_year)
                    throw ValidationError("citation year precedes publication year for " + p.pub_id);
            }
            for (const auto& sid : p.scholar_ids) {
                auto it = c.scholar_index_.find(sid);
                if (it == c.scholar_index_.end())
                    throw ValidationError("publication " + p.pub_id + " references unknown scholar " + sid);
            }
            c.pub_index_[p.pub_id] = i;
        }

        c.pubs_of_scholar_.assign(c.scholars_.size(), {});
        for (std::size_t i = 0; i < c.publications_.size(); ++i)
            for (const auto& sid : c.publications_[i].scholar_ids)
                c.pubs_of_scholar_[c.scholar_index_.at(sid)].push_back(i);

        for (std::size_t s = 0; s < c.scholars_.size(); ++s) {
            const auto& pubs = c.pubs_of_scholar_[s];
            if (pubs.empty())
                throw ValidationError("scholar owns no publications: " + c.scholars_[s].scholar_id);
            if (recompute_career_start) {
                int first = c.publications_[pubs.front()].pub_year;
                for (std::size_t pi : pubs) first = std::min(first, c.publications_[pi].pub_year);
                c.scholars_[s].career_start = first;
            }
        }
        return c;
    }

public:
    int end_year() const { return end_year_; }
    const std::vector<Scholar>& scholars() const { return scholars_; }
    const std::vector<Publication>& publications() const { return publications_; }
    bool empty() const { return scholars_.empty() && publications_.empty(); }

    const Scholar& scholar(const std::string& id) const {
        auto it = scholar_index_.find(id);
        if (it == scholar_index_.end()) throw ValidationError("unknown scholar: " + id);
        return scholars_[it->second];
    }

    const Publication& publication(const std::string& id) const {
        auto it = pub_index_.find(id);
        if (it == pub_index_.end()) throw ValidationError("unknown publication: " + id);
        return publications_[it->second];
    }

    bool has_scholar(const std::string& id) const { return scholar_index_.count(id) != 0; }

    /// Publication indices owned by scholar index s, ordered by pub_id.
    const std::vector<std::size_t>& pubs_of(std::size_t scholar_idx) const {
        return pubs_of_scholar_[scholar_idx];
    }

    std::size_t scholar_idx(const std::string& id) const { return scholar_index_.at(id); }

    bool operator==(const Corpus& other) const {
        return end_year_ == other.end_year_ && scholars_ == other.scholars_ &&
               publications_ == other.publications_;
    }

private:
    int end_year_ = 0;
    std::vector<Scholar> scholars_;
    std::vector<Publication> publications_;
    std::unordered_map<std::string, std::size_t> scholar_index_;
    std::unordered_map<std::string, std::size_t> pub_index_;
    std::vector<std::vector<std::size_t>> pubs_of_scholar_;
};

// ---------------------------------------------------------------------------
// Benchmarks.
// ---------------------------------------------------------------------------

enum class BenchmarkKind { all, tenured, field_keywords, custom_ids };

/// Optional cohort restriction layered on top of the benchmark kind.
struct CohortFilter {
    enum class Key { pub_year, career_start };
    Key key = Key::career_start;
    int year = 0;
};

struct BenchmarkSpec {
    BenchmarkKind kind = BenchmarkKind::all;
    std::vector<std::string> keywords;   // for field_keywords
    std::set<std::string> ids;           // for custom_ids
    std::optional<CohortFilter> cohort;

    static BenchmarkSpec all() { return {}; }
    static BenchmarkSpec tenured() { return {BenchmarkKind::tenured, {}, {}, {}}; }
    static BenchmarkSpec field(std::vector<std::string> kws) {
        return {BenchmarkKind::field_keywords, std::move(kws), {}, {}};
    }
    static BenchmarkSpec custom(std::set<std::string> scholar_ids) {
        return {BenchmarkKind::custom_ids, {}, std::move(scholar_ids), {}};
    }

    BenchmarkSpec with_cohort(CohortFilter::Key key, int year) const {
        BenchmarkSpec s = *this;
        s.cohort = CohortFilter{key, year};
        return s;
    }

    std::string label() const {
        std::string s;
        switch (kind) {
            case BenchmarkKind::all: s = "all"; break;
            case BenchmarkKind::tenured: s = "tenured"; break;
            case BenchmarkKind::field_keywords: {
                s = "field:";
                for (std::size_t i = 0; i < keywords.size(); ++i) {
                    if (i) s += '+';
                    s += keywords[i];
                }
                break;
            }
            case BenchmarkKind::custom_ids: s = "custom[" + std::to_string(ids.size()) + "]"; break;
        }
        if (cohort) {
            s += cohort->key == CohortFilter::Key::pub_year ? "@pub=" : "@career=";
            s += std::to_string(cohort->year);
        }
        return s;
    }
};

namespace detail {

inline std::string to_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

inline bool interests_match(const Scholar& s, const std::vector<std::string>& keywords) {
    for (const auto& interest : s.interests) {
        const std::string low = to_lower(interest);
        for (const auto& kw : keywords)
            if (low.find(to_lower(kw)) != std::string::npos) return true;
    }
    return false;
}

}  // namespace detail

/// Sub-corpus selected by the benchmark. Field and tenure filters keep the
/// matching scholars together with all their publications; a pub_year cohort
/// keeps only publications from that year (scholars left without any are
/// dropped). career_start values are carried over unchanged so scholar ages
/// keep their original meaning inside a restricted benchmark.
inline Corpus filter_benchmark(const Corpus& corpus, const BenchmarkSpec& spec) {
    if (spec.kind == BenchmarkKind::custom_ids)
        for (const auto& id : spec.ids)
            if (!corpus.has_scholar(id))
                throw ValidationError("benchmark references unknown scholar: " + id);

    std::set<std::string> kept_scholars;
    for (const auto& s : corpus.scholars()) {
        bool keep = true;
        switch (spec.kind) {
            case BenchmarkKind::all: break;
            case BenchmarkKind::tenured: keep = s.tenured; break;
            case BenchmarkKind::field_keywords: keep = detail::interests_match(s, spec.keywords); break;
            case BenchmarkKind::custom_ids: keep = spec.ids.count(s.scholar_id) != 0; break;
        }
        if (keep && spec.cohort && spec.cohort->key == CohortFilter::Key::career_start)
            keep = s.career_start == spec.cohort->year;
        if (keep) kept_scholars.insert(s.scholar_id);
    }

    std::vector<Publication> pubs;
    std::set<std::string> scholars_with_pubs;
    for (const auto& p : corpus.publications()) {
        if (spec.cohort && spec.cohort->key == CohortFilter::Key::pub_year &&
            p.pub_year != spec.cohort->year)
            continue;
        Publication kept = p;
        kept.scholar_ids.clear();
        for (const auto& sid : p.scholar_ids)
            if (kept_scholars.count(sid)) kept.scholar_ids.push_back(sid);
        if (kept.scholar_ids.empty()) continue;
        for (const auto& sid : kept.scholar_ids) scholars_with_pubs.insert(sid);
        pubs.push_back(std::move(kept));
    }

    std::vector<Scholar> scholars;
    for (const auto& s : corpus.scholars())
        if (scholars_with_pubs.count(s.scholar_id)) scholars.push_back(s);

    Corpus out = Corpus::build(std::move(scholars), std::move(pubs), corpus.end_year());
    if (!spec.cohort || spec.cohort->key != CohortFilter::Key::pub_year) return out;
    // build() recomputed career_start from the restricted publication set;
    // restore the original values so scholar ages keep their meaning.
    std::vector<Scholar> fixed = out.scholars();
    for (auto& s : fixed) s.career_start = corpus.scholar(s.scholar_id).career_start;
    return Corpus::rebuild_with_career_starts(std::move(fixed), out.publications(), out.end_year());
}

/// Publications observed for at least t full calendar years.
inline std::set<std::string> eligible_publications(const Corpus& corpus, int t) {
    if (t < 1) throw DomainError("publication age must be at least 1");
    std::set<std::string> out;
    for (const auto& p : corpus.publications())
        if (p.observed_years(corpus.end_year()) >= t) out.insert(p.pub_id);
    return out;
}

/// Index-based variant used by the ranking engine.
inline std::vector<std::size_t> eligible_publication_indices(const Corpus& corpus, int t) {
    if (t < 1) throw DomainError("publication age must be at least 1");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < corpus.publications().size(); ++i)
        if (corpus.publications()[i].observed_years(corpus.end_year()) >= t) out.push_back(i);
    return out;
}

}  // namespace impactrank
