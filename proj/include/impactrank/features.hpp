#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "impactrank/corpus.hpp"
#include "impactrank/error.hpp"
#include "impactrank/metrics.hpp"
#include "impactrank/percentile.hpp"

namespace impactrank {

enum class PredictionTask { publication, scholar, future_works };

inline std::string task_name(PredictionTask t) {
    switch (t) {
        case PredictionTask::publication: return "pub";
        case PredictionTask::scholar: return "scholar";
        case PredictionTask::future_works: return "future";
    }
    return "?";
}

/// Rows of per-entity features at t1 with the differenced response at t2.
/// Publication tasks carry 30 columns, scholar tasks 42; the second half of
/// the columns are the *_delta changes over the last two ages.
struct FeatureMatrix {
    PredictionTask task = PredictionTask::publication;
    int t1 = 0;
    int t2 = 0;
    std::string target_name;
    std::vector<std::string> column_names;
    std::vector<std::string> row_ids;
    std::vector<std::string> row_owner;  // publication tasks: scholar supplying aut_* features
    std::vector<std::vector<double>> rows;
    std::vector<double> target;          // differenced response at t2
    std::vector<double> autoregressive;  // level value at t1, for level reconstruction
    std::string autoregressive_col;
    std::string delta_col;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < column_names.size(); ++i)
            if (column_names[i] == name) return i;
        throw DomainError("unknown feature column: " + name);
    }

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return column_names.size(); }
};

namespace detail {

inline const std::vector<std::string>& publication_base_features() {
    static const std::vector<std::string> names = {
        "pub_cit_cumulative", "pub_cit_yearly", "pub_cit_peryear", "pub_rp_cumulative",
        "pub_rp_yearly",      "aut_cit_cumulative", "aut_cit_yearly", "aut_npub_cumulative",
        "aut_npub_yearly",    "aut_cit_perpaper", "aut_h_index", "aut_g_index",
        "aut_maxcit_pub",     "aut_rprp5_cumulative", "aut_rprp5_yearly"};
    return names;
}

inline const std::vector<std::string>& scholar_base_features() {
    static const std::vector<std::string> names = {
        "aut_cit_cumulative",      "aut_cit_yearly",          "aut_npub_cumulative",
        "aut_npub_yearly",         "aut_h_index",             "aut_g_index",
        "aut_cit_peryear",         "aut_rprp5_cumulative",    "aut_rprp5_yearly",
        "pub_cit_cumulative_min",  "pub_cit_cumulative_mean", "pub_cit_cumulative_max",
        "pub_cit_yearly_min",      "pub_cit_yearly_mean",     "pub_cit_yearly_max",
        "pub_rp_cumulative_min",   "pub_rp_cumulative_mean",  "pub_rp_cumulative_max",
        "pub_rp_yearly_min",       "pub_rp_yearly_mean",      "pub_rp_yearly_max"};
    return names;
}

inline std::vector<std::string> with_deltas(const std::vector<std::string>& base) {
    std::vector<std::string> all = base;
    for (const auto& name : base) all.push_back(name + "_delta");
    return all;
}

struct MinMeanMax {
    double min = 0.0, mean = 0.0, max = 0.0;
};

inline MinMeanMax summarize(const std::vector<double>& v) {
    MinMeanMax out;
    if (v.empty()) return out;  // empty sets read as zeros to keep rows rectangular
    out.min = *std::min_element(v.begin(), v.end());
    out.max = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    out.mean = s / static_cast<double>(v.size());
    return out;
}

}  // namespace detail

/// Shared ranking caches for feature construction over one benchmark. Every
/// percentile pool the rows need is computed once here and reused. The input
/// corpus must outlive the context (identity benchmarks are read in place).
class FeatureContext {
public:
    FeatureContext(const Corpus& corpus, const BenchmarkSpec& bench) {
        if (benchmark_is_identity(bench)) {
            corpus_ = &corpus;
        } else {
            owned_ = filter_benchmark(corpus, bench);
            corpus_ = &*owned_;
        }
        p5_pool_ = publication_percentile_filtered(*corpus_, 5);
    }

    const Corpus& corpus() const { return *corpus_; }
    const std::map<std::string, double>& p5_pool() const { return p5_pool_; }

    const std::map<std::string, double>& pub_cumulative_pct(int age) {
        auto it = pub_cum_.find(age);
        if (it == pub_cum_.end())
            it = pub_cum_.emplace(age, publication_percentile_filtered(*corpus_, age)).first;
        return it->second;
    }

    const std::map<std::string, double>& pub_yearly_pct(int age) {
        auto it = pub_yearly_.find(age);
        if (it == pub_yearly_.end())
            it = pub_yearly_.emplace(age, publication_yearly_percentile_filtered(*corpus_, age)).first;
        return it->second;
    }

    /// S_P5 percentiles at scholar age (P5-sum over all publications by that age).
    const std::map<std::string, double>& sp5_pct(int age) {
        auto it = sp5_.find(age);
        if (it == sp5_.end()) it = sp5_.emplace(age, compute_sp5(age)).first;
        return it->second;
    }

    /// Scholar percentile of the P5 sum over just the papers written at the
    /// given scholar age. Scholars without such papers enter with metric 0 and
    /// land in the bottom tie block instead of being excluded.
    const std::map<std::string, double>& sp5_yearly_pct(int age) {
        auto it = sp5_yearly_.find(age);
        if (it == sp5_yearly_.end()) it = sp5_yearly_.emplace(age, compute_sp5_yearly(age)).first;
        return it->second;
    }

    /// Precompute rankings for the given ages so later lookups are pure reads
    /// and safe to perform from several threads. Ages with no rankable entity
    /// are skipped.
    void warm(const std::vector<int>& pub_ages, const std::vector<int>& scholar_ages,
              unsigned jobs = 1) {
        std::vector<int> missing_pub, missing_sch;
        for (int a : pub_ages)
            if (!pub_cum_.count(a)) missing_pub.push_back(a);
        for (int a : scholar_ages)
            if (!sp5_.count(a)) missing_sch.push_back(a);
        std::vector<std::map<std::string, double>> pub_out(missing_pub.size());
        parallel_for(missing_pub.size(), jobs, [&](std::size_t i) {
            try {
                pub_out[i] = publication_percentile_filtered(*corpus_, missing_pub[i]);
            } catch (const EligibilityError&) {
            }
        });
        for (std::size_t i = 0; i < missing_pub.size(); ++i)
            if (!pub_out[i].empty()) pub_cum_.emplace(missing_pub[i], std::move(pub_out[i]));
        std::vector<std::map<std::string, double>> sch_out(missing_sch.size());
        parallel_for(missing_sch.size(), jobs, [&](std::size_t i) {
            try {
                sch_out[i] = compute_sp5(missing_sch[i]);
            } catch (const EligibilityError&) {
            }
        });
        for (std::size_t i = 0; i < missing_sch.size(); ++i)
            if (!sch_out[i].empty()) sp5_.emplace(missing_sch[i], std::move(sch_out[i]));
    }

private:
    std::map<std::string, double> compute_sp5(int age) {
        std::vector<std::string> ids;
        std::vector<double> values;
        for (const Scholar& s : corpus_->scholars()) {
            if (s.observed_years(corpus_->end_year()) < age) continue;
            try {
                values.push_back(scholar_percentile_aggregate(s, *corpus_, p5_pool_,
                                                              MetricSpec::p5_sum(), age));
            } catch (const EligibilityError&) {
                continue;
            }
            ids.push_back(s.scholar_id);
        }
        if (ids.empty())
            throw EligibilityError("no scholar is rankable at age " + std::to_string(age));
        return detail::rank_to_map(ids, values);
    }

    std::map<std::string, double> compute_sp5_yearly(int age) {
        std::vector<std::string> ids;
        std::vector<double> values;
        for (const Scholar& s : corpus_->scholars()) {
            if (s.observed_years(corpus_->end_year()) < age) continue;
            const int year = s.career_start + age - 1;
            double sum = 0.0;
            for (std::size_t pi : corpus_->pubs_of(corpus_->scholar_idx(s.scholar_id))) {
                const Publication& p = corpus_->publications()[pi];
                if (p.pub_year != year) continue;
                auto it = p5_pool_.find(p.pub_id);
                if (it != p5_pool_.end()) sum += it->second;
            }
            ids.push_back(s.scholar_id);
            values.push_back(sum);
        }
        if (ids.empty())
            throw EligibilityError("no scholar is rankable at age " + std::to_string(age));
        return detail::rank_to_map(ids, values);
    }

    std::optional<Corpus> owned_;
    const Corpus* corpus_ = nullptr;
    std::map<std::string, double> p5_pool_;
    std::map<int, std::map<std::string, double>> pub_cum_;
    std::map<int, std::map<std::string, double>> pub_yearly_;
    std::map<int, std::map<std::string, double>> sp5_;
    std::map<int, std::map<std::string, double>> sp5_yearly_;
};

namespace detail {

/// Author-level statistics visible through the boundary calendar year.
struct AuthorSnapshot {
    double cit_cumulative = 0.0;
    double cit_yearly = 0.0;
    double npub_cumulative = 0.0;
    double npub_yearly = 0.0;
    double h = 0.0;
    double g = 0.0;
    double maxcit = 0.0;
};

inline AuthorSnapshot author_snapshot(const Corpus& corpus, const Scholar& s, int boundary_year) {
    AuthorSnapshot a;
    std::vector<std::int64_t> per_pub;
    for (std::size_t pi : corpus.pubs_of(corpus.scholar_idx(s.scholar_id))) {
        const Publication& p = corpus.publications()[pi];
        if (p.pub_year > boundary_year) continue;
        const std::int64_t cit = p.history.in_window(p.pub_year, boundary_year);
        per_pub.push_back(cit);
        a.cit_cumulative += static_cast<double>(cit);
        a.cit_yearly += static_cast<double>(p.history.in_window(boundary_year, boundary_year));
        a.npub_cumulative += 1.0;
        if (p.pub_year == boundary_year) a.npub_yearly += 1.0;
        a.maxcit = std::max(a.maxcit, static_cast<double>(cit));
    }
    a.h = static_cast<double>(h_index(per_pub));
    a.g = static_cast<double>(g_index(per_pub));
    return a;
}

}  // namespace detail

/// One publication-task feature vector at age t1 (base features only; the
/// caller stitches together the t1 and t1-2 evaluations into deltas). The
/// owning scholar with the largest aut_cit_cumulative at t1 supplies the
/// aut_* columns; out_owner reports which one that was.
inline std::vector<double> publication_features_at(FeatureContext& ctx, const Publication& p,
                                                   int t1, std::string* out_owner = nullptr) {
    if (t1 < 1) throw DomainError("publication age must be at least 1");
    const Corpus& corpus = ctx.corpus();
    if (p.observed_years(corpus.end_year()) < t1)
        throw EligibilityError("publication " + p.pub_id + " not observable through age " +
                               std::to_string(t1));
    const int boundary = p.pub_year + t1 - 1;

    // pick the owning scholar with the largest citation total at the boundary
    const Scholar* owner = nullptr;
    detail::AuthorSnapshot snap;
    for (const auto& sid : p.scholar_ids) {
        const Scholar& cand = corpus.scholar(sid);
        const auto cand_snap = detail::author_snapshot(corpus, cand, boundary);
        if (!owner || cand_snap.cit_cumulative > snap.cit_cumulative) {
            owner = &cand;
            snap = cand_snap;
        }
    }
    if (out_owner) *out_owner = owner->scholar_id;
    const int author_age = owner->age_at(boundary);

    const double cit_cum = static_cast<double>(p.history.in_window(p.pub_year, boundary));
    const double cit_yearly = static_cast<double>(p.history.in_window(boundary, boundary));

    std::vector<double> row;
    row.reserve(detail::publication_base_features().size());
    row.push_back(cit_cum);
    row.push_back(cit_yearly);
    row.push_back(cit_cum / static_cast<double>(t1));
    row.push_back(ctx.pub_cumulative_pct(t1).at(p.pub_id));
    row.push_back(ctx.pub_yearly_pct(t1).at(p.pub_id));
    row.push_back(snap.cit_cumulative);
    row.push_back(snap.cit_yearly);
    row.push_back(snap.npub_cumulative);
    row.push_back(snap.npub_yearly);
    row.push_back(snap.npub_cumulative > 0.0 ? snap.cit_cumulative / snap.npub_cumulative : 0.0);
    row.push_back(snap.h);
    row.push_back(snap.g);
    row.push_back(snap.maxcit);
    row.push_back(ctx.sp5_pct(author_age).at(owner->scholar_id));
    row.push_back(ctx.sp5_yearly_pct(author_age).at(owner->scholar_id));
    return row;
}

/// One scholar-task feature vector at scholar age t1 (base features only).
inline std::vector<double> scholar_features_at(FeatureContext& ctx, const Scholar& s, int t1) {
    if (t1 < 1) throw DomainError("scholar age must be at least 1");
    const Corpus& corpus = ctx.corpus();
    if (s.observed_years(corpus.end_year()) < t1)
        throw EligibilityError("scholar " + s.scholar_id + " not observable through age " +
                               std::to_string(t1));
    const int boundary = s.career_start + t1 - 1;
    const auto snap = detail::author_snapshot(corpus, s, boundary);
    if (snap.npub_cumulative == 0.0)
        throw EligibilityError("scholar " + s.scholar_id + " has no publications by age " +
                               std::to_string(t1));

    std::vector<double> all_cit, new_cit, all_rp, new_rp;
    for (std::size_t pi : corpus.pubs_of(corpus.scholar_idx(s.scholar_id))) {
        const Publication& p = corpus.publications()[pi];
        if (p.pub_year > boundary) continue;
        const int pub_age = boundary - p.pub_year + 1;
        all_cit.push_back(static_cast<double>(p.history.in_window(p.pub_year, boundary)));
        all_rp.push_back(ctx.pub_cumulative_pct(pub_age).at(p.pub_id));
        if (p.pub_year == boundary) {
            new_cit.push_back(static_cast<double>(p.history.in_window(boundary, boundary)));
            new_rp.push_back(ctx.pub_cumulative_pct(1).at(p.pub_id));
        }
    }
    const auto mm_all_cit = detail::summarize(all_cit);
    const auto mm_new_cit = detail::summarize(new_cit);
    const auto mm_all_rp = detail::summarize(all_rp);
    const auto mm_new_rp = detail::summarize(new_rp);

    std::vector<double> row;
    row.reserve(detail::scholar_base_features().size());
    row.push_back(snap.cit_cumulative);
    row.push_back(snap.cit_yearly);
    row.push_back(snap.npub_cumulative);
    row.push_back(snap.npub_yearly);
    row.push_back(snap.h);
    row.push_back(snap.g);
    row.push_back(snap.cit_cumulative / static_cast<double>(t1));
    row.push_back(ctx.sp5_pct(t1).at(s.scholar_id));
    row.push_back(ctx.sp5_yearly_pct(t1).at(s.scholar_id));
    row.push_back(mm_all_cit.min);
    row.push_back(mm_all_cit.mean);
    row.push_back(mm_all_cit.max);
    row.push_back(mm_new_cit.min);
    row.push_back(mm_new_cit.mean);
    row.push_back(mm_new_cit.max);
    row.push_back(mm_all_rp.min);
    row.push_back(mm_all_rp.mean);
    row.push_back(mm_all_rp.max);
    row.push_back(mm_new_rp.min);
    row.push_back(mm_new_rp.mean);
    row.push_back(mm_new_rp.max);
    return row;
}

/// Entities enter a prediction task only with a full observation horizon, so
/// the same population persists across every (t1, t2) pair.
inline constexpr int kFullHistoryYears = 30;

/// Assemble the feature matrix for one (t1, t2) task against an existing
/// context. Features are evaluated at t1 and t1-2 (for the deltas); the
/// target is the differenced percentile at t2. t1 must be at least 3 so the
/// delta window exists.
inline FeatureMatrix assemble_with(FeatureContext& ctx, PredictionTask task, int t1, int t2) {
    if (t2 <= t1) throw DomainError("t2 must exceed t1");
    if (t1 < 3) throw DomainError("t1 must be at least 3: delta features need age t1-2");

    const Corpus& filtered = ctx.corpus();

    FeatureMatrix m;
    m.task = task;
    m.t1 = t1;
    m.t2 = t2;

    if (task == PredictionTask::publication) {
        m.target_name = "delta_pub_percentile";
        m.column_names = detail::with_deltas(detail::publication_base_features());
        m.autoregressive_col = "pub_rp_cumulative";
        m.delta_col = "pub_rp_cumulative_delta";
        const auto& pct_t1 = ctx.pub_cumulative_pct(t1);
        const auto& pct_t2 = ctx.pub_cumulative_pct(t2);
        for (const Publication& p : filtered.publications()) {
            if (p.observed_years(filtered.end_year()) < kFullHistoryYears) continue;
            std::string owner;
            std::vector<double> base = publication_features_at(ctx, p, t1, &owner);
            const std::vector<double> prev = publication_features_at(ctx, p, t1 - 2);
            for (std::size_t i = 0; i < prev.size(); ++i) base.push_back(base[i] - prev[i]);
            m.row_ids.push_back(p.pub_id);
            m.row_owner.push_back(owner);
            m.autoregressive.push_back(pct_t1.at(p.pub_id));
            m.target.push_back(pct_t2.at(p.pub_id) - pct_t1.at(p.pub_id));
            m.rows.push_back(std::move(base));
        }
    } else {
        m.target_name = task == PredictionTask::scholar ? "delta_scholar_percentile"
                                                        : "delta_future_works_percentile";
        m.column_names = detail::with_deltas(detail::scholar_base_features());
        m.autoregressive_col = "aut_rprp5_cumulative";
        m.delta_col = "aut_rprp5_cumulative_delta";
        const auto& sp5_t1 = ctx.sp5_pct(t1);
        std::map<std::string, double> target_map;
        if (task == PredictionTask::scholar) {
            target_map = ctx.sp5_pct(t2);
        } else {
            ScholarRankContext rank_ctx(filtered, BenchmarkSpec::all(), MetricSpec::p5_sum());
            target_map = rank_ctx.future_works(t1, t2);
        }
        for (const Scholar& s : filtered.scholars()) {
            if (s.observed_years(filtered.end_year()) < kFullHistoryYears) continue;
            auto target_it = target_map.find(s.scholar_id);
            if (target_it == target_map.end()) continue;  // e.g. no papers in (t1, t2]
            auto ar_it = sp5_t1.find(s.scholar_id);
            if (ar_it == sp5_t1.end()) continue;
            std::vector<double> base = scholar_features_at(ctx, s, t1);
            const std::vector<double> prev = scholar_features_at(ctx, s, t1 - 2);
            for (std::size_t i = 0; i < prev.size(); ++i) base.push_back(base[i] - prev[i]);
            m.row_ids.push_back(s.scholar_id);
            m.autoregressive.push_back(ar_it->second);
            m.target.push_back(target_it->second - ar_it->second);
            m.rows.push_back(std::move(base));
        }
    }
    return m;
}

inline FeatureMatrix assemble(const Corpus& corpus, const BenchmarkSpec& bench,
                              PredictionTask task, int t1, int t2) {
    FeatureContext ctx(corpus, bench);
    return assemble_with(ctx, task, t1, t2);
}

}  // namespace impactrank
